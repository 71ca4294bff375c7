#include "cli/commands.hpp"

int main(int argc, char** argv) { return sgi::cli::run_cli(argc, argv); }
