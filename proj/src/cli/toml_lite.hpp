#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace sgi::cli {

// Parsed document: nested tables as JSON objects plus the source line of every
// dotted key, for error messages.
struct TomlDocument {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  std::map<std::string, int> lines;

  int line_of(const std::string& dotted) const;
};

// Subset of TOML: [table] and [a.b] headers, key = value with basic and literal
// strings, integers, floats, booleans and (multi-line) arrays, # comments.
// Throws ConfigError with the line number on malformed input.
TomlDocument parse_toml(const std::string& text);

std::string toml_value(const nlohmann::ordered_json& v);

}  // namespace sgi::cli
