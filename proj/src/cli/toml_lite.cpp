#include "cli/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <iomanip>
#include <locale>
#include <sstream>
#include <vector>

#include "sgi/types.hpp"

namespace sgi::cli {

using ojson = nlohmann::ordered_json;

int TomlDocument::line_of(const std::string& dotted) const {
  const auto it = lines.find(dotted);
  return it == lines.end() ? 0 : it->second;
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  TomlDocument run() {
    TomlDocument doc;
    std::vector<std::string> table;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = parse_header();
        std::string dotted;
        ojson* t = &doc.root;
        for (const auto& k : table) {
          dotted += (dotted.empty() ? "" : ".") + k;
          if (!t->contains(k)) {
            (*t)[k] = ojson::object();
            doc.lines[dotted] = line_;
          } else if (!(*t)[k].is_object()) {
            fail("'" + dotted + "' is already defined as a value");
          }
          t = &(*t)[k];
        }
      } else {
        const int at = line_;
        const std::vector<std::string> key = parse_key();
        skip_space();
        expect('=');
        skip_space();
        ojson value = parse_value();
        end_of_line();
        ojson* t = &doc.root;
        std::string dotted;
        for (const auto& k : table) {
          dotted += (dotted.empty() ? "" : ".") + k;
          t = &(*t)[k];
        }
        for (std::size_t i = 0; i + 1 < key.size(); ++i) {
          dotted += (dotted.empty() ? "" : ".") + key[i];
          if (!t->contains(key[i])) (*t)[key[i]] = ojson::object();
          t = &(*t)[key[i]];
          if (!t->is_object()) fail("'" + dotted + "' is not a table", at);
        }
        dotted += (dotted.empty() ? "" : ".") + key.back();
        if (t->contains(key.back())) fail("duplicate key '" + dotted + "'", at);
        (*t)[key.back()] = std::move(value);
        doc.lines[dotted] = at;
      }
    }
    return doc;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& what, int line = 0) const {
    throw ConfigError("config line " + std::to_string(line ? line : line_) + ": " + what);
  }

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  char get() {
    const char c = s_[i_++];
    if (c == '\n') ++line_;
    return c;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }

  void skip_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') get();
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
      } else {
        break;
      }
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_all() {
    while (!eof()) {
      skip_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') get();
      else break;
    }
  }
  void end_of_line() {
    skip_space();
    skip_comment();
    if (peek() == '\r') get();
    if (!eof() && peek() != '\n') fail("unexpected text after value");
    if (!eof()) get();
  }

  std::string parse_simple_key() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += get();
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts{parse_simple_key()};
    skip_space();
    while (peek() == '.') {
      get();
      skip_space();
      parts.push_back(parse_simple_key());
      skip_space();
    }
    return parts;
  }

  std::vector<std::string> parse_header() {
    expect('[');
    if (peek() == '[') fail("arrays of tables are not supported");
    skip_space();
    auto key = parse_key();
    expect(']');
    end_of_line();
    return key;
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated string");
        const char e = get();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') break;
      out += c;
    }
    return out;
  }

  ojson parse_array() {
    expect('[');
    ojson arr = ojson::array();
    skip_all();
    while (peek() != ']') {
      if (eof()) fail("unterminated array");
      arr.push_back(parse_value());
      skip_all();
      if (peek() == ',') {
        get();
        skip_all();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    get();
    return arr;
  }

  ojson parse_scalar_token() {
    std::string tok;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
           peek() != '#')
      tok += get();
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char c : tok)
      if (c != '_') clean += c;
    const bool is_float = clean.find_first_of(".eE") != std::string::npos || clean == "inf" ||
                          clean == "+inf" || clean == "-inf" || clean == "nan";
    if (!is_float) {
      long long v = 0;
      const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
      const auto [p, ec] = std::from_chars(b, clean.data() + clean.size(), v);
      if (ec == std::errc() && p == clean.data() + clean.size()) return v;
      fail("invalid value '" + tok + "'");
    }
    std::istringstream in(clean);
    in.imbue(std::locale::classic());
    double d = 0.0;
    in >> d;
    if (in.fail() || !in.eof()) fail("invalid number '" + tok + "'");
    return d;
  }

  ojson parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");
    return parse_scalar_token();
  }
};

}  // namespace

TomlDocument parse_toml(const std::string& text) { return Parser(text).run(); }

std::string toml_value(const ojson& v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
  if (v.is_string()) {
    out << '"';
    for (char c : v.get<std::string>()) {
      if (c == '"' || c == '\\') out << '\\';
      out << c;
    }
    out << '"';
  } else if (v.is_boolean()) {
    out << (v.get<bool>() ? "true" : "false");
  } else if (v.is_number_integer()) {
    out << v.get<long long>();
  } else if (v.is_number()) {
    const double d = v.get<double>();
    out << d;
    const std::string s = out.str();
    if (s.find_first_of(".eEn") == std::string::npos) out << ".0";
  } else if (v.is_array()) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << toml_value(v[i]);
    out << ']';
  } else {
    throw ConfigError("cannot serialize value as TOML");
  }
  return out.str();
}

}  // namespace sgi::cli
