#include "oip/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "oip/errors.hpp"

namespace oip {

namespace {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : text_(text) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;
    skip_void();
    while (!eof()) {
      if (peek() == '[')
        current = parse_header(root);
      else
        parse_keyval(*current);
      skip_void();
    }
    return root;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& msg) {
    throw ConfigError("toml parse error at line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  // whitespace, newlines, and comments between statements
  void skip_void() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_ws();
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
    if (!eof() && peek() == '\r') take();
    if (!eof() && peek() != '\n') fail("unexpected trailing content");
  }

  std::string parse_key_part() {
    skip_inline_ws();
    if (eof()) fail("expected key");
    if (peek() == '"' || peek() == '\'') return parse_string();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-'))
      key += take();
    if (key.empty()) fail("expected key");
    return key;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> parts{parse_key_part()};
    skip_inline_ws();
    while (!eof() && peek() == '.') {
      take();
      parts.push_back(parse_key_part());
      skip_inline_ws();
    }
    return parts;
  }

  // Walks to (creating as needed) the table at `path`; array-of-table
  // elements resolve to their last entry.
  nlohmann::json* navigate(nlohmann::json* node, const std::vector<std::string>& path,
                           size_t upto) {
    for (size_t i = 0; i < upto; ++i) {
      nlohmann::json& slot = (*node)[path[i]];
      if (slot.is_null()) slot = nlohmann::json::object();
      if (slot.is_array()) {
        if (slot.empty()) fail("empty table array at '" + path[i] + "'");
        node = &slot.back();
      } else if (slot.is_object()) {
        node = &slot;
      } else {
        fail("key '" + path[i] + "' is not a table");
      }
    }
    return node;
  }

  nlohmann::json* parse_header(nlohmann::json& root) {
    take();  // '['
    const bool array_table = !eof() && peek() == '[';
    if (array_table) take();
    const auto path = parse_key_path();
    skip_inline_ws();
    if (eof() || take() != ']') fail("expected ']' in table header");
    if (array_table && (eof() || take() != ']')) fail("expected ']]' in table array header");
    expect_line_end();

    nlohmann::json* parent = navigate(&root, path, path.size() - 1);
    nlohmann::json& slot = (*parent)[path.back()];
    if (array_table) {
      if (slot.is_null()) slot = nlohmann::json::array();
      if (!slot.is_array()) fail("'" + path.back() + "' is not a table array");
      slot.push_back(nlohmann::json::object());
      return &slot.back();
    }
    if (slot.is_null()) slot = nlohmann::json::object();
    if (slot.is_array()) return &slot.back();
    if (!slot.is_object()) fail("'" + path.back() + "' is not a table");
    return &slot;
  }

  void parse_keyval(nlohmann::json& table) {
    const auto path = parse_key_path();
    skip_inline_ws();
    if (eof() || take() != '=') fail("expected '=' after key");
    skip_inline_ws();
    nlohmann::json value = parse_value();
    expect_line_end();
    nlohmann::json* parent = navigate(&table, path, path.size() - 1);
    if (parent->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*parent)[path.back()] = std::move(value);
  }

  std::string parse_string() {
    const char quote = take();
    std::string out;
    while (true) {
      if (eof()) fail("unterminated string");
      char c = take();
      if (c == quote) break;
      if (c == '\n') fail("newline in string");
      if (quote == '"' && c == '\\') {
        if (eof()) fail("dangling escape");
        const char esc = take();
        switch (esc) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'u': {
            std::string hex;
            for (int i = 0; i < 4; ++i) {
              if (eof()) fail("bad \\u escape");
              hex += take();
            }
            const unsigned code = unsigned(std::stoul(hex, nullptr, 16));
            // UTF-8 encode (BMP only)
            if (code < 0x80) {
              out += char(code);
            } else if (code < 0x800) {
              out += char(0xC0 | (code >> 6));
              out += char(0x80 | (code & 0x3F));
            } else {
              out += char(0xE0 | (code >> 12));
              out += char(0x80 | ((code >> 6) & 0x3F));
              out += char(0x80 | (code & 0x3F));
            }
            break;
          }
          default:
            fail(std::string("unsupported escape \\") + esc);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  nlohmann::json parse_value() {
    if (eof()) fail("expected value");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') {
      take();
      nlohmann::json arr = nlohmann::json::array();
      while (true) {
        skip_void();
        if (eof()) fail("unterminated array");
        if (peek() == ']') {
          take();
          break;
        }
        arr.push_back(parse_value());
        skip_void();
        if (!eof() && peek() == ',') take();
      }
      return arr;
    }
    if (c == '{') {
      take();
      nlohmann::json obj = nlohmann::json::object();
      skip_inline_ws();
      if (!eof() && peek() == '}') {
        take();
        return obj;
      }
      while (true) {
        const auto path = parse_key_path();
        skip_inline_ws();
        if (eof() || take() != '=') fail("expected '=' in inline table");
        skip_inline_ws();
        nlohmann::json value = parse_value();
        nlohmann::json* parent = navigate(&obj, path, path.size() - 1);
        (*parent)[path.back()] = std::move(value);
        skip_inline_ws();
        if (eof()) fail("unterminated inline table");
        const char d = take();
        if (d == '}') break;
        if (d != ',') fail("expected ',' or '}' in inline table");
        skip_inline_ws();
      }
      return obj;
    }
    // bare token: bool or number
    std::string tok;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#' &&
           peek() != '\n' && peek() != '\r' && peek() != ' ' && peek() != '\t')
      tok += take();
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char d : tok)
      if (d != '_') digits += d;
    try {
      if (digits.find_first_of(".eE") != std::string::npos ||
          digits == "inf" || digits == "-inf" || digits == "nan") {
        size_t used = 0;
        const double v = std::stod(digits, &used);
        if (used != digits.size()) fail("bad number '" + tok + "'");
        return v;
      }
      size_t used = 0;
      const long long v = std::stoll(digits, &used, 10);
      if (used != digits.size()) fail("bad number '" + tok + "'");
      return v;
    } catch (const std::exception&) {
      fail("bad value '" + tok + "'");
    }
  }
};

}  // namespace

nlohmann::json parse_toml(const std::string& text) { return TomlParser(text).parse(); }

nlohmann::json load_toml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

}  // namespace oip
