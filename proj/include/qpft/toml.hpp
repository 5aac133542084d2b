// Copyright 2026 The qpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Minimal reader for the TOML subset used by experiment configs: comments,
// [table] and [a.b] headers, bare or quoted keys, strings, integers, floats,
// booleans, (nested, multi-line) arrays and inline tables.

#include <cctype>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpft/linalg.hpp"

namespace qpft::config {

using json = nlohmann::json;

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parsed document plus the line where every dotted key was defined.
struct Document {
  json root = json::object();
  std::map<std::string, int> lines;

  int line_of(const std::string& path) const {
    auto it = lines.find(path);
    return it == lines.end() ? 0 : it->second;
  }
};

namespace detail {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Document parse() {
    json* table = &doc_.root;
    std::string prefix;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_ws();
        const std::vector<std::string> path = parse_key_path();
        skip_inline_ws();
        expect(']');
        end_of_line();
        table = &doc_.root;
        prefix.clear();
        for (const auto& part : path) {
          if (!table->contains(part)) (*table)[part] = json::object();
          table = &(*table)[part];
          if (!table->is_object()) fail("'" + part + "' is not a table");
          prefix += (prefix.empty() ? "" : ".") + part;
        }
        doc_.lines.emplace(prefix, line_);
        continue;
      }
      const int key_line = line_;
      const std::vector<std::string> path = parse_key_path();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      json value = parse_value();
      end_of_line();
      json* target = table;
      std::string full = prefix;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!target->contains(path[i])) (*target)[path[i]] = json::object();
        target = &(*target)[path[i]];
        full += (full.empty() ? "" : ".") + path[i];
      }
      full += (full.empty() ? "" : ".") + path.back();
      if (target->contains(path.back()))
        throw ParseError(key_line, "duplicate key '" + full + "'");
      (*target)[path.back()] = std::move(value);
      doc_.lines[full] = key_line;
    }
    return std::move(doc_);
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        newline();
      else
        break;
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_ws() {
    while (!eof()) {
      skip_inline_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        newline();
      else
        break;
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (!eof() && peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    newline();
  }

  std::string parse_key() {
    if (peek() == '"') return parse_string();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-'))
      key += text_[pos_++];
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_inline_ws();
    while (peek() == '.') {
      ++pos_;
      skip_inline_ws();
      path.push_back(parse_key());
      skip_inline_ws();
    }
    return path;
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    std::string word;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
                      peek() == '+' || peek() == '-' || peek() == '_'))
      word += text_[pos_++];
    if (word.empty()) fail("expected a value");
    if (word == "true") return true;
    if (word == "false") return false;
    if (word == "inf" || word == "+inf") return std::numeric_limits<double>::infinity();
    std::string digits;
    for (char ch : word)
      if (ch != '_') digits += ch;
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      } else {
        const long long v = std::stoll(digits, &used);
        if (used == digits.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + word + "'");
  }

  json parse_array() {
    expect('[');
    json arr = json::array();
    skip_array_ws();
    if (peek() == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      skip_array_ws();
      arr.push_back(parse_value());
      skip_array_ws();
      if (peek() == ',') {
        ++pos_;
        skip_array_ws();
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  json parse_inline_table() {
    expect('{');
    json obj = json::object();
    skip_inline_ws();
    if (peek() == '}') {
      ++pos_;
      return obj;
    }
    while (true) {
      skip_inline_ws();
      const std::string key = parse_key();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      if (obj.contains(key)) fail("duplicate key '" + key + "'");
      obj[key] = parse_value();
      skip_inline_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return obj;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  Document doc_;
};

}  // namespace detail

inline Document parse(const std::string& text) { return detail::Parser(text).parse(); }

}  // namespace qpft::config
