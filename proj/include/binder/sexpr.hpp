#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binder/error.hpp"

namespace binder::sexpr {

/// A parsed s-expression: either an atom or a parenthesised list.
struct Node {
  bool is_list = false;
  std::string atom;
  std::vector<Node> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view s) const { return !is_list && atom == s; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line, column); }

  const std::string& expect_atom() const {
    if (is_list) fail("expected an atom");
    return atom;
  }

  const std::vector<Node>& expect_list() const {
    if (!is_list) fail("expected a list, got '" + atom + "'");
    return items;
  }

  std::size_t expect_nat() const {
    const std::string& s = expect_atom();
    if (!s.empty() && s.front() == '-') fail("expected a natural number, got '" + s + "'");
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      fail("expected a natural number, got '" + s + "'");
    return value;
  }
};

namespace detail {

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Node> read_all() {
    std::vector<Node> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read_node());
      skip_space();
    }
    return out;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Node read_node() {
    Node node;
    node.line = line_;
    node.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      node.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unterminated list", node.line, node.column);
        if (text_[pos_] == ')') {
          advance();
          return node;
        }
        node.items.push_back(read_node());
      }
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      node.atom.push_back(d);
      advance();
    }
    return node;
  }
};

}  // namespace detail

/// Reads every top-level expression in `text`.
inline std::vector<Node> read_all(std::string_view text) { return detail::Reader(text).read_all(); }

/// Reads exactly one top-level expression.
inline Node read_one(std::string_view text) {
  auto nodes = read_all(text);
  if (nodes.empty()) throw ParseError("empty input", 1, 1);
  if (nodes.size() > 1) throw ParseError("trailing input after expression", nodes[1].line, nodes[1].column);
  return std::move(nodes.front());
}

}  // namespace binder::sexpr
