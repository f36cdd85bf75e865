#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binder/error.hpp"
#include "binder/sexpr.hpp"

namespace binder {

/// Binder counts per constructor argument. `{0, 0}` is a binary operation,
/// `{1}` a unary operation binding one variable, `{}` a constant.
struct BindingArity {
  std::vector<std::size_t> binders;

  std::size_t size() const { return binders.size(); }
  friend bool operator==(const BindingArity&, const BindingArity&) = default;
};

/// An untyped language with binders: labelled arities in declaration order.
class BindingSignature {
public:
  struct Entry {
    std::string label;
    BindingArity arity;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  BindingSignature() = default;

  BindingSignature(std::initializer_list<std::pair<std::string, std::vector<std::size_t>>> entries) {
    for (const auto& [label, binders] : entries) add(label, BindingArity{binders});
  }

  /// Appends a constructor. Throws SignatureError on a duplicate label.
  void add(std::string label, BindingArity arity) {
    if (label == "var") throw SignatureError("'var' is reserved for variables");
    if (contains(label)) throw SignatureError("duplicate label '" + label + "'");
    entries_.push_back({std::move(label), std::move(arity)});
  }

  bool contains(std::string_view label) const { return find(label) != nullptr; }

  const BindingArity* find(std::string_view label) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const Entry& e) { return e.label == label; });
    return it == entries_.end() ? nullptr : &it->arity;
  }

  const BindingArity& arity(std::string_view label) const {
    if (const auto* a = find(label)) return *a;
    throw SignatureError("unknown label '" + std::string(label) + "'");
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const BindingSignature&, const BindingSignature&) = default;

private:
  std::vector<Entry> entries_;
};

/// Parses `(sig (<label> <n1> <n2> ...) ...)`.
inline BindingSignature parse_signature(std::string_view text) {
  sexpr::Node root = sexpr::read_one(text);
  const auto& items = root.expect_list();
  if (items.empty() || !items.front().is_atom("sig")) root.fail("expected (sig ...)");
  BindingSignature sig;
  for (std::size_t i = 1; i < items.size(); ++i) {
    const auto& decl = items[i].expect_list();
    if (decl.empty()) items[i].fail("empty constructor declaration");
    const std::string& label = decl.front().expect_atom();
    if (sig.contains(label)) decl.front().fail("duplicate label '" + label + "'");
    if (label == "var") decl.front().fail("'var' is reserved for variables");
    BindingArity arity;
    for (std::size_t j = 1; j < decl.size(); ++j) {
      if (decl[j].is_atom() && !decl[j].atom.empty() && decl[j].atom.front() == '-')
        decl[j].fail("negative binder count '" + decl[j].atom + "'");
      arity.binders.push_back(decl[j].expect_nat());
    }
    sig.add(label, std::move(arity));
  }
  return sig;
}

inline std::string print_signature(const BindingSignature& sig) {
  std::ostringstream out;
  out << "(sig";
  for (const auto& e : sig.entries()) {
    out << " (" << e.label;
    for (auto n : e.arity.binders) out << ' ' << n;
    out << ')';
  }
  out << ")\n";
  return out.str();
}

/// The untyped lambda calculus: application `[0, 0]` and abstraction `[1]`.
inline BindingSignature lc_signature() { return {{"app", {0, 0}}, {"abs", {1}}}; }

}  // namespace binder
