#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binder/error.hpp"
#include "binder/sexpr.hpp"
#include "binder/signature.hpp"

namespace binder {

/// Immutable de Bruijn syntax tree. Index 0 refers to the innermost binder.
///
/// Operator nodes record how many variables each argument binds, so the tree
/// can be traversed without consulting its signature. Copies share structure.
class Term {
public:
  static Term var(std::size_t index) {
    static const std::vector<Term> small = [] {
      std::vector<Term> out;
      for (std::size_t i = 0; i < kCachedVars; ++i) out.push_back(make_var(i));
      return out;
    }();
    return index < kCachedVars ? small[index] : make_var(index);
  }

  static Term op(std::string label, std::vector<Term> args, std::vector<std::size_t> binders) {
    if (args.size() != binders.size())
      throw ScopeError("operator '" + label + "' given " + std::to_string(args.size()) +
                       " arguments but " + std::to_string(binders.size()) + " binder counts");
    return make_op(std::make_shared<const Head>(Head{std::move(label), std::move(binders)}), std::move(args));
  }

  /// Same operator and binder counts, new arguments.
  Term with_args(std::vector<Term> args) const {
    if (is_var() || args.size() != node_->args.size())
      throw ScopeError("with_args: argument count mismatch");
    return make_op(node_->head, std::move(args));
  }

  bool is_var() const { return node_->is_var; }
  bool is_op() const { return !node_->is_var; }
  std::size_t index() const { return node_->index; }
  const std::string& label() const { return node_->head->label; }
  const std::vector<Term>& args() const { return node_->args; }
  const std::vector<std::size_t>& binders() const { return node_->head->binders; }

  /// Number of variable and operator nodes.
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.is_var != y.is_var || x.size != y.size) return false;
    if (x.is_var) return x.index == y.index;
    if (x.head != y.head && (x.head->label != y.head->label || x.head->binders != y.head->binders)) return false;
    return x.args == y.args;
  }

private:
  static constexpr std::size_t kCachedVars = 64;

  // Label and binder counts, shared by every rebuild of a node.
  struct Head {
    std::string label;
    std::vector<std::size_t> binders;
  };

  struct Node {
    bool is_var = false;
    std::size_t index = 0;
    std::shared_ptr<const Head> head;
    std::vector<Term> args;
    std::size_t size = 1;
  };

  static Term make_var(std::size_t index) {
    static const auto no_head = std::make_shared<const Head>();
    auto node = std::make_shared<Node>();
    node->is_var = true;
    node->index = index;
    node->head = no_head;
    return Term(std::move(node));
  }

  static Term make_op(std::shared_ptr<const Head> head, std::vector<Term> args) {
    auto node = std::make_shared<Node>();
    node->head = std::move(head);
    for (const auto& a : args) node->size += a.size();
    node->args = std::move(args);
    return Term(std::move(node));
  }

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Canonical s-expression: `(var i)` or `(label arg ...)`.
inline void print_term(std::string& out, const Term& t) {
  if (t.is_var()) {
    out += "(var ";
    out += std::to_string(t.index());
    out += ')';
    return;
  }
  out += '(';
  out += t.label();
  for (const auto& a : t.args()) {
    out += ' ';
    print_term(out, a);
  }
  out += ')';
}

inline std::string print_term(const Term& t) {
  std::string out;
  print_term(out, t);
  return out;
}

/// Builds a Term from an s-expression, taking binder counts from `sig`.
/// Checks labels and argument counts but not scoping.
inline Term term_from_sexpr(const BindingSignature& sig, const sexpr::Node& node) {
  const auto& items = node.expect_list();
  if (items.empty()) node.fail("empty term");
  const std::string& head = items.front().expect_atom();
  if (head == "var") {
    if (items.size() != 2) node.fail("expected (var <index>)");
    return Term::var(items[1].expect_nat());
  }
  const BindingArity* arity = sig.find(head);
  if (!arity) items.front().fail("unknown label '" + head + "'");
  if (items.size() - 1 != arity->size())
    node.fail("'" + head + "' expects " + std::to_string(arity->size()) + " arguments, got " +
              std::to_string(items.size() - 1));
  std::vector<Term> args;
  args.reserve(arity->size());
  for (std::size_t i = 1; i < items.size(); ++i) args.push_back(term_from_sexpr(sig, items[i]));
  return Term::op(head, std::move(args), arity->binders);
}

inline Term parse_term(const BindingSignature& sig, std::string_view text) {
  return term_from_sexpr(sig, sexpr::read_one(text));
}

namespace detail {

/// Applies `f` to every free index, tracking the number of enclosing binders.
template <class F>
Term map_free(const Term& t, const F& f, std::size_t depth = 0) {
  if (t.is_var()) return t.index() < depth ? t : f(t.index() - depth, depth);
  const auto& old = t.args();
  std::vector<Term> args;
  for (std::size_t j = 0; j < old.size(); ++j) {
    Term a = map_free(old[j], f, depth + t.binders()[j]);
    if (args.empty() && a == old[j]) continue;
    if (args.empty()) {
      args.reserve(old.size());
      args.assign(old.begin(), old.begin() + static_cast<std::ptrdiff_t>(j));
    }
    args.push_back(std::move(a));
  }
  if (args.empty()) return t;
  return t.with_args(std::move(args));
}

/// Free index i becomes i + k.
inline Term shift(const Term& t, std::size_t k) {
  if (k == 0) return t;
  return map_free(t, [k](std::size_t i, std::size_t depth) { return Term::var(i + k + depth); });
}

/// Largest free index plus one; zero for closed trees.
inline std::size_t free_bound(const Term& t, std::size_t depth = 0) {
  if (t.is_var()) return t.index() < depth ? 0 : t.index() - depth + 1;
  std::size_t bound = 0;
  for (std::size_t j = 0; j < t.args().size(); ++j)
    bound = std::max(bound, free_bound(t.args()[j], depth + t.binders()[j]));
  return bound;
}

/// Simultaneous substitution of free index i by `image(i)`, shifted under binders.
template <class Image>
Term subst_tree(const Term& t, const Image& image) {
  return map_free(t, [&](std::size_t i, std::size_t depth) { return shift(image(i), depth); });
}

/// Checks every free index is below `scope` and arities match `sig`.
inline void check_tree(const BindingSignature& sig, const Term& t, std::size_t scope,
                       const std::string& path) {
  if (t.is_var()) {
    if (t.index() >= scope)
      throw ScopeError("index " + std::to_string(t.index()) + " out of scope " +
                       std::to_string(scope) + (path.empty() ? "" : " at " + path));
    return;
  }
  const BindingArity& arity = sig.arity(t.label());
  if (arity.binders != t.binders())
    throw ScopeError("operator '" + t.label() + "' does not match its arity in the signature");
  for (std::size_t j = 0; j < t.args().size(); ++j)
    check_tree(sig, t.args()[j], scope + arity.binders[j],
               path.empty() ? std::to_string(j) : path + "." + std::to_string(j));
}

}  // namespace detail

/// A term together with the number of free-variable slots it lives in.
struct ScopedTerm {
  Term tree;
  std::size_t scope = 0;

  friend bool operator==(const ScopedTerm&, const ScopedTerm&) = default;
};

inline std::string print_term(const ScopedTerm& t) { return print_term(t.tree); }

/// Validates `tree` at `scope` against `sig`; throws ScopeError or SignatureError.
inline ScopedTerm make_scoped(const BindingSignature& sig, Term tree, std::size_t scope) {
  detail::check_tree(sig, tree, scope, "");
  return ScopedTerm{std::move(tree), scope};
}

inline ScopedTerm parse_scoped(const BindingSignature& sig, std::string_view text, std::size_t scope) {
  return make_scoped(sig, parse_term(sig, text), scope);
}

inline ScopedTerm mk_var(std::size_t i, std::size_t scope) {
  if (i >= scope)
    throw ScopeError("index " + std::to_string(i) + " out of scope " + std::to_string(scope));
  return {Term::var(i), scope};
}

inline ScopedTerm mk_op(const BindingSignature& sig, const std::string& label,
                        std::span<const ScopedTerm> args, std::size_t scope) {
  const BindingArity& arity = sig.arity(label);
  if (args.size() != arity.size())
    throw ScopeError("'" + label + "' expects " + std::to_string(arity.size()) + " arguments, got " +
                     std::to_string(args.size()));
  std::vector<Term> trees;
  trees.reserve(args.size());
  for (std::size_t j = 0; j < args.size(); ++j) {
    if (args[j].scope != scope + arity.binders[j])
      throw ScopeError("argument " + std::to_string(j) + " of '" + label + "' must have scope " +
                       std::to_string(scope + arity.binders[j]) + ", has " +
                       std::to_string(args[j].scope));
    trees.push_back(args[j].tree);
  }
  return {Term::op(label, std::move(trees), arity.binders), scope};
}

inline ScopedTerm mk_op(const BindingSignature& sig, const std::string& label,
                        std::initializer_list<ScopedTerm> args, std::size_t scope) {
  return mk_op(sig, label, std::span<const ScopedTerm>(args.begin(), args.size()), scope);
}

/// Renames free variable i to `renaming[i]`, landing in `target_scope`.
inline ScopedTerm rename(const ScopedTerm& t, std::span<const std::size_t> renaming,
                         std::size_t target_scope) {
  if (renaming.size() != t.scope)
    throw ScopeError("renaming has length " + std::to_string(renaming.size()) + " but term scope is " +
                     std::to_string(t.scope));
  for (auto r : renaming)
    if (r >= target_scope)
      throw ScopeError("renaming entry " + std::to_string(r) + " out of target scope " +
                       std::to_string(target_scope));
  Term tree = detail::map_free(t.tree, [&](std::size_t i, std::size_t depth) {
    return Term::var(renaming[i] + depth);
  });
  return {std::move(tree), target_scope};
}

/// Widens the scope by `k` without touching any index.
inline ScopedTerm weaken(const ScopedTerm& t, std::size_t k) { return {t.tree, t.scope + k}; }

/// A substitution from scope `entries.size()` into scope `target`.
struct Subst {
  std::vector<Term> entries;
  std::size_t target = 0;

  std::size_t source() const { return entries.size(); }
  friend bool operator==(const Subst&, const Subst&) = default;
};

/// Builds a substitution from scoped entries, which must all share `target`.
inline Subst make_subst(std::span<const ScopedTerm> entries, std::size_t target) {
  Subst s{{}, target};
  s.entries.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.scope != target)
      throw ScopeError("substitution entry at scope " + std::to_string(e.scope) +
                       " but target scope is " + std::to_string(target));
    s.entries.push_back(e.tree);
  }
  return s;
}

inline Subst make_subst(std::initializer_list<ScopedTerm> entries, std::size_t target) {
  return make_subst(std::span<const ScopedTerm>(entries.begin(), entries.size()), target);
}

inline ScopedTerm subst_entry(const Subst& s, std::size_t i) { return {s.entries.at(i), s.target}; }

inline Subst identity_subst(std::size_t n) {
  Subst s{{}, n};
  s.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.entries.push_back(Term::var(i));
  return s;
}

/// Subst (m+k) -> (n+k): fresh variables 0..k-1 first, then the old entries shifted by k.
inline Subst lift_subst(const Subst& s, std::size_t k) {
  Subst out{{}, s.target + k};
  out.entries.reserve(s.entries.size() + k);
  for (std::size_t i = 0; i < k; ++i) out.entries.push_back(Term::var(i));
  for (const auto& e : s.entries) out.entries.push_back(detail::shift(e, k));
  return out;
}

inline ScopedTerm substitute(const ScopedTerm& t, const Subst& s) {
  if (s.source() != t.scope)
    throw ScopeError("substitution has source scope " + std::to_string(s.source()) +
                     " but term scope is " + std::to_string(t.scope));
  return {detail::subst_tree(t.tree, [&](std::size_t i) -> const Term& { return s.entries[i]; }),
          s.target};
}

/// Entrywise substitute(first[i], second).
inline Subst compose_subst(const Subst& first, const Subst& second) {
  if (first.target != second.source())
    throw ScopeError("cannot compose substitution into scope " + std::to_string(first.target) +
                     " with one from scope " + std::to_string(second.source()));
  Subst out{{}, second.target};
  out.entries.reserve(first.entries.size());
  for (const auto& e : first.entries)
    out.entries.push_back(
        detail::subst_tree(e, [&](std::size_t i) -> const Term& { return second.entries[i]; }));
  return out;
}

/// Substitution sending variable i to `renaming[i]`.
inline Subst renaming_subst(std::span<const std::size_t> renaming, std::size_t target) {
  Subst s{{}, target};
  for (auto r : renaming) {
    if (r >= target) throw ScopeError("renaming entry out of target scope");
    s.entries.push_back(Term::var(r));
  }
  return s;
}

}  // namespace binder
