#pragma once

// Reference implementations used only by the tests. They go through a named
// representation with globally fresh binder names, so they share no code path
// with the de Bruijn operations they check.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "binder/binder.hpp"

namespace oracle {

using binder::BindingSignature;
using binder::Term;

struct Named {
  bool is_var = false;
  std::string name;
  std::string label;
  std::vector<std::vector<std::string>> binders;  // per argument, binders[j][i] is de Bruijn index i
  std::vector<Named> args;
};

class Namer {
public:
  std::string fresh() { return "b" + std::to_string(next_++); }

private:
  std::size_t next_ = 0;
};

/// Free index i at the root is called free_names[i].
inline Named to_named(const Term& t, const std::vector<std::string>& free_names, Namer& namer,
                      std::vector<std::string> stack = {}) {
  Named n;
  if (t.is_var()) {
    n.is_var = true;
    std::size_t i = t.index();
    n.name = i < stack.size() ? stack[stack.size() - 1 - i] : free_names.at(i - stack.size());
    return n;
  }
  n.label = t.label();
  for (std::size_t j = 0; j < t.args().size(); ++j) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < t.binders()[j]; ++k) names.push_back(namer.fresh());
    auto inner = stack;
    // Index 0 is the last element pushed.
    for (std::size_t k = names.size(); k-- > 0;) inner.push_back(names[k]);
    n.binders.push_back(names);
    n.args.push_back(to_named(t.args()[j], free_names, namer, inner));
  }
  return n;
}

/// Inverse of to_named for the given free-name list.
inline Term from_named(const Named& n, const std::vector<std::string>& free_names, std::vector<std::string> stack = {}) {
  if (n.is_var) {
    for (std::size_t i = 0; i < stack.size(); ++i)
      if (stack[stack.size() - 1 - i] == n.name) return Term::var(i);
    auto it = std::find(free_names.begin(), free_names.end(), n.name);
    if (it == free_names.end()) throw std::runtime_error("oracle: free name " + n.name + " not in scope");
    return Term::var(stack.size() + static_cast<std::size_t>(it - free_names.begin()));
  }
  std::vector<Term> args;
  std::vector<std::size_t> counts;
  for (std::size_t j = 0; j < n.args.size(); ++j) {
    auto inner = stack;
    for (std::size_t k = n.binders[j].size(); k-- > 0;) inner.push_back(n.binders[j][k]);
    args.push_back(from_named(n.args[j], free_names, inner));
    counts.push_back(n.binders[j].size());
  }
  return Term::op(n.label, std::move(args), std::move(counts));
}

/// Copy with every binder renamed fresh.
inline Named refresh(const Named& n, Namer& namer, std::map<std::string, std::string> renames = {}) {
  if (n.is_var) {
    Named v = n;
    if (auto it = renames.find(n.name); it != renames.end()) v.name = it->second;
    return v;
  }
  Named out;
  out.label = n.label;
  for (std::size_t j = 0; j < n.args.size(); ++j) {
    auto inner = renames;
    std::vector<std::string> names;
    for (const auto& b : n.binders[j]) {
      names.push_back(namer.fresh());
      inner[b] = names.back();
    }
    out.binders.push_back(names);
    out.args.push_back(refresh(n.args[j], namer, inner));
  }
  return out;
}

inline Named replace_free(const Named& n, const std::map<std::string, Named>& images, Namer& namer) {
  if (n.is_var) {
    if (auto it = images.find(n.name); it != images.end()) return refresh(it->second, namer);
    return n;
  }
  Named out = n;
  for (auto& a : out.args) a = replace_free(a, images, namer);
  return out;
}

inline std::vector<std::string> names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

/// Substitution by named replacement: free x_i becomes image[i] (free in y_*).
inline Term substitute(const Term& t, std::size_t scope, std::span<const Term> image, std::size_t target) {
  Namer namer;
  auto xs = names("x", scope);
  auto ys = names("y", target);
  Named body = to_named(t, xs, namer);
  std::map<std::string, Named> images;
  for (std::size_t i = 0; i < scope; ++i) images[xs[i]] = to_named(image[i], ys, namer);
  return from_named(replace_free(body, images, namer), ys);
}

/// Renaming by relabelling free names.
inline Term rename(const Term& t, std::size_t scope, std::span<const std::size_t> rho, std::size_t target) {
  std::vector<Term> image;
  for (auto r : rho) image.push_back(Term::var(r));
  return substitute(t, scope, image, target);
}

/// Largest raw index anywhere in the tree; bounds every free index.
inline std::size_t raw_index_bound(const Term& t) {
  if (t.is_var()) return t.index() + 1;
  std::size_t b = 0;
  for (const auto& a : t.args()) b = std::max(b, raw_index_bound(a));
  return b;
}

/// Least n such that every shift-at-k (k >= n) and adjacent transposition
/// (j >= n) renaming below a generous bound leaves t unchanged.
inline std::size_t probe_support(const Term& t) {
  std::size_t bound = raw_index_bound(t) + 2;
  auto fixed_by = [&](const std::function<std::size_t(std::size_t)>& f) {
    std::vector<std::size_t> rho;
    for (std::size_t i = 0; i < bound; ++i) rho.push_back(f(i));
    return rename(t, bound, rho, bound + 1) == t;
  };
  for (std::size_t n = 0;; ++n) {
    bool ok = true;
    for (std::size_t k = n; ok && k <= bound; ++k)
      ok = fixed_by([k](std::size_t i) { return i < k ? i : i + 1; });
    for (std::size_t j = n; ok && j + 1 < bound; ++j)
      ok = fixed_by([j](std::size_t i) { return i == j ? j + 1 : i == j + 1 ? j : i; });
    if (ok) return n;
  }
}

/// Every tree of exactly `size` nodes with raw indices below `max_index`,
/// ignoring scope. Independent of the library enumerator.
inline std::vector<Term> all_trees(const BindingSignature& sig, std::size_t size, std::size_t max_index) {
  std::vector<Term> out;
  if (size == 0) return out;
  if (size == 1)
    for (std::size_t i = 0; i < max_index; ++i) out.push_back(Term::var(i));
  for (const auto& e : sig.entries()) {
    std::size_t a = e.arity.size();
    if (a == 0) {
      if (size == 1) out.push_back(Term::op(e.label, {}, {}));
      continue;
    }
    // Distribute size-1 nodes over a arguments.
    std::function<void(std::size_t, std::size_t, std::vector<Term>&)> go = [&](std::size_t j, std::size_t left,
                                                                                 std::vector<Term>& acc) {
      if (j == a) {
        if (left == 0) out.push_back(Term::op(e.label, acc, e.arity.binders));
        return;
      }
      for (std::size_t s = 1; s + (a - j - 1) <= left; ++s)
        for (const auto& t : all_trees(sig, s, max_index)) {
          acc.push_back(t);
          go(j + 1, left - s, acc);
          acc.pop_back();
        }
    };
    std::vector<Term> acc;
    go(0, size - 1, acc);
  }
  return out;
}

inline bool well_scoped(const Term& t, std::size_t scope) {
  if (t.is_var()) return t.index() < scope;
  for (std::size_t j = 0; j < t.args().size(); ++j)
    if (!well_scoped(t.args()[j], scope + t.binders()[j])) return false;
  return true;
}

/// Substitution that forgets to lift under binders: variables past the local
/// binders are replaced by the raw, unshifted entry. Used for mutation tests.
inline binder::Model<binder::ScopedTerm> broken_model(const BindingSignature& sig) {
  auto m = binder::syntax_model(sig);
  m.name = "broken";
  m.subst = [](const binder::ScopedTerm& v, std::span<const binder::ScopedTerm> entries, std::size_t n) {
    std::function<Term(const Term&, std::size_t)> go = [&](const Term& t, std::size_t depth) -> Term {
      if (t.is_var()) return t.index() < depth ? t : entries[t.index() - depth].tree;
      std::vector<Term> args;
      for (std::size_t j = 0; j < t.args().size(); ++j) args.push_back(go(t.args()[j], depth + t.binders()[j]));
      return Term::op(t.label(), std::move(args), t.binders());
    };
    return binder::ScopedTerm{go(v.tree, 0), n};
  };
  m.shift = nullptr;
  return m;
}

/// Type-directed random generator of well-typed terms over any typed
/// signature, using the label instances whose parameters have depth at most
/// `param_depth`.
class TypedGenerator {
public:
  TypedGenerator(binder::TypedSignature sig, std::size_t param_depth) : sig_(std::move(sig)) {
    for (const auto& l : sig_.instances(param_depth)) labels_.emplace_back(l, sig_.arity_of(l));
  }

  const binder::TypedSignature& signature() const { return sig_; }

  /// A term of type `type` in `ctx` with at most `budget` nodes, if one is found.
  std::optional<binder::TypedTree> term(const binder::Context& ctx, const binder::TypeExpr& type, std::size_t budget,
                                        binder::Rng& rng, std::size_t attempts = 20) const {
    for (std::size_t a = 0; a < attempts; ++a)
      if (auto t = once(ctx, type, budget, rng)) return t;
    return std::nullopt;
  }

  /// Random well-typed substitution from `source` into `target`.
  std::optional<binder::TypedSubst> subst(const binder::Context& source, const binder::Context& target,
                                          std::size_t budget, binder::Rng& rng) const {
    binder::TypedSubst s{{}, target};
    for (const auto& ty : source) {
      auto e = term(target, ty, budget, rng);
      if (!e) return std::nullopt;
      s.entries.push_back(*e);
    }
    return s;
  }

  /// Random context of the given length over types of depth at most `depth`.
  binder::Context context(std::size_t length, std::size_t depth, binder::Rng& rng) const {
    auto types = sig_.types().enumerate(depth);
    binder::Context ctx;
    for (std::size_t i = 0; i < length; ++i) ctx.push_back(types[binder::random_below(rng, types.size())]);
    return ctx;
  }

private:
  std::optional<binder::TypedTree> once(const binder::Context& ctx, const binder::TypeExpr& type, std::size_t budget,
                                        binder::Rng& rng) const {
    if (budget == 0) return std::nullopt;
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < ctx.size(); ++i)
      if (ctx[i] == type) vars.push_back(i);
    std::vector<std::size_t> ops;
    for (std::size_t k = 0; k < labels_.size(); ++k)
      if (labels_[k].second.result == type && labels_[k].second.args.size() < budget) ops.push_back(k);
    std::size_t total = vars.size() + ops.size();
    if (total == 0) return std::nullopt;
    std::size_t pick = binder::random_below(rng, total);
    if (pick < vars.size()) return binder::TypedTree::var(vars[pick]);
    const auto& [label, arity] = labels_[ops[pick - vars.size()]];
    std::size_t left = budget - 1;
    std::vector<binder::TypedTree> args;
    for (std::size_t j = 0; j < arity.args.size(); ++j) {
      std::size_t rest = arity.args.size() - j - 1;
      std::size_t share = j + 1 == arity.args.size() ? left : 1 + binder::random_below(rng, left - rest);
      binder::Context inner = arity.args[j].bound;
      inner.insert(inner.end(), ctx.begin(), ctx.end());
      auto a = once(inner, arity.args[j].type, share, rng);
      if (!a) return std::nullopt;
      left -= a->size();
      args.push_back(*a);
    }
    return binder::TypedTree::op(label, std::move(args));
  }

  binder::TypedSignature sig_;
  std::vector<std::pair<binder::Label, binder::TypedArity>> labels_;
};

/// PCF retyped along the erasure to `star`.
inline binder::TypedSignature erased_pcf() { return binder::retype_signature(binder::pcf_erasure(), binder::pcf_signature()); }

}  // namespace oracle
