#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "binder/enumerate.hpp"
#include "binder/error.hpp"
#include "binder/law_report.hpp"
#include "binder/signature.hpp"
#include "binder/term.hpp"

namespace binder {

/// A model of a binding signature: a scope-indexed family of values with
/// interpretations of variables, constructors and simultaneous substitution.
///
/// The interpretation functions must be pure. `op` receives argument j at
/// scope `scope + binders[j]`; `subst` receives one value per source variable,
/// all at `target`. The optional members fall back to derived definitions:
///   - `shift(v, n, k)` moves v from scope n to n+k sending i to i+k; by default
///     it substitutes `var(k + i, n + k)` for each i.
///   - `rename(v, rho, n)` defaults to substituting `var(rho[i], n)`.
///   - `equal` defaults to `operator==`, `show` to a placeholder.
template <class V>
struct Model {
  using Value = V;

  std::string name;
  std::function<V(std::size_t index, std::size_t scope)> var;
  std::function<V(const std::string& label, std::span<const V> args, std::size_t scope)> op;
  std::function<V(const V& value, std::span<const V> entries, std::size_t target)> subst;

  std::function<V(const V& value, std::size_t scope, std::size_t k)> shift;
  std::function<V(const V& value, std::span<const std::size_t> renaming, std::size_t target)> rename;
  std::function<bool(const V&, const V&)> equal;
  std::function<std::string(const V&)> show;
};

template <class V>
bool model_equal(const Model<V>& m, const V& a, const V& b) {
  if (m.equal) return m.equal(a, b);
  if constexpr (std::equality_comparable<V>)
    return a == b;
  else
    throw Error("model '" + m.name + "' has no equality");
}

template <class V>
std::string model_show(const Model<V>& m, const V& v) {
  return m.show ? m.show(v) : std::string("<value>");
}

template <class V>
V model_shift(const Model<V>& m, const V& v, std::size_t scope, std::size_t k) {
  if (m.shift) return m.shift(v, scope, k);
  std::vector<V> entries;
  entries.reserve(scope);
  for (std::size_t i = 0; i < scope; ++i) entries.push_back(m.var(k + i, scope + k));
  return m.subst(v, entries, scope + k);
}

template <class V>
V model_rename(const Model<V>& m, const V& v, std::span<const std::size_t> renaming, std::size_t target) {
  if (m.rename) return m.rename(v, renaming, target);
  std::vector<V> entries;
  entries.reserve(renaming.size());
  for (auto r : renaming) entries.push_back(m.var(r, target));
  return m.subst(v, entries, target);
}

/// Lifts a model-level substitution under k binders (fresh variables first).
template <class V>
std::vector<V> model_lift(const Model<V>& m, std::span<const V> entries, std::size_t target, std::size_t k) {
  std::vector<V> out;
  out.reserve(entries.size() + k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(m.var(i, target + k));
  for (const auto& e : entries) out.push_back(model_shift(m, e, target, k));
  return out;
}

/// The unique model morphism out of the syntax.
template <class V>
V fold(const Model<V>& m, const Term& t, std::size_t scope) {
  if (t.is_var()) return m.var(t.index(), scope);
  std::vector<V> args;
  args.reserve(t.args().size());
  for (std::size_t j = 0; j < t.args().size(); ++j) args.push_back(fold(m, t.args()[j], scope + t.binders()[j]));
  return m.op(t.label(), args, scope);
}

template <class V>
V fold(const Model<V>& m, const ScopedTerm& t) {
  return fold(m, t.tree, t.scope);
}

template <class V>
std::vector<V> fold_subst(const Model<V>& m, const Subst& s) {
  std::vector<V> out;
  out.reserve(s.source());
  for (const auto& e : s.entries) out.push_back(fold(m, e, s.target));
  return out;
}

inline std::string show_scoped(const ScopedTerm& t) { return print_term(t.tree) + " @" + std::to_string(t.scope); }

/// The syntax viewed as a model of itself.
inline Model<ScopedTerm> syntax_model(const BindingSignature& sig) {
  Model<ScopedTerm> m;
  m.name = "syntax";
  m.var = [](std::size_t i, std::size_t n) { return mk_var(i, n); };
  m.op = [sig](const std::string& label, std::span<const ScopedTerm> args, std::size_t n) {
    return mk_op(sig, label, args, n);
  };
  m.subst = [](const ScopedTerm& v, std::span<const ScopedTerm> entries, std::size_t n) {
    return substitute(v, make_subst(entries, n));
  };
  m.shift = [](const ScopedTerm& v, std::size_t n, std::size_t k) {
    return ScopedTerm{detail::shift(v.tree, k), n + k};
  };
  m.rename = [](const ScopedTerm& v, std::span<const std::size_t> rho, std::size_t n) { return rename(v, rho, n); };
  m.show = show_scoped;
  return m;
}

/// Syntax with the two arguments of every `app` exchanged. Requires `app`
/// to be a binary operator without binders.
inline Model<ScopedTerm> swap_model(const BindingSignature& sig) {
  if (const auto* a = sig.find("app"); !a || a->binders != std::vector<std::size_t>{0, 0})
    throw SignatureError("swap model needs a binder-free binary 'app'");
  Model<ScopedTerm> m = syntax_model(sig);
  m.name = "swap";
  m.op = [sig](const std::string& label, std::span<const ScopedTerm> args, std::size_t n) {
    if (label == "app" && args.size() == 2) {
      ScopedTerm swapped[] = {args[1], args[0]};
      return mk_op(sig, label, swapped, n);
    }
    return mk_op(sig, label, args, n);
  };
  return m;
}

/// Exploration bounds for the law harness.
struct LawBounds {
  std::size_t max_scope = 2;     ///< scopes 0..max_scope for terms and substitution targets
  std::size_t term_nodes = 4;    ///< exhaustive terms up to this many nodes
  std::size_t subst_nodes = 2;   ///< exhaustive substitution entries up to this many nodes
  std::size_t samples = 100;     ///< additional random cases per law
  std::size_t random_nodes = 7;  ///< node bound for random terms
  std::uint64_t seed = 42;
};

namespace detail {

/// Runs `body(i, local_report)` for i in [0, count) across threads and merges
/// the partial reports. Failures are ordered by weight then case order, so the
/// result does not depend on scheduling.
template <class Body>
LawReport parallel_cases(std::string law, std::size_t count, const Body& body) {
  std::size_t threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, count / 4));
  std::vector<LawReport> parts(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += threads) body(i, parts[t]);
      });
  }
  LawReport out;
  out.law = std::move(law);
  for (const auto& p : parts) out.merge(p);
  return out;
}

/// Calls f(choice) for every tuple in pool^arity, as index vectors.
template <class F>
void for_each_tuple(std::size_t pool, std::size_t arity, F&& f) {
  std::vector<std::size_t> idx(arity, 0);
  if (arity > 0 && pool == 0) return;
  for (;;) {
    f(idx);
    std::size_t j = arity;
    while (j > 0) {
      --j;
      if (++idx[j] < pool) break;
      idx[j] = 0;
      if (j == 0) return;
    }
    if (arity == 0) return;
  }
}

inline std::string show_subst(const Subst& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    if (i) out += ", ";
    out += print_term(s.entries[i]);
  }
  return out + "] @" + std::to_string(s.target);
}

inline std::size_t subst_weight(const Subst& s) {
  std::size_t w = 0;
  for (const auto& e : s.entries) w += e.size();
  return w;
}

}  // namespace detail

/// Checks a model's monoid and module laws on syntax-generated inputs.
///
/// Model values are obtained by folding enumerated and random syntax into the
/// model, so the laws are exercised on the image of the initial morphism.
template <class V>
class LawHarness {
public:
  LawHarness(Model<V> model, BindingSignature sig, LawBounds bounds)
      : model_(std::move(model)), sig_(std::move(sig)), bounds_(bounds), enumerator_(sig_), sampler_(sig_) {
    for (std::size_t n = 0; n <= bounds_.max_scope; ++n) {
      terms_.push_back(enumerator_.up_to(n, bounds_.term_nodes));
      auto entries = enumerator_.up_to(n, bounds_.subst_nodes);
      std::vector<V> values;
      for (const auto& e : entries) values.push_back(fold(model_, e));
      pool_terms_.push_back(std::move(entries));
      pool_values_.push_back(std::move(values));
    }
  }

  const LawBounds& bounds() const { return bounds_; }

  /// subst(subst(a, s), d) = subst(a, s;d)
  LawReport associativity() {
    struct Case {
      ScopedTerm a;
      Subst s, d;
    };
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> jobs;
    for (std::size_t m = 0; m <= bounds_.max_scope; ++m)
      for (std::size_t n = 0; n <= bounds_.max_scope; ++n)
        for (std::size_t p = 0; p <= bounds_.max_scope; ++p)
          for (std::size_t a = 0; a < terms_[m].size(); ++a) jobs.emplace_back(m, n, p, a);
    std::vector<Case> randoms;
    Rng rng(bounds_.seed ^ 0x1);
    for (std::size_t tries = 0; randoms.size() < bounds_.samples && tries < 100 * bounds_.samples + 100; ++tries) {
      std::size_t m = random_below(rng, bounds_.max_scope + 1), n = random_below(rng, bounds_.max_scope + 1),
                  p = random_below(rng, bounds_.max_scope + 1);
      auto a = sampler_.up_to(m, bounds_.random_nodes, rng);
      auto s = random_subst(m, n, rng);
      auto d = random_subst(n, p, rng);
      if (a && s && d) randoms.push_back({*a, *s, *d});
    }
    // `as` is subst(av, sv), shared by every d.
    auto check = [&](const ScopedTerm& a, const V& av, const V& as, const Subst& s, std::span<const V> sv,
                     const Subst& d, std::span<const V> dv, std::size_t order, LawReport& out) {
      ++out.samples;
      auto describe = [&] {
        return "a=" + show_scoped(a) + " s=" + detail::show_subst(s) + " d=" + detail::show_subst(d);
      };
      try {
        V lhs = model_.subst(as, dv, d.target);
        std::vector<V> composed;
        for (const auto& e : sv) composed.push_back(model_.subst(e, dv, d.target));
        V rhs = model_.subst(av, composed, d.target);
        if (!model_equal(model_, lhs, rhs))
          out.record({describe(), model_show(model_, lhs), model_show(model_, rhs),
                      a.tree.size() + detail::subst_weight(s) + detail::subst_weight(d), order});
      } catch (const std::exception& e) {
        out.record({describe(), std::string("error: ") + e.what(), "-",
                    a.tree.size() + detail::subst_weight(s) + detail::subst_weight(d), order});
      }
    };
    return detail::parallel_cases("subst-associativity", jobs.size() + randoms.size(), [&](std::size_t i,
                                                                                          LawReport& out) {
      if (i >= jobs.size()) {
        const Case& c = randoms[i - jobs.size()];
        V av = fold(model_, c.a);
        auto sv = fold_subst(model_, c.s);
        std::optional<V> as;
        try {
          as = model_.subst(av, sv, c.s.target);
        } catch (const std::exception& e) {
          ++out.samples;
          out.record({"a=" + show_scoped(c.a) + " s=" + detail::show_subst(c.s), std::string("error: ") + e.what(),
                      "-", c.a.tree.size() + detail::subst_weight(c.s), i << 32});
          return;
        }
        check(c.a, av, *as, c.s, sv, c.d, fold_subst(model_, c.d), i << 32, out);
        return;
      }
      auto [m, n, p, ai] = jobs[i];
      const ScopedTerm& a = terms_[m][ai];
      V av = fold(model_, a);
      std::size_t inner = 0;
      detail::for_each_tuple(pool_terms_[n].size(), m, [&](const std::vector<std::size_t>& si) {
        auto [s, sv] = pool_subst(si, n);
        std::optional<V> as;
        try {
          as = model_.subst(av, sv, n);
        } catch (const std::exception& e) {
          ++out.samples;
          out.record({"a=" + show_scoped(a) + " s=" + detail::show_subst(s), std::string("error: ") + e.what(), "-",
                      a.tree.size() + detail::subst_weight(s), (i << 32) | inner++});
          return;
        }
        detail::for_each_tuple(pool_terms_[p].size(), n, [&](const std::vector<std::size_t>& di) {
          auto [d, dv] = pool_subst(di, p);
          check(a, av, *as, s, sv, d, dv, (i << 32) | inner++, out);
        });
      });
    });
  }

  /// subst(var i, s) = s[i]
  LawReport left_unit() {
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t m = 1; m <= bounds_.max_scope; ++m)
      for (std::size_t n = 0; n <= bounds_.max_scope; ++n) jobs.emplace_back(m, n);
    std::vector<Subst> randoms;
    Rng rng(bounds_.seed ^ 0x2);
    for (std::size_t tries = 0; randoms.size() < bounds_.samples && tries < 100 * bounds_.samples + 100; ++tries) {
      std::size_t m = 1 + random_below(rng, bounds_.max_scope + 1), n = random_below(rng, bounds_.max_scope + 1);
      if (auto s = random_subst(m, n, rng)) randoms.push_back(*s);
    }
    auto check = [&](const Subst& s, std::span<const V> sv, std::size_t order, LawReport& out) {
      for (std::size_t i = 0; i < s.source(); ++i) {
        ++out.samples;
        std::string inputs = "i=" + std::to_string(i) + " s=" + detail::show_subst(s);
        try {
          V lhs = model_.subst(model_.var(i, s.source()), sv, s.target);
          if (!model_equal(model_, lhs, sv[i]))
            out.record({inputs, model_show(model_, lhs), model_show(model_, sv[i]), 1 + detail::subst_weight(s),
                        order + i});
        } catch (const std::exception& e) {
          out.record({inputs, std::string("error: ") + e.what(), "-", 1 + detail::subst_weight(s), order + i});
        }
      }
    };
    return detail::parallel_cases("left-unit", jobs.size() + randoms.size(), [&](std::size_t i, LawReport& out) {
      if (i >= jobs.size()) {
        const Subst& s = randoms[i - jobs.size()];
        check(s, fold_subst(model_, s), i << 32, out);
        return;
      }
      auto [m, n] = jobs[i];
      std::size_t inner = 0;
      detail::for_each_tuple(pool_terms_[n].size(), m, [&](const std::vector<std::size_t>& si) {
        auto [s, sv] = pool_subst(si, n);
        check(s, sv, (i << 32) | (inner += 64), out);
      });
    });
  }

  /// subst(a, var) = a
  LawReport right_unit() {
    std::vector<ScopedTerm> cases;
    for (const auto& level : terms_) cases.insert(cases.end(), level.begin(), level.end());
    std::size_t exhaustive = cases.size();
    Rng rng(bounds_.seed ^ 0x3);
    for (std::size_t tries = 0; cases.size() < exhaustive + bounds_.samples && tries < 100 * bounds_.samples + 100;
         ++tries)
      if (auto a = sampler_.up_to(random_below(rng, bounds_.max_scope + 1), bounds_.random_nodes, rng))
        cases.push_back(*a);
    return detail::parallel_cases("right-unit", cases.size(), [&](std::size_t i, LawReport& out) {
      const ScopedTerm& a = cases[i];
      ++out.samples;
      try {
        V av = fold(model_, a);
        std::vector<V> ids;
        for (std::size_t k = 0; k < a.scope; ++k) ids.push_back(model_.var(k, a.scope));
        V lhs = model_.subst(av, ids, a.scope);
        if (!model_equal(model_, lhs, av))
          out.record({"a=" + show_scoped(a), model_show(model_, lhs), model_show(model_, av), a.tree.size(), i});
      } catch (const std::exception& e) {
        out.record({"a=" + show_scoped(a), std::string("error: ") + e.what(), "-", a.tree.size(), i});
      }
    });
  }

  /// subst(op(l, args), s) = op(l, [subst(arg_j, lift(s, k_j))])
  LawReport compatibility() {
    struct Case {
      ScopedTerm a;  // an operator node
      Subst s;
    };
    std::vector<std::pair<std::size_t, std::size_t>> jobs;  // (m, n) per operator term index
    std::vector<const ScopedTerm*> ops;
    for (std::size_t m = 0; m <= bounds_.max_scope; ++m)
      for (const auto& a : terms_[m])
        if (a.tree.is_op())
          for (std::size_t n = 0; n <= bounds_.max_scope; ++n) {
            jobs.emplace_back(m, n);
            ops.push_back(&a);
          }
    std::vector<Case> randoms;
    Rng rng(bounds_.seed ^ 0x4);
    for (std::size_t tries = 0; randoms.size() < bounds_.samples && tries < 100 * bounds_.samples + 100; ++tries) {
      std::size_t m = random_below(rng, bounds_.max_scope + 1), n = random_below(rng, bounds_.max_scope + 1);
      auto a = sampler_.up_to(m, bounds_.random_nodes, rng);
      auto s = random_subst(m, n, rng);
      if (a && s && a->tree.is_op()) randoms.push_back({*a, *s});
    }
    auto check = [&](const ScopedTerm& a, const Subst& s, std::span<const V> sv, std::size_t order,
                     LawReport& out) {
      ++out.samples;
      std::string inputs = "a=" + show_scoped(a) + " s=" + detail::show_subst(s);
      std::size_t weight = a.tree.size() + detail::subst_weight(s);
      try {
        const Term& t = a.tree;
        std::vector<V> args;
        for (std::size_t j = 0; j < t.args().size(); ++j) args.push_back(fold(model_, t.args()[j], a.scope + t.binders()[j]));
        V lhs = model_.subst(model_.op(t.label(), args, a.scope), sv, s.target);
        std::vector<V> moved;
        for (std::size_t j = 0; j < args.size(); ++j) {
          std::size_t k = t.binders()[j];
          moved.push_back(model_.subst(args[j], model_lift(model_, sv, s.target, k), s.target + k));
        }
        V rhs = model_.op(t.label(), moved, s.target);
        if (!model_equal(model_, lhs, rhs))
          out.record({inputs, model_show(model_, lhs), model_show(model_, rhs), weight, order});
      } catch (const std::exception& e) {
        out.record({inputs, std::string("error: ") + e.what(), "-", weight, order});
      }
    };
    return detail::parallel_cases("op-compatibility", jobs.size() + randoms.size(), [&](std::size_t i,
                                                                                       LawReport& out) {
      if (i >= jobs.size()) {
        const Case& c = randoms[i - jobs.size()];
        check(c.a, c.s, fold_subst(model_, c.s), i << 32, out);
        return;
      }
      auto [m, n] = jobs[i];
      std::size_t inner = 0;
      detail::for_each_tuple(pool_terms_[n].size(), m, [&](const std::vector<std::size_t>& si) {
        auto [s, sv] = pool_subst(si, n);
        check(*ops[i], s, sv, (i << 32) | inner++, out);
      });
    });
  }

  /// fold(t[s]) = fold(t)[fold . s] and fold(var i) = var i
  LawReport fold_morphism() {
    struct Case {
      ScopedTerm a;
      Subst s;
    };
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    std::vector<const ScopedTerm*> targets;
    for (std::size_t m = 0; m <= bounds_.max_scope; ++m)
      for (const auto& a : terms_[m])
        for (std::size_t n = 0; n <= bounds_.max_scope; ++n) {
          jobs.emplace_back(m, n);
          targets.push_back(&a);
        }
    std::vector<Case> randoms;
    Rng rng(bounds_.seed ^ 0x5);
    for (std::size_t tries = 0; randoms.size() < bounds_.samples && tries < 100 * bounds_.samples + 100; ++tries) {
      std::size_t m = random_below(rng, bounds_.max_scope + 1), n = random_below(rng, bounds_.max_scope + 1);
      auto a = sampler_.up_to(m, bounds_.random_nodes, rng);
      auto s = random_subst(m, n, rng);
      if (a && s) randoms.push_back({*a, *s});
    }
    auto check = [&](const ScopedTerm& a, const Subst& s, std::span<const V> sv, std::size_t order,
                     LawReport& out) {
      ++out.samples;
      std::string inputs = "t=" + show_scoped(a) + " s=" + detail::show_subst(s);
      std::size_t weight = a.tree.size() + detail::subst_weight(s);
      try {
        V lhs = fold(model_, substitute(a, s));
        V rhs = model_.subst(fold(model_, a), sv, s.target);
        if (!model_equal(model_, lhs, rhs))
          out.record({inputs, model_show(model_, lhs), model_show(model_, rhs), weight, order});
      } catch (const std::exception& e) {
        out.record({inputs, std::string("error: ") + e.what(), "-", weight, order});
      }
    };
    LawReport report =
        detail::parallel_cases("fold-morphism", jobs.size() + randoms.size(), [&](std::size_t i, LawReport& out) {
          if (i >= jobs.size()) {
            const Case& c = randoms[i - jobs.size()];
            check(c.a, c.s, fold_subst(model_, c.s), i << 32, out);
            return;
          }
          auto [m, n] = jobs[i];
          std::size_t inner = 0;
          detail::for_each_tuple(pool_terms_[n].size(), m, [&](const std::vector<std::size_t>& si) {
            auto [s, sv] = pool_subst(si, n);
            check(*targets[i], s, sv, (i << 32) | inner++, out);
          });
        });
    for (std::size_t n = 1; n <= bounds_.max_scope; ++n)
      for (std::size_t i = 0; i < n; ++i) {
        ++report.samples;
        V lhs = fold(model_, mk_var(i, n));
        V rhs = model_.var(i, n);
        if (!model_equal(model_, lhs, rhs))
          report.record({"t=(var " + std::to_string(i) + ") @" + std::to_string(n), model_show(model_, lhs),
                         model_show(model_, rhs), 1, 0});
      }
    return report;
  }

  std::vector<LawReport> model_laws() { return {associativity(), left_unit(), right_unit(), compatibility()}; }

private:
  Model<V> model_;
  BindingSignature sig_;
  LawBounds bounds_;
  TermEnumerator enumerator_;
  TermSampler sampler_;
  std::vector<std::vector<ScopedTerm>> terms_;
  std::vector<std::vector<ScopedTerm>> pool_terms_;
  std::vector<std::vector<V>> pool_values_;

  std::pair<Subst, std::vector<V>> pool_subst(const std::vector<std::size_t>& choice, std::size_t target) const {
    Subst s{{}, target};
    std::vector<V> values;
    for (auto c : choice) {
      s.entries.push_back(pool_terms_[target][c].tree);
      values.push_back(pool_values_[target][c]);
    }
    return {std::move(s), std::move(values)};
  }

  std::optional<Subst> random_subst(std::size_t source, std::size_t target, Rng& rng) {
    Subst s{{}, target};
    for (std::size_t i = 0; i < source; ++i) {
      auto e = sampler_.up_to(target, bounds_.random_nodes, rng);
      if (!e) return std::nullopt;
      s.entries.push_back(e->tree);
    }
    return s;
  }
};

/// Associativity, left and right unit, and constructor compatibility.
template <class V>
std::vector<LawReport> check_model_laws(const Model<V>& m, const BindingSignature& sig, const LawBounds& bounds) {
  return LawHarness<V>(m, sig, bounds).model_laws();
}

template <class V>
std::vector<LawReport> check_model_laws(const Model<V>& m, const BindingSignature& sig, std::size_t samples,
                                        std::uint64_t seed) {
  LawBounds b;
  b.samples = samples;
  b.seed = seed;
  return check_model_laws(m, sig, b);
}

template <class V>
LawReport check_fold_morphism(const Model<V>& m, const BindingSignature& sig, const LawBounds& bounds) {
  return LawHarness<V>(m, sig, bounds).fold_morphism();
}

template <class V>
LawReport check_fold_morphism(const Model<V>& m, const BindingSignature& sig, std::size_t samples,
                              std::uint64_t seed) {
  LawBounds b;
  b.samples = samples;
  b.seed = seed;
  return check_fold_morphism(m, sig, b);
}

}  // namespace binder
