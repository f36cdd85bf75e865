#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "binder/enumerate.hpp"
#include "binder/error.hpp"
#include "binder/law_report.hpp"
#include "binder/model.hpp"
#include "binder/signature.hpp"
#include "binder/term.hpp"
#include "binder/unscoped.hpp"

namespace binder {

/// Prefix-and-shift substitution over arbitrary model values.
template <class V>
struct ValueSubst {
  std::vector<V> prefix;
  std::size_t shift = 0;
};

/// A model in the unscoped presentation: values with a variable function on
/// the naturals and a substitution taking a prefix-and-shift family.
///
/// `support` must return an upper bound on the free variables of a value; it
/// is checked against renaming probes before any transport.
template <class V>
struct DeBruijnModel {
  using Value = V;

  std::string name;
  std::function<V(std::size_t index)> var;
  std::function<V(const std::string& label, std::span<const V> args)> op;
  std::function<V(const V& value, const ValueSubst<V>& f)> subst;
  std::function<std::size_t(const V& value)> support;
  std::function<bool(const V&, const V&)> equal;
  std::function<std::string(const V&)> show;
};

template <class V>
bool db_equal(const DeBruijnModel<V>& m, const V& a, const V& b) {
  if (m.equal) return m.equal(a, b);
  if constexpr (std::equality_comparable<V>)
    return a == b;
  else
    throw Error("model '" + m.name + "' has no equality");
}

template <class V>
std::string db_show(const DeBruijnModel<V>& m, const V& v) {
  return m.show ? m.show(v) : std::string("<value>");
}

template <class V>
V db_at(const DeBruijnModel<V>& m, const ValueSubst<V>& f, std::size_t i) {
  return i < f.prefix.size() ? f.prefix[i] : m.var(i - f.prefix.size() + f.shift);
}

template <class V>
ValueSubst<V> db_lift(const DeBruijnModel<V>& m, const ValueSubst<V>& f, std::size_t k) {
  ValueSubst<V> out;
  for (std::size_t i = 0; i < k; ++i) out.prefix.push_back(m.var(i));
  ValueSubst<V> by_k{{}, k};
  for (const auto& e : f.prefix) out.prefix.push_back(m.subst(e, by_k));
  out.shift = f.shift + k;
  return out;
}

/// i |-> f(i)[g], with the prefix long enough for the tail law to hold.
template <class V>
ValueSubst<V> db_compose(const DeBruijnModel<V>& m, const ValueSubst<V>& f, const ValueSubst<V>& g) {
  std::size_t fp = f.prefix.size(), gp = g.prefix.size();
  std::size_t length = fp + gp > f.shift ? std::max(fp, fp + gp - f.shift) : fp;
  ValueSubst<V> out;
  for (std::size_t i = 0; i < length; ++i) out.prefix.push_back(m.subst(db_at(m, f, i), g));
  out.shift = length - fp + f.shift - gp + g.shift;
  return out;
}

template <class V>
V ufold(const DeBruijnModel<V>& m, const Term& t) {
  if (t.is_var()) return m.var(t.index());
  std::vector<V> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(ufold(m, a));
  return m.op(t.label(), args);
}

template <class V>
V ufold(const DeBruijnModel<V>& m, const UnscopedTerm& t) {
  return ufold(m, t.tree);
}

/// Unscoped syntax as a De Bruijn model.
inline DeBruijnModel<UnscopedTerm> unscoped_syntax_model(const BindingSignature& sig) {
  DeBruijnModel<UnscopedTerm> m;
  m.name = "unscoped-syntax";
  m.var = [](std::size_t i) { return UnscopedTerm{Term::var(i)}; };
  m.op = [sig](const std::string& label, std::span<const UnscopedTerm> args) {
    const BindingArity& arity = sig.arity(label);
    if (args.size() != arity.size()) throw ScopeError("'" + label + "' given wrong number of arguments");
    std::vector<Term> trees;
    for (const auto& a : args) trees.push_back(a.tree);
    return UnscopedTerm{Term::op(label, std::move(trees), arity.binders)};
  };
  m.subst = [](const UnscopedTerm& v, const ValueSubst<UnscopedTerm>& f) {
    UnscopedSubst s{{}, f.shift};
    for (const auto& e : f.prefix) s.prefix.push_back(e.tree);
    return usubst(v, s);
  };
  m.support = [](const UnscopedTerm& v) { return support(v); };
  m.show = [](const UnscopedTerm& v) { return print_term(v); };
  return m;
}

/// The renamings used to probe support: shift-at-k (i < k fixed, i >= k moves
/// to i + 1) for k in [from, to], and adjacent transpositions (j j+1) for j in
/// [from, to). Each fixes every index below `from`.
inline std::vector<UnscopedSubst> support_probes(std::size_t from, std::size_t to) {
  std::vector<UnscopedSubst> probes;
  for (std::size_t k = from; k <= to; ++k) {
    UnscopedSubst p;
    for (std::size_t i = 0; i < k; ++i) p.prefix.push_back(Term::var(i));
    p.shift = k + 1;
    probes.push_back(std::move(p));
  }
  for (std::size_t j = from; j < to; ++j) {
    UnscopedSubst p;
    for (std::size_t i = 0; i < j; ++i) p.prefix.push_back(Term::var(i));
    p.prefix.push_back(Term::var(j + 1));
    p.prefix.push_back(Term::var(j));
    p.shift = j + 2;
    probes.push_back(std::move(p));
  }
  return probes;
}

/// Bounds for the De Bruijn monad law suite.
struct DeBruijnBounds {
  std::size_t term_nodes = 4;   ///< exhaustive terms up to this many nodes
  std::size_t term_scope = 2;   ///< ... with free indices below this bound
  std::size_t entry_nodes = 2;  ///< prefix entries up to this many nodes
  std::size_t entry_scope = 1;  ///< ... with free indices below this bound
  std::size_t max_prefix = 2;
  std::size_t max_shift = 2;
  std::size_t samples = 100;
  std::size_t random_nodes = 7;
  std::uint64_t seed = 42;
};

/// Checks the De Bruijn monad laws, constructor compatibility and support
/// soundness of `m` on the image of enumerated and random unscoped syntax.
template <class V>
class DeBruijnHarness {
public:
  DeBruijnHarness(DeBruijnModel<V> model, BindingSignature sig, DeBruijnBounds bounds)
      : model_(std::move(model)), sig_(std::move(sig)), bounds_(bounds), sampler_(sig_) {
    TermEnumerator terms(sig_);
    for (const auto& t : terms.up_to(bounds_.term_scope, bounds_.term_nodes)) terms_.push_back(t.tree);
    std::vector<Term> pool;
    for (const auto& t : terms.up_to(bounds_.entry_scope, bounds_.entry_nodes)) pool.push_back(t.tree);
    for (std::size_t len = 0; len <= bounds_.max_prefix; ++len)
      detail::for_each_tuple(pool.size(), len, [&](const std::vector<std::size_t>& idx) {
        for (std::size_t sh = 0; sh <= bounds_.max_shift; ++sh) {
          UnscopedSubst f{{}, sh};
          for (auto i : idx) f.prefix.push_back(pool[i]);
          substs_.push_back(std::move(f));
        }
      });
    Rng rng(bounds_.seed ^ 0x11);
    for (std::size_t tries = 0; randoms_.size() < bounds_.samples && tries < 100 * bounds_.samples + 100; ++tries) {
      auto x = sampler_.up_to(random_below(rng, bounds_.term_scope + 2), bounds_.random_nodes, rng);
      auto f = random_subst(rng);
      auto g = random_subst(rng);
      if (x && f && g) randoms_.push_back({x->tree, *f, *g});
    }
  }

  LawReport associativity() const {
    auto check = [&](const Term& x, const UnscopedSubst& f, const UnscopedSubst& g, std::size_t order,
                     LawReport& out) {
      ++out.samples;
      auto inputs = [&] { return "x=" + print_term(x) + " f=" + show(f) + " g=" + show(g); };
      std::size_t weight = x.size() + weight_of(f) + weight_of(g);
      try {
        V xv = ufold(model_, x);
        auto fv = values(f), gv = values(g);
        V lhs = model_.subst(model_.subst(xv, fv), gv);
        V rhs = model_.subst(xv, db_compose(model_, fv, gv));
        if (!db_equal(model_, lhs, rhs)) out.record({inputs(), db_show(model_, lhs), db_show(model_, rhs), weight, order});
      } catch (const std::exception& e) {
        out.record({inputs(), std::string("error: ") + e.what(), "-", weight, order});
      }
    };
    return detail::parallel_cases("db-associativity", terms_.size() + randoms_.size(), [&](std::size_t i,
                                                                                          LawReport& out) {
      if (i >= terms_.size()) {
        const auto& r = randoms_[i - terms_.size()];
        check(r.x, r.f, r.g, i << 32, out);
        return;
      }
      std::size_t inner = 0;
      for (const auto& f : substs_)
        for (const auto& g : substs_) check(terms_[i], f, g, (i << 32) | inner++, out);
    });
  }

  LawReport left_unit() const {
    std::vector<UnscopedSubst> cases = substs_;
    for (const auto& r : randoms_) cases.push_back(r.f);
    return detail::parallel_cases("db-left-unit", cases.size(), [&](std::size_t c, LawReport& out) {
      const auto& f = cases[c];
      auto fv = values(f);
      for (std::size_t i = 0; i <= f.prefix.size() + 1; ++i) {
        ++out.samples;
        try {
          V lhs = model_.subst(model_.var(i), fv);
          V rhs = db_at(model_, fv, i);
          if (!db_equal(model_, lhs, rhs))
            out.record({"i=" + std::to_string(i) + " f=" + show(f), db_show(model_, lhs), db_show(model_, rhs),
                        1 + weight_of(f), (c << 8) | i});
        } catch (const std::exception& e) {
          out.record({"i=" + std::to_string(i) + " f=" + show(f), std::string("error: ") + e.what(), "-",
                      1 + weight_of(f), (c << 8) | i});
        }
      }
    });
  }

  LawReport right_unit() const {
    std::vector<Term> cases = terms_;
    for (const auto& r : randoms_) cases.push_back(r.x);
    return detail::parallel_cases("db-right-unit", cases.size(), [&](std::size_t i, LawReport& out) {
      ++out.samples;
      try {
        V xv = ufold(model_, cases[i]);
        V lhs = model_.subst(xv, ValueSubst<V>{});
        if (!db_equal(model_, lhs, xv))
          out.record({"x=" + print_term(cases[i]), db_show(model_, lhs), db_show(model_, xv), cases[i].size(), i});
      } catch (const std::exception& e) {
        out.record({"x=" + print_term(cases[i]), std::string("error: ") + e.what(), "-", cases[i].size(), i});
      }
    });
  }

  /// op(l, args)[f] = op(l, [arg_j[lift(f, k_j)]])
  LawReport compatibility() const {
    std::vector<std::size_t> ops;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].is_op()) ops.push_back(i);
    return detail::parallel_cases("db-op-compatibility", ops.size(), [&](std::size_t c, LawReport& out) {
      const Term& t = terms_[ops[c]];
      std::size_t inner = 0;
      for (const auto& f : substs_) {
        ++out.samples;
        std::string inputs = "x=" + print_term(t) + " f=" + show(f);
        try {
          std::vector<V> args;
          for (const auto& a : t.args()) args.push_back(ufold(model_, a));
          auto fv = values(f);
          V lhs = model_.subst(model_.op(t.label(), args), fv);
          std::vector<V> moved;
          for (std::size_t j = 0; j < args.size(); ++j)
            moved.push_back(model_.subst(args[j], db_lift(model_, fv, t.binders()[j])));
          V rhs = model_.op(t.label(), moved);
          if (!db_equal(model_, lhs, rhs))
            out.record({inputs, db_show(model_, lhs), db_show(model_, rhs), t.size() + weight_of(f),
                        (c << 32) | inner});
        } catch (const std::exception& e) {
          out.record({inputs, std::string("error: ") + e.what(), "-", t.size() + weight_of(f), (c << 32) | inner});
        }
        ++inner;
      }
    });
  }

  /// Every renaming probe that fixes the claimed support leaves the value unchanged.
  LawReport support_soundness() const {
    std::vector<Term> cases = terms_;
    for (const auto& r : randoms_) cases.push_back(r.x);
    return detail::parallel_cases("support-soundness", cases.size(), [&](std::size_t i, LawReport& out) {
      try {
        V xv = ufold(model_, cases[i]);
        std::size_t n = model_.support(xv);
        auto probes = support_probes(n, n + 2);
        for (std::size_t p = 0; p < probes.size(); ++p) {
          ++out.samples;
          V moved = model_.subst(xv, values(probes[p]));
          if (!db_equal(model_, moved, xv))
            out.record({"x=" + print_term(cases[i]) + " support=" + std::to_string(n) + " probe=" + show(probes[p]),
                        db_show(model_, moved), db_show(model_, xv), cases[i].size(), (i << 8) | p});
        }
      } catch (const std::exception& e) {
        ++out.samples;
        out.record({"x=" + print_term(cases[i]), std::string("error: ") + e.what(), "-", cases[i].size(), i << 8});
      }
    });
  }

  std::vector<LawReport> all() const {
    return {associativity(), left_unit(), right_unit(), compatibility(), support_soundness()};
  }

private:
  struct Random {
    Term x;
    UnscopedSubst f, g;
  };

  DeBruijnModel<V> model_;
  BindingSignature sig_;
  DeBruijnBounds bounds_;
  TermSampler sampler_;
  std::vector<Term> terms_;
  std::vector<UnscopedSubst> substs_;
  std::vector<Random> randoms_;

  ValueSubst<V> values(const UnscopedSubst& f) const {
    ValueSubst<V> out{{}, f.shift};
    for (const auto& e : f.prefix) out.prefix.push_back(ufold(model_, e));
    return out;
  }

  static std::string show(const UnscopedSubst& f) {
    std::string out = "[";
    for (std::size_t i = 0; i < f.prefix.size(); ++i) {
      if (i) out += ", ";
      out += print_term(f.prefix[i]);
    }
    return out + " | +" + std::to_string(f.shift) + "]";
  }

  static std::size_t weight_of(const UnscopedSubst& f) {
    std::size_t w = 0;
    for (const auto& e : f.prefix) w += e.size();
    return w;
  }

  std::optional<UnscopedSubst> random_subst(Rng& rng) {
    UnscopedSubst f;
    std::size_t len = random_below(rng, bounds_.max_prefix + 3);
    for (std::size_t i = 0; i < len; ++i) {
      auto e = sampler_.up_to(random_below(rng, bounds_.entry_scope + 3), bounds_.random_nodes, rng);
      if (!e) return std::nullopt;
      f.prefix.push_back(e->tree);
    }
    f.shift = random_below(rng, bounds_.max_shift + 3);
    return f;
  }
};

template <class V>
std::vector<LawReport> check_debruijn_laws(const DeBruijnModel<V>& m, const BindingSignature& sig,
                                           const DeBruijnBounds& bounds) {
  return DeBruijnHarness<V>(m, sig, bounds).all();
}

/// How a transport treats a model with no closed values.
enum class EmptyPolicy { warn, reject };

struct TransportOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  EmptyPolicy empty = EmptyPolicy::warn;
  std::size_t empty_probe_nodes = 6;  ///< closed syntax searched up to this size
};

template <class M>
struct Transported {
  M model;
  std::vector<LawReport> reports;
  std::vector<std::string> warnings;
};

namespace detail {

inline void reject_on_failure(const std::vector<LawReport>& reports, const std::string& what) {
  for (const auto& r : reports)
    if (!r.passed()) {
      const auto& f = r.failures.front();
      throw LawViolation(what + ": law " + r.law + " fails", f.inputs + " lhs=" + f.lhs + " rhs=" + f.rhs);
    }
}

inline void check_nonempty(const BindingSignature& sig, const TransportOptions& options,
                           std::vector<std::string>& warnings) {
  TermEnumerator terms(sig);
  for (std::size_t s = 1; s <= options.empty_probe_nodes; ++s)
    if (!terms.exact(0, s).empty()) return;
  std::string msg = "no closed terms up to " + std::to_string(options.empty_probe_nodes) +
                    " nodes: the model may be empty at scope 0";
  if (options.empty == EmptyPolicy::reject) throw LawViolation("empty model rejected", msg);
  warnings.push_back(msg);
}

}  // namespace detail

/// Restricts a De Bruijn model to a scoped model whose values at scope n are
/// those with support at most n.
///
/// Rejects the model with LawViolation when a sampled monad law or the
/// support oracle fails.
template <class V>
Transported<Model<V>> transport_unscoped_model(const DeBruijnModel<V>& mu, const BindingSignature& sig,
                                               const TransportOptions& options = {}) {
  DeBruijnBounds bounds;
  bounds.samples = options.samples;
  bounds.seed = options.seed;
  Transported<Model<V>> out;
  out.reports = check_debruijn_laws(mu, sig, bounds);
  detail::reject_on_failure(out.reports, "unscoped model '" + mu.name + "'");
  detail::check_nonempty(sig, options, out.warnings);

  Model<V>& m = out.model;
  m.name = mu.name + "|scoped";
  m.var = [mu](std::size_t i, std::size_t n) {
    if (i >= n) throw ScopeError("index " + std::to_string(i) + " out of scope " + std::to_string(n));
    return mu.var(i);
  };
  m.op = [mu](const std::string& label, std::span<const V> args, std::size_t) { return mu.op(label, args); };
  m.subst = [mu](const V& v, std::span<const V> entries, std::size_t n) {
    return mu.subst(v, ValueSubst<V>{std::vector<V>(entries.begin(), entries.end()), n});
  };
  m.shift = [mu](const V& v, std::size_t, std::size_t k) { return mu.subst(v, ValueSubst<V>{{}, k}); };
  m.rename = [mu](const V& v, std::span<const std::size_t> rho, std::size_t n) {
    ValueSubst<V> f{{}, n};
    for (auto r : rho) f.prefix.push_back(mu.var(r));
    return mu.subst(v, f);
  };
  m.equal = [mu](const V& a, const V& b) { return db_equal(mu, a, b); };
  m.show = [mu](const V& v) { return db_show(mu, v); };
  return out;
}

/// An element of the colimit of the weakening chain: a value at some scope,
/// identified with all of its weakenings.
template <class V>
struct Colim {
  std::size_t scope = 0;
  V value;
};

/// Extends a scoped model to a De Bruijn model on the colimit of its
/// weakening chain. Equality weakens both sides to the larger scope.
///
/// Rejects the model when its laws or its renaming action disagree with its
/// substitution on samples.
template <class V>
Transported<DeBruijnModel<Colim<V>>> transport_scoped_model(const Model<V>& ms, const BindingSignature& sig,
                                                            const TransportOptions& options = {}) {
  Transported<DeBruijnModel<Colim<V>>> out;
  LawBounds bounds;
  bounds.samples = options.samples;
  bounds.seed = options.seed;
  bounds.term_nodes = 3;
  out.reports = check_model_laws(ms, sig, bounds);

  // Renaming action against substitution by variables.
  LawReport rename_report;
  rename_report.law = "rename-consistency";
  {
    TermEnumerator terms(sig);
    std::size_t order = 0;
    for (std::size_t m = 0; m <= 2; ++m)
      for (const auto& t : terms.up_to(m, 4))
        for (std::size_t n = 0; n <= 2; ++n)
          detail::for_each_tuple(n, m, [&](const std::vector<std::size_t>& rho) {
            ++rename_report.samples;
            V v = fold(ms, t);
            V lhs = model_rename(ms, v, rho, n);
            std::vector<V> entries;
            for (auto r : rho) entries.push_back(ms.var(r, n));
            V rhs = ms.subst(v, entries, n);
            if (!model_equal(ms, lhs, rhs)) {
              std::string inputs = "t=" + show_scoped(t) + " rho=[";
              for (std::size_t i = 0; i < rho.size(); ++i) inputs += (i ? " " : "") + std::to_string(rho[i]);
              rename_report.record({inputs + "] @" + std::to_string(n), model_show(ms, lhs), model_show(ms, rhs),
                                    t.tree.size(), order});
            }
            ++order;
          });
  }
  out.reports.push_back(rename_report);
  detail::reject_on_failure(out.reports, "scoped model '" + ms.name + "'");
  detail::check_nonempty(sig, options, out.warnings);

  auto weaken_to = [ms](const Colim<V>& c, std::size_t n) {
    if (n == c.scope) return c.value;
    std::vector<std::size_t> inclusion(c.scope);
    for (std::size_t i = 0; i < c.scope; ++i) inclusion[i] = i;
    return model_rename(ms, c.value, inclusion, n);
  };
  auto equal = [ms, weaken_to](const Colim<V>& a, const Colim<V>& b) {
    std::size_t n = std::max(a.scope, b.scope);
    return model_equal(ms, weaken_to(a, n), weaken_to(b, n));
  };

  DeBruijnModel<Colim<V>>& mu = out.model;
  mu.name = ms.name + "|unscoped";
  mu.var = [ms](std::size_t i) { return Colim<V>{i + 1, ms.var(i, i + 1)}; };
  mu.op = [ms, sig, weaken_to](const std::string& label, std::span<const Colim<V>> args) {
    const BindingArity& arity = sig.arity(label);
    if (args.size() != arity.size()) throw ScopeError("'" + label + "' given wrong number of arguments");
    std::size_t n = 0;
    for (std::size_t j = 0; j < args.size(); ++j)
      n = std::max(n, args[j].scope > arity.binders[j] ? args[j].scope - arity.binders[j] : 0);
    std::vector<V> values;
    for (std::size_t j = 0; j < args.size(); ++j) values.push_back(weaken_to(args[j], n + arity.binders[j]));
    return Colim<V>{n, ms.op(label, values, n)};
  };
  mu.subst = [ms, weaken_to](const Colim<V>& c, const ValueSubst<Colim<V>>& f) {
    std::vector<Colim<V>> images;
    std::size_t n = 0;
    for (std::size_t i = 0; i < c.scope; ++i) {
      images.push_back(i < f.prefix.size()
                           ? f.prefix[i]
                           : Colim<V>{i - f.prefix.size() + f.shift + 1,
                                      ms.var(i - f.prefix.size() + f.shift, i - f.prefix.size() + f.shift + 1)});
      n = std::max(n, images.back().scope);
    }
    std::vector<V> entries;
    for (const auto& e : images) entries.push_back(weaken_to(e, n));
    return Colim<V>{n, ms.subst(c.value, entries, n)};
  };
  mu.equal = equal;
  // Least n whose probes, applied at scope+1, all fix the value.
  mu.support = [ms, equal](const Colim<V>& c) {
    for (std::size_t n = 0; n <= c.scope; ++n) {
      bool fixed = true;
      for (const auto& probe : support_probes(n, c.scope)) {
        std::vector<std::size_t> rho(c.scope);
        for (std::size_t i = 0; i < c.scope; ++i) rho[i] = probe(i).index();
        Colim<V> moved{c.scope + 1, model_rename(ms, c.value, rho, c.scope + 1)};
        if (!equal(moved, c)) {
          fixed = false;
          break;
        }
      }
      if (fixed) return n;
    }
    return c.scope;
  };
  mu.show = [ms](const Colim<V>& c) { return model_show(ms, c.value) + " ~" + std::to_string(c.scope); };
  return out;
}

}  // namespace binder
