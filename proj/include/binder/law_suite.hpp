#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "binder/enumerate.hpp"
#include "binder/law_report.hpp"
#include "binder/model.hpp"
#include "binder/signature.hpp"
#include "binder/transport.hpp"
#include "binder/unscoped.hpp"

namespace binder {

/// to_unscoped . to_scoped = id on unscoped terms, and to_scoped . to_unscoped
/// = id on scoped terms at their minimal scope.
inline LawReport check_representation_roundtrip(const BindingSignature& sig, std::size_t max_nodes,
                                                std::size_t max_scope = 2) {
  LawReport report;
  report.law = "representation-roundtrip";
  TermEnumerator terms(sig);
  std::size_t order = 0;
  for (std::size_t n = 0; n <= max_scope; ++n)
    for (const auto& s : terms.up_to(n, max_nodes)) {
      ++report.samples;
      UnscopedTerm u = to_unscoped(s);
      if (!(to_unscoped(to_scoped(u)) == u))
        report.record({"u=" + print_term(u), print_term(to_unscoped(to_scoped(u))), print_term(u), s.tree.size(), order});
      ScopedTerm back = to_scoped(u);
      bool minimal = support(u) == s.scope;
      if (minimal && !(back == s))
        report.record({"t=" + show_scoped(s), show_scoped(back), show_scoped(s), s.tree.size(), order});
      if (!(at_scope(back, s.scope) == s))
        report.record({"t=" + show_scoped(s) + " (at_scope)", show_scoped(at_scope(back, s.scope)), show_scoped(s),
                       s.tree.size(), order});
      ++order;
    }
  return report;
}

/// to_unscoped(substitute(t, s)) = usubst(to_unscoped(t), embed(s)).
inline LawReport check_substitution_agreement(const BindingSignature& sig, std::size_t max_nodes,
                                              std::size_t subst_nodes = 2, std::size_t max_scope = 2) {
  LawReport report;
  report.law = "scoped-unscoped-agreement";
  TermEnumerator terms(sig);
  std::vector<std::vector<ScopedTerm>> pools;
  for (std::size_t n = 0; n <= max_scope; ++n) pools.push_back(terms.up_to(n, subst_nodes));
  std::size_t order = 0;
  for (std::size_t m = 0; m <= max_scope; ++m)
    for (const auto& t : terms.up_to(m, max_nodes))
      for (std::size_t n = 0; n <= max_scope; ++n)
        detail::for_each_tuple(pools[n].size(), m, [&](const std::vector<std::size_t>& idx) {
          Subst s{{}, n};
          for (auto i : idx) s.entries.push_back(pools[n][i].tree);
          ++report.samples;
          UnscopedTerm lhs = to_unscoped(substitute(t, s));
          UnscopedTerm rhs = usubst(to_unscoped(t), embed(s));
          if (!(lhs == rhs))
            report.record({"t=" + show_scoped(t) + " s=" + detail::show_subst(s), print_term(lhs), print_term(rhs),
                           t.tree.size() + detail::subst_weight(s), order});
          ++order;
        });
  return report;
}

inline LawReport intersection_as_law(const IntersectionReport& r) {
  LawReport report;
  report.law = "intersectionality";
  for (const auto& row : r.rows) {
    ++report.samples;
    if (row.closed != row.equaliser || !row.bijective)
      report.record({"size=" + std::to_string(row.size), "closed=" + std::to_string(row.closed),
                     "equaliser=" + std::to_string(row.equaliser), row.size, row.size});
  }
  return report;
}

struct SuiteOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 42;
  std::size_t max_nodes = 4;
};

/// The full law suite for a signature: substitution and module laws of the
/// syntax, the fold-morphism property, the De Bruijn monad laws of unscoped
/// syntax, representation round trips and intersectionality. An empty
/// signature only gets the monoid laws.
inline std::vector<LawReport> run_law_suite(const BindingSignature& sig, const SuiteOptions& options) {
  LawBounds bounds;
  bounds.samples = options.samples;
  bounds.seed = options.seed;
  bounds.term_nodes = options.max_nodes;
  LawHarness<ScopedTerm> syntax(syntax_model(sig), sig, bounds);

  DeBruijnBounds db;
  db.samples = options.samples;
  db.seed = options.seed;
  db.term_nodes = options.max_nodes;
  DeBruijnHarness<UnscopedTerm> unscoped(unscoped_syntax_model(sig), sig, db);

  std::vector<LawReport> out;
  out.push_back(syntax.associativity());
  out.push_back(syntax.left_unit());
  out.push_back(syntax.right_unit());
  out.push_back(unscoped.associativity());
  out.push_back(unscoped.left_unit());
  out.push_back(unscoped.right_unit());
  if (sig.empty()) return out;
  out.push_back(syntax.compatibility());
  out.push_back(syntax.fold_morphism());
  out.push_back(unscoped.compatibility());
  out.push_back(unscoped.support_soundness());
  out.push_back(check_representation_roundtrip(sig, options.max_nodes + 1));
  out.push_back(check_substitution_agreement(sig, options.max_nodes));
  out.push_back(intersection_as_law(intersectionality_check(sig, options.max_nodes + 1)));
  return out;
}

}  // namespace binder
