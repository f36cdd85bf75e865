#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binder/enumerate.hpp"
#include "binder/signature.hpp"
#include "binder/term.hpp"

namespace binder {

/// A de Bruijn term with no bound on its free indices.
struct UnscopedTerm {
  Term tree;

  friend bool operator==(const UnscopedTerm&, const UnscopedTerm&) = default;
};

inline std::string print_term(const UnscopedTerm& t) { return print_term(t.tree); }

inline UnscopedTerm parse_unscoped(const BindingSignature& sig, std::string_view text) {
  return {parse_term(sig, text)};
}

/// A substitution on all of the naturals, given by a finite prefix and a tail
/// shift: i maps to prefix[i] when i < |prefix|, else to var(i - |prefix| + shift).
///
/// `ucompose` and `canonical` keep the prefix minimal, so canonical
/// representations are equal exactly when the denotations are.
struct UnscopedSubst {
  std::vector<Term> prefix;
  std::size_t shift = 0;

  Term operator()(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : Term::var(i - prefix.size() + shift);
  }

  /// The variable substitution (unit).
  static UnscopedSubst identity() { return {}; }

  /// i maps to var(i + k).
  static UnscopedSubst shifting(std::size_t k) { return {{}, k}; }

  friend bool operator==(const UnscopedSubst&, const UnscopedSubst&) = default;
};

/// Drops trailing prefix entries already described by the tail law.
inline UnscopedSubst canonical(UnscopedSubst f) {
  while (!f.prefix.empty() && f.shift > 0 && f.prefix.back().is_var() && f.prefix.back().index() == f.shift - 1) {
    f.prefix.pop_back();
    --f.shift;
  }
  return f;
}

/// Denotational equality, probing every index where the two can differ.
inline bool same_denotation(const UnscopedSubst& f, const UnscopedSubst& g) {
  std::size_t probe = std::max(f.prefix.size(), g.prefix.size()) + 1;
  for (std::size_t i = 0; i <= probe; ++i)
    if (!(f(i) == g(i))) return false;
  return true;
}

/// f lifted under k binders: indices below k fixed, the rest shifted images.
inline UnscopedSubst ulift(const UnscopedSubst& f, std::size_t k) {
  if (k == 0) return f;
  UnscopedSubst out;
  out.prefix.reserve(k + f.prefix.size());
  for (std::size_t i = 0; i < k; ++i) out.prefix.push_back(Term::var(i));
  for (const auto& e : f.prefix) out.prefix.push_back(detail::shift(e, k));
  out.shift = f.shift + k;
  return out;
}

inline UnscopedTerm usubst(const UnscopedTerm& t, const UnscopedSubst& f) {
  return {detail::subst_tree(t.tree, f)};
}

/// The substitution i |-> usubst(f(i), g).
inline UnscopedSubst ucompose(const UnscopedSubst& f, const UnscopedSubst& g) {
  std::size_t fp = f.prefix.size();
  std::size_t gp = g.prefix.size();
  std::size_t length = fp + gp > f.shift ? std::max(fp, fp + gp - f.shift) : fp;
  UnscopedSubst out;
  out.prefix.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.prefix.push_back(detail::subst_tree(f(i), g));
  // For i >= length, f(i) = var(i - fp + f.shift) lands in g's tail.
  out.shift = length - fp + f.shift - gp + g.shift;
  return canonical(std::move(out));
}

/// Least n such that every free index is below n.
inline std::size_t support(const UnscopedTerm& t) { return detail::free_bound(t.tree); }

/// The same tree at its minimal scope.
inline ScopedTerm to_scoped(const UnscopedTerm& t) { return {t.tree, support(t)}; }

/// Forgets the scope.
inline UnscopedTerm to_unscoped(const ScopedTerm& t) { return {t.tree}; }

/// Weakens `t` to scope `n`, which must be at least its current scope.
inline ScopedTerm at_scope(const ScopedTerm& t, std::size_t n) {
  if (n < t.scope)
    throw ScopeError("cannot move a term at scope " + std::to_string(t.scope) + " down to scope " +
                     std::to_string(n));
  return weaken(t, n - t.scope);
}

/// Embeds a scoped substitution m -> n; indices past m map to var(i - m + n).
inline UnscopedSubst embed(const Subst& s) { return canonical({s.entries, s.target}); }

/// Per-size comparison of closed terms with the equaliser of the two
/// inclusions 1 -> 2, i.e. terms at scope 1 that do not use their variable.
struct IntersectionReport {
  struct Row {
    std::size_t size = 0;
    std::size_t closed = 0;
    std::size_t equaliser = 0;
    bool bijective = false;  // weakening maps the closed terms onto the equaliser
  };
  std::vector<Row> rows;

  bool passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.closed == r.equaliser && r.bijective; });
  }
};

inline IntersectionReport intersectionality_check(const BindingSignature& sig, std::size_t max_nodes) {
  TermEnumerator terms(sig);
  IntersectionReport report;
  const std::size_t left[] = {0};
  const std::size_t right[] = {1};
  for (std::size_t size = 1; size <= max_nodes; ++size) {
    IntersectionReport::Row row;
    row.size = size;
    const auto& closed = terms.exact(0, size);
    row.closed = closed.size();
    std::vector<Term> equaliser;
    for (const auto& t : terms.exact(1, size)) {
      ScopedTerm s{t, 1};
      if (rename(s, left, 2) == rename(s, right, 2)) equaliser.push_back(t);
    }
    row.equaliser = equaliser.size();
    row.bijective = closed.size() == equaliser.size();
    for (std::size_t i = 0; row.bijective && i < closed.size(); ++i)
      row.bijective = std::find(equaliser.begin(), equaliser.end(), weaken({closed[i], 0}, 1).tree) != equaliser.end();
    report.rows.push_back(row);
  }
  return report;
}

inline std::string format_intersection(const IntersectionReport& r) {
  std::string out;
  for (const auto& row : r.rows)
    out += "size " + std::to_string(row.size) + " closed=" + std::to_string(row.closed) +
           " equaliser=" + std::to_string(row.equaliser) + (row.bijective ? " ok" : " MISMATCH") + "\n";
  out += r.passed() ? "INTERSECTIONAL PASS\n" : "INTERSECTIONAL FAIL\n";
  return out;
}

}  // namespace binder
