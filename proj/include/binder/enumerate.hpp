#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "binder/signature.hpp"
#include "binder/term.hpp"

namespace binder {

/// Pseudo-random source used by every sampler. Its output sequence is fixed
/// by the standard, so seeded runs agree across platforms.
using Rng = std::mt19937_64;

/// Uniform-ish index below `bound` (> 0); avoids library distributions.
inline std::size_t random_below(Rng& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(bound));
}

namespace detail {

/// Calls `f(parts)` for every split of `total` into `count` positive parts,
/// in lexicographic order.
template <class F>
void for_each_composition(std::size_t total, std::size_t count, F&& f) {
  std::vector<std::size_t> parts(count, 1);
  if (count == 0) {
    if (total == 0) f(parts);
    return;
  }
  if (total < count) return;
  auto rec = [&](auto& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == count) {
      parts[pos] = remaining;
      f(parts);
      return;
    }
    std::size_t rest = count - pos - 1;
    for (std::size_t s = 1; s + rest <= remaining; ++s) {
      parts[pos] = s;
      self(self, pos + 1, remaining - s);
    }
  };
  rec(rec, 0, total);
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > std::numeric_limits<std::uint64_t>::max() / b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a * b;
}

}  // namespace detail

/// Exhaustive enumeration of well-scoped terms by exact node count, memoised.
///
/// Order within a size: variables by index, then operators in signature order,
/// then argument size splits lexicographically, then argument tuples with the
/// first argument varying slowest.
class TermEnumerator {
public:
  explicit TermEnumerator(BindingSignature sig) : sig_(std::move(sig)) {}

  const std::vector<Term>& exact(std::size_t scope, std::size_t size) {
    auto key = std::make_pair(scope, size);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Term> out;
    if (size == 1)
      for (std::size_t i = 0; i < scope; ++i) out.push_back(Term::var(i));
    for (const auto& entry : sig_.entries()) {
      const auto& binders = entry.arity.binders;
      detail::for_each_composition(size - 1, binders.size(), [&](const std::vector<std::size_t>& parts) {
        std::vector<const std::vector<Term>*> pools;
        for (std::size_t j = 0; j < binders.size(); ++j) {
          pools.push_back(&exact(scope + binders[j], parts[j]));
          if (pools.back()->empty()) return;
        }
        std::vector<Term> args(binders.size(), Term::var(0));
        auto rec = [&](auto& self, std::size_t j) -> void {
          if (j == binders.size()) {
            out.push_back(Term::op(entry.label, args, binders));
            return;
          }
          for (const auto& t : *pools[j]) {
            args[j] = t;
            self(self, j + 1);
          }
        };
        rec(rec, 0);
      });
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  /// All terms at `scope` with between 1 and `max_nodes` nodes, smallest first.
  std::vector<ScopedTerm> up_to(std::size_t scope, std::size_t max_nodes) {
    std::vector<ScopedTerm> out;
    for (std::size_t s = 1; s <= max_nodes; ++s)
      for (const auto& t : exact(scope, s)) out.push_back({t, scope});
    return out;
  }

  const BindingSignature& signature() const { return sig_; }

private:
  BindingSignature sig_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Term>> memo_;
};

inline std::vector<ScopedTerm> enumerate_terms(const BindingSignature& sig, std::size_t scope,
                                               std::size_t max_nodes) {
  return TermEnumerator(sig).up_to(scope, max_nodes);
}

/// Uniform sampling of terms of a given size through memoised counts.
class TermSampler {
public:
  explicit TermSampler(BindingSignature sig) : sig_(std::move(sig)) {}

  std::uint64_t count(std::size_t scope, std::size_t size) {
    if (size == 0) return 0;
    auto key = std::make_pair(scope, size);
    if (auto it = counts_.find(key); it != counts_.end()) return it->second;
    std::uint64_t total = size == 1 ? scope : 0;
    for (const auto& entry : sig_.entries())
      total = detail::sat_add(total, count_op(entry.arity, scope, size));
    counts_.emplace(key, total);
    return total;
  }

  /// Uniform over terms of exactly `size` nodes; nullopt when there are none.
  std::optional<Term> exact(std::size_t scope, std::size_t size, Rng& rng) {
    std::uint64_t total = count(scope, size);
    if (total == 0) return std::nullopt;
    std::uint64_t pick = rng() % total;
    if (size == 1 && pick < scope) return Term::var(static_cast<std::size_t>(pick));
    if (size == 1) pick -= scope;
    for (const auto& entry : sig_.entries()) {
      std::uint64_t c = count_op(entry.arity, scope, size);
      if (pick >= c) {
        pick -= c;
        continue;
      }
      const auto& binders = entry.arity.binders;
      std::optional<std::vector<std::size_t>> chosen;
      detail::for_each_composition(size - 1, binders.size(), [&](const std::vector<std::size_t>& parts) {
        if (chosen) return;
        std::uint64_t w = split_weight(binders, scope, parts);
        if (pick < w)
          chosen = parts;
        else
          pick -= w;
      });
      std::vector<Term> args;
      for (std::size_t j = 0; j < binders.size(); ++j)
        args.push_back(*exact(scope + binders[j], (*chosen)[j], rng));
      return Term::op(entry.label, std::move(args), binders);
    }
    return std::nullopt;
  }

  /// Size drawn uniformly among those with at least one term, then a uniform term.
  std::optional<ScopedTerm> up_to(std::size_t scope, std::size_t max_nodes, Rng& rng) {
    std::vector<std::size_t> sizes;
    for (std::size_t s = 1; s <= max_nodes; ++s)
      if (count(scope, s) > 0) sizes.push_back(s);
    if (sizes.empty()) return std::nullopt;
    std::size_t size = sizes[random_below(rng, sizes.size())];
    return ScopedTerm{*exact(scope, size, rng), scope};
  }

  const BindingSignature& signature() const { return sig_; }

private:
  BindingSignature sig_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts_;

  std::uint64_t split_weight(const std::vector<std::size_t>& binders, std::size_t scope,
                             const std::vector<std::size_t>& parts) {
    std::uint64_t w = 1;
    for (std::size_t j = 0; j < binders.size(); ++j) w = detail::sat_mul(w, count(scope + binders[j], parts[j]));
    return w;
  }

  std::uint64_t count_op(const BindingArity& arity, std::size_t scope, std::size_t size) {
    std::uint64_t total = 0;
    detail::for_each_composition(size - 1, arity.size(), [&](const std::vector<std::size_t>& parts) {
      total = detail::sat_add(total, split_weight(arity.binders, scope, parts));
    });
    return total;
  }
};

}  // namespace binder
