#include <gtest/gtest.h>

#include <set>

#include "binder/binder.hpp"
#include "support/oracle.hpp"

using namespace binder;

namespace {

const BindingSignature lc = lc_signature();

ScopedTerm sc(const std::string& text, std::size_t scope) { return parse_scoped(lc, text, scope); }

Term term(const std::string& text) { return parse_term(lc, text); }

}  // namespace

TEST(Term, MkVar) {
  EXPECT_EQ(mk_var(0, 1), (ScopedTerm{Term::var(0), 1}));
  EXPECT_EQ(mk_var(2, 3), (ScopedTerm{Term::var(2), 3}));
  EXPECT_THROW(mk_var(3, 3), ScopeError);
}

TEST(Term, MkOp) {
  auto v = mk_var(0, 1);
  EXPECT_EQ(mk_op(lc, "app", {v, v}, 1), sc("(app (var 0) (var 0))", 1));
  auto id = mk_op(lc, "abs", {v}, 0);
  EXPECT_EQ(id, sc("(abs (var 0))", 0));
  EXPECT_THROW(mk_op(lc, "abs", {v}, 1), ScopeError);
  EXPECT_THROW(mk_op(lc, "app", {v}, 1), ScopeError);
  EXPECT_THROW(mk_op(lc, "lam", {v}, 0), SignatureError);
}

TEST(Term, ParsePrintRoundTrip) {
  for (const char* text : {"(var 0)", "(abs (var 0))", "(app (var 1) (abs (app (var 0) (var 2))))"}) {
    EXPECT_EQ(print_term(term(text)), text);
  }
  EXPECT_THROW(term("(app (var 0))"), ParseError);
  EXPECT_THROW(term("(lam (var 0))"), ParseError);
  EXPECT_THROW(term("(var x)"), ParseError);
  EXPECT_THROW(parse_scoped(lc, "(app (var 0) (var 1))", 1), ScopeError);
}

TEST(Term, BinderCountsRecorded) {
  Term t = term("(abs (app (var 0) (var 1)))");
  EXPECT_EQ(t.label(), "abs");
  EXPECT_EQ(t.binders(), (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.size(), 4u);
}

TEST(Rename, Examples) {
  std::vector<std::size_t> two{2};
  EXPECT_EQ(rename(mk_var(0, 1), two, 3), mk_var(2, 3));
  auto closed_body = sc("(abs (var 0))", 1);
  std::vector<std::size_t> zero{0};
  EXPECT_EQ(rename(closed_body, zero, 4).tree, term("(abs (var 0))"));
  std::vector<std::size_t> swap{1, 0};
  EXPECT_EQ(rename(sc("(app (var 0) (var 1))", 2), swap, 2), sc("(app (var 1) (var 0))", 2));
  EXPECT_THROW(rename(mk_var(0, 1), two, 2), ScopeError);
  std::vector<std::size_t> short_rho{};
  EXPECT_THROW(rename(mk_var(0, 1), short_rho, 2), ScopeError);
}

TEST(Rename, AgreesWithNamedOracle) {
  TermEnumerator terms(lc);
  for (std::size_t m = 0; m <= 2; ++m)
    for (const auto& t : terms.up_to(m, 5))
      for (std::size_t n = 1; n <= 3; ++n)
        detail::for_each_tuple(n, m, [&](const std::vector<std::size_t>& rho) {
          EXPECT_EQ(rename(t, rho, n).tree, oracle::rename(t.tree, m, rho, n)) << show_scoped(t);
        });
}

TEST(Rename, IsSubstitutionByVariables) {
  TermEnumerator terms(lc);
  for (std::size_t m = 0; m <= 2; ++m)
    for (const auto& t : terms.up_to(m, 5))
      detail::for_each_tuple(3, m, [&](const std::vector<std::size_t>& rho) {
        EXPECT_EQ(rename(t, rho, 3), substitute(t, renaming_subst(rho, 3)));
      });
}

TEST(Weaken, Examples) {
  EXPECT_EQ(weaken(mk_var(0, 1), 2), mk_var(0, 3));
  auto id = sc("(abs (var 0))", 0);
  EXPECT_EQ(weaken(id, 5), (ScopedTerm{id.tree, 5}));
  auto t = sc("(app (var 1) (var 0))", 2);
  EXPECT_EQ(weaken(t, 0), t);
}

TEST(Subst, IdentityAndLift) {
  EXPECT_TRUE(identity_subst(0).entries.empty());
  EXPECT_EQ(identity_subst(2).entries, (std::vector<Term>{Term::var(0), Term::var(1)}));
  auto u = sc("(app (var 0) (abs (var 1)))", 1);
  Subst s = make_subst({u}, 1);
  Subst l = lift_subst(s, 1);
  EXPECT_EQ(l.target, 2u);
  EXPECT_EQ(l.entries, (std::vector<Term>{Term::var(0), term("(app (var 1) (abs (var 2)))")}));
  for (std::size_t n = 0; n <= 3; ++n)
    for (std::size_t k = 0; k <= 3; ++k) EXPECT_EQ(lift_subst(identity_subst(n), k), identity_subst(n + k));
}

TEST(Subst, LiftTwiceIsLiftByTwo) {
  TermEnumerator terms(lc);
  for (std::size_t m = 0; m <= 2; ++m)
    for (std::size_t n = 0; n <= 2; ++n) {
      auto pool = terms.up_to(n, 3);
      detail::for_each_tuple(pool.size(), m, [&](const std::vector<std::size_t>& idx) {
        Subst s{{}, n};
        for (auto i : idx) s.entries.push_back(pool[i].tree);
        EXPECT_EQ(lift_subst(lift_subst(s, 1), 1), lift_subst(s, 2));
      });
    }
}

TEST(Substitute, WorkedExamples) {
  auto id = sc("(abs (var 0))", 0);
  auto t = sc("(app (var 0) (abs (var 0)))", 1);
  EXPECT_EQ(substitute(t, make_subst({id}, 0)), sc("(app (abs (var 0)) (abs (var 0)))", 0));

  // Under a binder the entry is shifted past the bound variable.
  auto u = sc("(app (var 0) (var 1))", 2);
  auto under = sc("(abs (var 1))", 1);
  EXPECT_EQ(substitute(under, make_subst({u}, 2)), sc("(abs (app (var 1) (var 2)))", 2));
}

TEST(Substitute, IdentityIsNeutral) {
  TermEnumerator terms(lc);
  for (std::size_t n = 0; n <= 3; ++n)
    for (const auto& t : terms.up_to(n, 5)) EXPECT_EQ(substitute(t, identity_subst(n)), t);
}

TEST(Substitute, LengthMismatch) {
  auto t = sc("(var 0)", 1);
  EXPECT_THROW(substitute(t, identity_subst(2)), ScopeError);
  EXPECT_THROW(make_subst({sc("(var 1)", 2)}, 1), ScopeError);
}

TEST(Substitute, AgreesWithNamedOracle) {
  TermEnumerator terms(lc);
  for (std::size_t m = 0; m <= 2; ++m)
    for (const auto& t : terms.up_to(m, 5))
      for (std::size_t n = 0; n <= 2; ++n) {
        auto pool = terms.up_to(n, 3);
        detail::for_each_tuple(pool.size(), m, [&](const std::vector<std::size_t>& idx) {
          std::vector<Term> image;
          for (auto i : idx) image.push_back(pool[i].tree);
          Subst s{image, n};
          EXPECT_EQ(substitute(t, s).tree, oracle::substitute(t.tree, m, image, n))
              << show_scoped(t) << " " << detail::show_subst(s);
        });
      }
}

TEST(Compose, UnitsAndAssociativitySamples) {
  Rng rng(7);
  TermSampler sampler(lc);
  auto random_subst = [&](std::size_t m, std::size_t n) {
    Subst s{{}, n};
    for (std::size_t i = 0; i < m; ++i) s.entries.push_back(sampler.up_to(n, 6, rng)->tree);
    return s;
  };
  for (int k = 0; k < 1000; ++k) {
    std::size_t m = random_below(rng, 3), n = 1 + random_below(rng, 3), p = 1 + random_below(rng, 3);
    auto t = *sampler.up_to(m, 7, rng);
    Subst s = random_subst(m, n), d = random_subst(n, p);
    EXPECT_EQ(compose_subst(s, identity_subst(n)), s);
    EXPECT_EQ(compose_subst(identity_subst(m), s), s);
    EXPECT_EQ(substitute(t, compose_subst(s, d)), substitute(substitute(t, s), d));
  }
  EXPECT_THROW(compose_subst(identity_subst(2), identity_subst(3)), ScopeError);
}

TEST(Enumerate, SmallCases) {
  EXPECT_TRUE(enumerate_terms(lc, 0, 1).empty());
  EXPECT_EQ(enumerate_terms(lc, 1, 1), (std::vector<ScopedTerm>{mk_var(0, 1)}));
  EXPECT_EQ(enumerate_terms(lc, 0, 2), (std::vector<ScopedTerm>{sc("(abs (var 0))", 0)}));
  auto three = enumerate_terms(lc, 0, 3);
  std::vector<std::string> printed;
  for (const auto& t : three) printed.push_back(print_term(t));
  EXPECT_EQ(printed, (std::vector<std::string>{"(abs (var 0))", "(abs (abs (var 0)))", "(abs (abs (var 1)))"}));
}

TEST(Enumerate, MatchesBruteForceFilter) {
  auto check = [](const BindingSignature& sig) {
    TermEnumerator terms(sig);
    std::size_t widest = 1;
    for (const auto& e : sig.entries())
      for (auto k : e.arity.binders) widest = std::max(widest, k);
    for (std::size_t n = 0; n <= 2; ++n)
      for (std::size_t size = 1; size <= 6; ++size) {
        const auto& got = terms.exact(n, size);
        std::set<std::string> unique;
        for (const auto& t : got) {
          EXPECT_EQ(t.size(), size);
          EXPECT_TRUE(oracle::well_scoped(t, n));
          EXPECT_NO_THROW(make_scoped(sig, t, n));
          unique.insert(print_term(t));
        }
        EXPECT_EQ(unique.size(), got.size()) << "duplicates at scope " << n << " size " << size;
        std::set<std::string> expected;
        for (const auto& t : oracle::all_trees(sig, size, n + widest * size))
          if (oracle::well_scoped(t, n)) expected.insert(print_term(t));
        EXPECT_EQ(unique, expected) << "scope " << n << " size " << size;
      }
  };
  check(lc);
  check(BindingSignature{{"bin", {0, 0}}});
  check(BindingSignature{{"c", {}}, {"let", {0, 1}}, {"lam2", {2}}});
  check(BindingSignature{});
}

TEST(Enumerate, SamplerCountsMatchEnumeration) {
  TermEnumerator terms(lc);
  TermSampler sampler(lc);
  for (std::size_t n = 0; n <= 2; ++n)
    for (std::size_t size = 1; size <= 7; ++size) EXPECT_EQ(sampler.count(n, size), terms.exact(n, size).size());
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto t = sampler.exact(1, 5, rng);
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->size(), 5u);
    EXPECT_TRUE(oracle::well_scoped(*t, 1));
  }
  EXPECT_FALSE(sampler.exact(0, 1, rng).has_value());
}

TEST(Enumerate, DeterministicOrder) {
  EXPECT_EQ(enumerate_terms(lc, 2, 5), enumerate_terms(lc, 2, 5));
}
