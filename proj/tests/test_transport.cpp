#include <gtest/gtest.h>

#include "binder/binder.hpp"
#include "support/oracle.hpp"

using namespace binder;

namespace {

const BindingSignature lc = lc_signature();

TransportOptions quick() {
  TransportOptions o;
  o.samples = 100;
  return o;
}

/// Unscoped syntax whose substitution ignores binders.
DeBruijnModel<UnscopedTerm> broken_monad(const BindingSignature& sig) {
  auto m = unscoped_syntax_model(sig);
  m.name = "broken";
  m.subst = [](const UnscopedTerm& v, const ValueSubst<UnscopedTerm>& f) {
    UnscopedSubst s{{}, f.shift};
    for (const auto& e : f.prefix) s.prefix.push_back(e.tree);
    return UnscopedTerm{detail::map_free(v.tree, [&](std::size_t i, std::size_t) { return s(i); })};
  };
  return m;
}

/// Every scope holds the same single value.
Model<int> constant_model() {
  Model<int> m;
  m.name = "constant";
  m.var = [](std::size_t, std::size_t) { return 0; };
  m.op = [](const std::string&, std::span<const int>, std::size_t) { return 0; };
  m.subst = [](const int& v, std::span<const int>, std::size_t) { return v; };
  m.show = [](const int& v) { return std::to_string(v); };
  return m;
}

}  // namespace

TEST(DeBruijnLaws, UnscopedSyntaxPasses) {
  DeBruijnBounds b;
  for (const auto& r : check_debruijn_laws(unscoped_syntax_model(lc), lc, b)) EXPECT_TRUE(r.passed()) << format_report(r);
}

TEST(DeBruijnLaws, BrokenMonadFails) {
  DeBruijnBounds b;
  auto reports = check_debruijn_laws(broken_monad(lc), lc, b);
  EXPECT_FALSE(all_passed(reports));
}

TEST(SupportProbes, Shape) {
  auto probes = support_probes(1, 3);
  ASSERT_EQ(probes.size(), 5u);  // shifts at 1,2,3 and swaps (1 2), (2 3)
  EXPECT_EQ(probes[0](0), Term::var(0));
  EXPECT_EQ(probes[0](1), Term::var(2));
  EXPECT_EQ(probes[3](1), Term::var(2));
  EXPECT_EQ(probes[3](2), Term::var(1));
  EXPECT_EQ(probes[3](3), Term::var(3));
}

TEST(TransportUnscoped, SyntaxBecomesScopedSyntax) {
  auto t = transport_unscoped_model(unscoped_syntax_model(lc), lc, quick());
  EXPECT_TRUE(all_passed(t.reports));
  EXPECT_TRUE(t.warnings.empty());
  auto syntax = syntax_model(lc);
  TermEnumerator terms(lc);
  for (std::size_t n = 0; n <= 2; ++n)
    for (const auto& s : terms.up_to(n, 6)) {
      UnscopedTerm v = fold(t.model, s);
      EXPECT_EQ(v, to_unscoped(fold(syntax, s)));
      EXPECT_LE(support(v), n);
      EXPECT_EQ(at_scope(to_scoped(v), n), s);
    }
}

TEST(TransportUnscoped, TransportedModelSatisfiesScopedLaws) {
  auto t = transport_unscoped_model(unscoped_syntax_model(lc), lc, quick());
  LawBounds b;
  b.samples = 100;
  for (const auto& r : check_model_laws(t.model, lc, b)) EXPECT_TRUE(r.passed()) << format_report(r);
  EXPECT_TRUE(check_fold_morphism(t.model, lc, b).passed());
}

TEST(TransportUnscoped, BrokenMonadRejectedWithWitness) {
  try {
    transport_unscoped_model(broken_monad(lc), lc, quick());
    FAIL() << "expected rejection";
  } catch (const LawViolation& e) {
    EXPECT_FALSE(e.witness().empty());
  }
}

TEST(TransportUnscoped, EmptyPolicy) {
  BindingSignature bin{{"bin", {0, 0}}};
  auto warned = transport_unscoped_model(unscoped_syntax_model(bin), bin, quick());
  EXPECT_EQ(warned.warnings.size(), 1u);
  auto strict = quick();
  strict.empty = EmptyPolicy::reject;
  EXPECT_THROW(transport_unscoped_model(unscoped_syntax_model(bin), bin, strict), LawViolation);
  EXPECT_TRUE(transport_unscoped_model(unscoped_syntax_model(lc), lc, strict).warnings.empty());
}

TEST(TransportScoped, SyntaxBecomesUnscopedSyntax) {
  auto t = transport_scoped_model(syntax_model(lc), lc, quick());
  EXPECT_TRUE(all_passed(t.reports));
  auto target = unscoped_syntax_model(lc);
  TermEnumerator terms(lc);
  for (const auto& s : terms.up_to(3, 6)) {
    Colim<ScopedTerm> c = ufold(t.model, s.tree);
    UnscopedTerm u = ufold(target, s.tree);
    EXPECT_EQ(to_unscoped(c.value), u);
    EXPECT_EQ(t.model.support(c), support(u)) << print_term(s);
  }
}

TEST(TransportScoped, ColimitEqualityIgnoresScope) {
  auto t = transport_scoped_model(syntax_model(lc), lc, quick());
  Colim<ScopedTerm> a{1, mk_var(0, 1)};
  Colim<ScopedTerm> b{4, mk_var(0, 4)};
  Colim<ScopedTerm> c{4, mk_var(1, 4)};
  EXPECT_TRUE(db_equal(t.model, a, b));
  EXPECT_FALSE(db_equal(t.model, a, c));
}

TEST(TransportScoped, DeBruijnLawsHold) {
  auto t = transport_scoped_model(syntax_model(lc), lc, quick());
  DeBruijnBounds b;
  b.term_nodes = 3;
  b.samples = 50;
  for (const auto& r : check_debruijn_laws(t.model, lc, b)) EXPECT_TRUE(r.passed()) << format_report(r);
}

TEST(TransportScoped, RoundTripIsIdentityUpToColimit) {
  auto there = transport_unscoped_model(unscoped_syntax_model(lc), lc, quick());
  auto back = transport_scoped_model(there.model, lc, quick());
  TermEnumerator terms(lc);
  for (const auto& s : terms.up_to(2, 6)) {
    Colim<UnscopedTerm> c = ufold(back.model, s.tree);
    EXPECT_EQ(c.value, UnscopedTerm{s.tree});
  }
}

TEST(TransportScoped, BrokenModelRejected) {
  EXPECT_THROW(transport_scoped_model(oracle::broken_model(lc), lc, quick()), LawViolation);
}

TEST(TransportScoped, ConstantModelWeakeningsAreIdentities) {
  auto t = transport_scoped_model(constant_model(), lc, quick());
  EXPECT_TRUE(all_passed(t.reports));
  Colim<int> a{0, 0}, b{5, 0};
  EXPECT_TRUE(db_equal(t.model, a, b));
  EXPECT_EQ(t.model.support(b), 0u);
}
