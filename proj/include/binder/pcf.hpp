#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "binder/signature.hpp"
#include "binder/term.hpp"
#include "binder/typed_signature.hpp"
#include "binder/typed_term.hpp"
#include "binder/unscoped.hpp"

namespace binder {

namespace ulc {

inline Term var(std::size_t i) { return Term::var(i); }
inline Term app(Term f, Term a) { return Term::op("app", {std::move(f), std::move(a)}, {0, 0}); }
inline Term abs(Term body) { return Term::op("abs", {std::move(body)}, {1}); }

}  // namespace ulc

/// Closed lambda terms used to interpret the PCF constants.
struct UlcStdlib {
  UnscopedTerm church_true;   // \t.\f. t
  UnscopedTerm church_false;  // \t.\f. f
  UnscopedTerm church_succ;   // \n.\f.\x. f (n f x)
  UnscopedTerm church_pred;   // \n.\f.\x. n (\g.\h. h (g f)) (\u. x) (\u. u)
  UnscopedTerm church_if;     // \b.\t.\f. b t f
  UnscopedTerm y_comb;        // \f. (\x. f (x x)) (\x. f (x x))

  /// \f.\x. f (f (... x))
  static UnscopedTerm church_nat(std::size_t n) {
    using namespace ulc;
    Term body = var(0);
    for (std::size_t i = 0; i < n; ++i) body = app(var(1), body);
    return {abs(abs(body))};
  }
};

inline UlcStdlib ulc_stdlib() {
  using namespace ulc;
  // Under \n.\f.\x: n=2, f=1, x=0. Inside \g.\h: h=0, g=1, f=3.
  Term step = abs(abs(app(var(0), app(var(1), var(3)))));
  Term half = abs(app(var(1), app(var(0), var(0))));
  return UlcStdlib{
      .church_true = {abs(abs(var(1)))},
      .church_false = {abs(abs(var(0)))},
      .church_succ = {abs(abs(abs(app(var(1), app(app(var(2), var(1)), var(0))))))},
      .church_pred = {abs(abs(abs(app(app(app(var(2), step), abs(var(1))), abs(var(0))))))},
      .church_if = {abs(abs(abs(app(app(var(2), var(1)), var(0)))))},
      .y_comb = {abs(app(half, half))},
  };
}

/// The untyped lambda calculus carried as a model of PCF retyped to `star`:
/// constants become closed Church encodings and fix_t u becomes Y u. Values
/// are unscoped terms; contexts only contribute their length.
inline TypedModel<UnscopedTerm> ulc_pcf_model() {
  UlcStdlib lib = ulc_stdlib();
  TypedModel<UnscopedTerm> m;
  m.name = "ulc";
  m.var = [](std::size_t i, const Context& ctx) {
    if (i >= ctx.size()) throw ScopeError("index " + std::to_string(i) + " out of context");
    return UnscopedTerm{Term::var(i)};
  };
  m.op = [lib](const Label& label, std::span<const UnscopedTerm> args, const Context&) -> UnscopedTerm {
    const std::string& n = label.name;
    if (n == "app") return {ulc::app(args[0].tree, args[1].tree)};
    if (n == "abs") return {ulc::abs(args[0].tree)};
    if (n == "true") return lib.church_true;
    if (n == "false") return lib.church_false;
    if (n == "zero") return UlcStdlib::church_nat(0);
    if (n == "succ") return lib.church_succ;
    if (n == "pred") return lib.church_pred;
    if (n == "if_bool" || n == "if_nat") return lib.church_if;
    if (n == "fix") return {ulc::app(lib.y_comb.tree, args[0].tree)};
    throw SignatureError("no lambda interpretation for " + print_label(label));
  };
  m.subst = [](const UnscopedTerm& v, std::span<const UnscopedTerm> entries, const Context& target) {
    UnscopedSubst f{{}, target.size()};
    for (const auto& e : entries) f.prefix.push_back(e.tree);
    return usubst(v, f);
  };
  m.show = [](const UnscopedTerm& v) { return print_term(v); };
  return m;
}

/// Collapses every PCF type to `star`.
inline TypeMap pcf_erasure() {
  return TypeMap::constant(types::pcf_grammar(), types::ulc_grammar(), types::star());
}

/// PCF retyped along the erasure, with the lambda model and the identity label map.
inline ExtendedModel<UnscopedTerm> pcf_ulc_extended_model() {
  TypeMap g = pcf_erasure();
  return {retype_signature(g, pcf_signature()), SigMorphism{g, [](const Label& l) { return l; }}, ulc_pcf_model(), 3};
}

/// Translates a well-typed PCF term into the untyped lambda calculus.
inline UnscopedTerm pcf_to_ulc(const TypedTerm& t) {
  static const Translator<UnscopedTerm> translator(pcf_ulc_extended_model(), pcf_signature());
  return translator(t);
}

/// Result of normalisation: the normal form, or nothing when fuel ran out.
struct NormalizeResult {
  std::optional<UnscopedTerm> normal;
  std::size_t steps = 0;

  bool exhausted() const { return !normal.has_value(); }
};

namespace detail {

inline bool is_ulc_app(const Term& t) { return t.is_op() && t.label() == "app"; }
inline bool is_ulc_abs(const Term& t) { return t.is_op() && t.label() == "abs"; }

/// One leftmost-outermost beta step; nullopt when `t` is normal.
inline std::optional<Term> normal_order_step(const Term& t) {
  if (t.is_var()) return std::nullopt;
  if (is_ulc_abs(t)) {
    if (auto body = normal_order_step(t.args()[0])) return ulc::abs(*body);
    return std::nullopt;
  }
  if (!is_ulc_app(t)) throw ScopeError("beta_normalize: unexpected operator '" + t.label() + "'");
  const Term& f = t.args()[0];
  const Term& a = t.args()[1];
  if (is_ulc_abs(f)) return subst_tree(f.args()[0], UnscopedSubst{{a}, 0});
  if (auto g = normal_order_step(f)) return ulc::app(*g, a);
  if (auto b = normal_order_step(a)) return ulc::app(f, *b);
  return std::nullopt;
}

}  // namespace detail

/// Normal-order beta reduction with at most `fuel` contractions.
inline NormalizeResult beta_normalize(const UnscopedTerm& t, std::size_t fuel = 10000) {
  NormalizeResult result;
  Term current = t.tree;
  for (;;) {
    auto next = detail::normal_order_step(current);
    if (!next) {
      result.normal = UnscopedTerm{current};
      return result;
    }
    if (result.steps == fuel) return result;
    ++result.steps;
    current = std::move(*next);
  }
}

}  // namespace binder
