#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binder/error.hpp"
#include "binder/sexpr.hpp"
#include "binder/typed_signature.hpp"

namespace binder {

/// Raw syntax over a typed signature: variables and labelled operators.
/// Well-typedness is established separately by `typecheck`.
class TypedTree {
public:
  static TypedTree var(std::size_t index) {
    auto node = std::make_shared<Node>();
    node->is_var = true;
    node->index = index;
    return TypedTree(std::move(node));
  }

  static TypedTree op(Label label, std::vector<TypedTree> args) {
    auto node = std::make_shared<Node>();
    node->label = std::move(label);
    for (const auto& a : args) node->size += a.size();
    node->args = std::move(args);
    return TypedTree(std::move(node));
  }

  bool is_var() const { return node_->is_var; }
  std::size_t index() const { return node_->index; }
  const Label& label() const { return node_->label; }
  const std::vector<TypedTree>& args() const { return node_->args; }
  std::size_t size() const { return node_->size; }

  friend bool operator==(const TypedTree& a, const TypedTree& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.is_var != y.is_var || x.size != y.size) return false;
    if (x.is_var) return x.index == y.index;
    return x.label == y.label && x.args == y.args;
  }

private:
  struct Node {
    bool is_var = false;
    std::size_t index = 0;
    Label label;
    std::vector<TypedTree> args;
    std::size_t size = 1;
  };

  explicit TypedTree(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// `(var i)` or `(op <name> (<type>...) <arg>...)`.
inline std::string print_typed(const TypedTree& t) {
  if (t.is_var()) return "(var " + std::to_string(t.index()) + ")";
  std::string out = "(op " + t.label().name + " (";
  for (std::size_t i = 0; i < t.label().params.size(); ++i) out += (i ? " " : "") + print_type(t.label().params[i]);
  out += ")";
  for (const auto& a : t.args()) out += " " + print_typed(a);
  return out + ")";
}

inline TypedTree typed_from_sexpr(const sexpr::Node& node) {
  const auto& items = node.expect_list();
  if (items.empty()) node.fail("empty term");
  const std::string& head = items.front().expect_atom();
  if (head == "var") {
    if (items.size() != 2) node.fail("expected (var <index>)");
    return TypedTree::var(items[1].expect_nat());
  }
  if (head != "op" || items.size() < 3) node.fail("expected (var <i>) or (op <name> (<type>...) <arg>...)");
  Label label{items[1].expect_atom(), {}};
  for (const auto& p : items[2].expect_list()) label.params.push_back(type_from_sexpr(p));
  std::vector<TypedTree> args;
  for (std::size_t i = 3; i < items.size(); ++i) args.push_back(typed_from_sexpr(items[i]));
  return TypedTree::op(std::move(label), std::move(args));
}

inline TypedTree parse_typed(std::string_view text) { return typed_from_sexpr(sexpr::read_one(text)); }

namespace detail {

inline std::string child_path(const std::string& path, std::size_t j) {
  return path.empty() ? std::to_string(j) : path + "." + std::to_string(j);
}

inline Context extend(const std::vector<TypeExpr>& bound, const Context& ctx) {
  Context out = bound;
  out.insert(out.end(), ctx.begin(), ctx.end());
  return out;
}

inline TypeExpr typecheck_at(const TypedSignature& sig, const Context& ctx, const TypedTree& t,
                             const std::string& path) {
  if (t.is_var()) {
    if (t.index() >= ctx.size())
      throw TypeError("unbound index " + std::to_string(t.index()) + " in context of length " +
                      std::to_string(ctx.size()),
                      path);
    return ctx[t.index()];
  }
  if (!sig.has_label(t.label())) throw TypeError("unknown label " + print_label(t.label()), path);
  TypedArity arity = sig.arity_of(t.label());
  if (arity.args.size() != t.args().size())
    throw TypeError(print_label(t.label()) + " expects " + std::to_string(arity.args.size()) + " arguments, got " +
                        std::to_string(t.args().size()),
                    path);
  for (std::size_t j = 0; j < arity.args.size(); ++j) {
    std::string sub = child_path(path, j);
    TypeExpr got = typecheck_at(sig, extend(arity.args[j].bound, ctx), t.args()[j], sub);
    if (!(got == arity.args[j].type))
      throw TypeError("argument of " + print_label(t.label()) + " has type " + print_type(got) + ", expected " +
                          print_type(arity.args[j].type),
                      sub);
  }
  return arity.result;
}

/// Free index i maps to `image(i)` shifted past the binders crossed.
template <class Image>
TypedTree typed_subst_tree(const TypedSignature& sig, const TypedTree& t, const Image& image, std::size_t depth = 0);

inline TypedTree typed_shift(const TypedSignature& sig, const TypedTree& t, std::size_t k, std::size_t depth = 0) {
  if (k == 0) return t;
  if (t.is_var()) return t.index() < depth ? t : TypedTree::var(t.index() + k);
  TypedArity arity = sig.arity_of(t.label());
  std::vector<TypedTree> args;
  for (std::size_t j = 0; j < t.args().size(); ++j)
    args.push_back(typed_shift(sig, t.args()[j], k, depth + arity.args[j].bound.size()));
  return TypedTree::op(t.label(), std::move(args));
}

template <class Image>
TypedTree typed_subst_tree(const TypedSignature& sig, const TypedTree& t, const Image& image, std::size_t depth) {
  if (t.is_var()) return t.index() < depth ? t : typed_shift(sig, image(t.index() - depth), depth);
  TypedArity arity = sig.arity_of(t.label());
  std::vector<TypedTree> args;
  for (std::size_t j = 0; j < t.args().size(); ++j)
    args.push_back(typed_subst_tree(sig, t.args()[j], image, depth + arity.args[j].bound.size()));
  return TypedTree::op(t.label(), std::move(args));
}

}  // namespace detail

/// The type of `t` in `ctx`; throws TypeError with the failing argument path.
inline TypeExpr typecheck(const TypedSignature& sig, const Context& ctx, const TypedTree& t) {
  for (const auto& u : ctx)
    if (!sig.types().well_formed(u)) throw TypeError("context type " + print_type(u) + " is not in the grammar", "");
  return detail::typecheck_at(sig, ctx, t, "");
}

/// A well-typed term with its context and type.
struct TypedTerm {
  TypedTree tree;
  Context ctx;
  TypeExpr type;

  friend bool operator==(const TypedTerm&, const TypedTerm&) = default;
};

inline TypedTerm make_typed(const TypedSignature& sig, Context ctx, TypedTree tree) {
  TypeExpr type = typecheck(sig, ctx, tree);
  return {std::move(tree), std::move(ctx), std::move(type)};
}

/// Entry i is a term of type source[i] in context `target`.
struct TypedSubst {
  std::vector<TypedTree> entries;
  Context target;
};

inline TypedSubst typed_identity(const Context& ctx) {
  TypedSubst s{{}, ctx};
  for (std::size_t i = 0; i < ctx.size(); ++i) s.entries.push_back(TypedTree::var(i));
  return s;
}

/// Capture-avoiding substitution; checks every entry against its variable's type.
inline TypedTerm typed_substitute(const TypedSignature& sig, const TypedTerm& t, const TypedSubst& s) {
  if (s.entries.size() != t.ctx.size())
    throw TypeError("substitution has " + std::to_string(s.entries.size()) + " entries for a context of length " +
                        std::to_string(t.ctx.size()),
                    "");
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    TypeExpr got = typecheck(sig, s.target, s.entries[i]);
    if (!(got == t.ctx[i]))
      throw TypeError("substitution entry " + std::to_string(i) + " has type " + print_type(got) + ", expected " +
                          print_type(t.ctx[i]),
                      "");
  }
  TypedTree tree = detail::typed_subst_tree(sig, t.tree, [&](std::size_t i) -> const TypedTree& { return s.entries[i]; });
  return {std::move(tree), s.target, t.type};
}

/// Entrywise substitution of `second` into `first`.
inline TypedSubst typed_compose(const TypedSignature& sig, const Context& source, const TypedSubst& first,
                                const TypedSubst& second) {
  TypedSubst out{{}, second.target};
  for (std::size_t i = 0; i < first.entries.size(); ++i)
    out.entries.push_back(typed_substitute(sig, TypedTerm{first.entries[i], first.target, source[i]}, second).tree);
  return out;
}

/// A model of a typed signature: values indexed by context, with typed
/// interpretations of variables, operators and substitution.
template <class V>
struct TypedModel {
  using Value = V;

  std::string name;
  std::function<V(std::size_t index, const Context& ctx)> var;
  /// Argument j lives in `bound_j ++ ctx`.
  std::function<V(const Label& label, std::span<const V> args, const Context& ctx)> op;
  std::function<V(const V& value, std::span<const V> entries, const Context& target)> subst;
  std::function<bool(const V&, const V&)> equal;
  std::function<std::string(const V&)> show;
};

template <class V>
bool typed_equal(const TypedModel<V>& m, const V& a, const V& b) {
  if (m.equal) return m.equal(a, b);
  if constexpr (std::equality_comparable<V>)
    return a == b;
  else
    throw Error("model '" + m.name + "' has no equality");
}

template <class V>
V typed_fold(const TypedModel<V>& m, const TypedSignature& sig, const TypedTree& t, const Context& ctx) {
  if (t.is_var()) return m.var(t.index(), ctx);
  TypedArity arity = sig.arity_of(t.label());
  std::vector<V> args;
  for (std::size_t j = 0; j < t.args().size(); ++j)
    args.push_back(typed_fold(m, sig, t.args()[j], detail::extend(arity.args[j].bound, ctx)));
  return m.op(t.label(), args, ctx);
}

template <class V>
V typed_fold(const TypedModel<V>& m, const TypedSignature& sig, const TypedTerm& t) {
  return typed_fold(m, sig, t.tree, t.ctx);
}

inline TypedModel<TypedTerm> typed_syntax_model(const TypedSignature& sig) {
  TypedModel<TypedTerm> m;
  m.name = "typed-syntax";
  m.var = [sig](std::size_t i, const Context& ctx) { return make_typed(sig, ctx, TypedTree::var(i)); };
  m.op = [sig](const Label& label, std::span<const TypedTerm> args, const Context& ctx) {
    std::vector<TypedTree> trees;
    for (const auto& a : args) trees.push_back(a.tree);
    return make_typed(sig, ctx, TypedTree::op(label, std::move(trees)));
  };
  m.subst = [sig](const TypedTerm& v, std::span<const TypedTerm> entries, const Context& target) {
    TypedSubst s{{}, target};
    for (const auto& e : entries) s.entries.push_back(e.tree);
    return typed_substitute(sig, v, s);
  };
  m.show = [](const TypedTerm& v) { return print_typed(v.tree) + " : " + print_type(v.type); };
  return m;
}

/// Pulls a model of `target` back along a morphism into `source`: the value
/// family at a context is the target family at the retyped context, operators
/// are interpreted through the label map.
///
/// Throws SignatureError when the morphism fails its arity check at `depth`.
template <class V>
TypedModel<V> pullback_model(const SigMorphism& morphism, const TypedSignature& source, const TypedSignature& target,
                             const TypedModel<V>& model, std::size_t depth = 2) {
  MorphismReport report = check_morphism(morphism, source, target, depth);
  if (!report.passed())
    throw SignatureError("signature morphism is not compatible with arities: " +
                         print_label(report.violations.front().source));
  TypedModel<V> out;
  out.name = model.name + "|pullback";
  TypeMap g = morphism.types;
  auto h = morphism.labels;
  out.var = [model, g](std::size_t i, const Context& ctx) { return model.var(i, g(ctx)); };
  out.op = [model, g, h](const Label& label, std::span<const V> args, const Context& ctx) {
    return model.op(h(label), args, g(ctx));
  };
  out.subst = [model, g](const V& v, std::span<const V> entries, const Context& ctx) {
    return model.subst(v, entries, g(ctx));
  };
  out.equal = model.equal;
  out.show = model.show;
  return out;
}

/// A model of another typed signature reached through a morphism.
template <class V>
struct ExtendedModel {
  TypedSignature target;
  SigMorphism morphism;
  TypedModel<V> model;
  std::size_t check_depth = 2;
};

/// The initial morphism into the pulled-back model.
template <class V>
V translate(const ExtendedModel<V>& e, const TypedSignature& source, const TypedTerm& t) {
  return typed_fold(pullback_model(e.morphism, source, e.target, e.model, e.check_depth), source, t);
}

/// Translates many terms through a single pullback.
template <class V>
class Translator {
public:
  Translator(const ExtendedModel<V>& e, TypedSignature source)
      : source_(std::move(source)), model_(pullback_model(e.morphism, source_, e.target, e.model, e.check_depth)) {}

  V operator()(const TypedTerm& t) const { return typed_fold(model_, source_, t); }
  const TypedModel<V>& model() const { return model_; }

private:
  TypedSignature source_;
  TypedModel<V> model_;
};

}  // namespace binder
