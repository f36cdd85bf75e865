#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binder/error.hpp"
#include "binder/sexpr.hpp"

namespace binder {

/// A type: a base-type name, or a type constructor applied to types.
struct TypeExpr {
  std::string head;
  std::vector<TypeExpr> args;

  static TypeExpr base(std::string name) { return {std::move(name), {}}; }
  static TypeExpr arrow(TypeExpr from, TypeExpr to) { return {"=>", {std::move(from), std::move(to)}}; }

  bool is_base() const { return args.empty(); }
  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& a : args) d = std::max(d, a.depth());
    return d + 1;
  }

  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

/// `bool`, `(=> nat nat)`.
inline std::string print_type(const TypeExpr& t) {
  if (t.args.empty()) return t.head;
  std::string out = "(" + t.head;
  for (const auto& a : t.args) out += " " + print_type(a);
  return out + ")";
}

inline TypeExpr type_from_sexpr(const sexpr::Node& node) {
  if (node.is_atom()) {
    if (node.atom.empty()) node.fail("empty type");
    return TypeExpr::base(node.atom);
  }
  const auto& items = node.items;
  if (items.empty()) node.fail("empty type expression");
  TypeExpr t{items.front().expect_atom(), {}};
  if (items.size() == 1) node.fail("type constructor '" + t.head + "' applied to nothing");
  for (std::size_t i = 1; i < items.size(); ++i) t.args.push_back(type_from_sexpr(items[i]));
  return t;
}

inline TypeExpr parse_type(std::string_view text) { return type_from_sexpr(sexpr::read_one(text)); }

/// A context: index 0 is the most recently bound variable.
using Context = std::vector<TypeExpr>;

/// Accepts `(nat bool)` or `nat bool`; an empty string is the empty context.
inline Context parse_context(std::string_view text) {
  Context ctx;
  auto nodes = sexpr::read_all(text);
  bool wrapped = nodes.size() == 1 && nodes.front().is_list &&
                 (nodes.front().items.empty() || !nodes.front().items.front().is_atom("=>"));
  for (const auto& n : wrapped ? nodes.front().items : nodes) ctx.push_back(type_from_sexpr(n));
  return ctx;
}

inline std::string print_context(const Context& ctx) {
  std::string out = "(";
  for (std::size_t i = 0; i < ctx.size(); ++i) out += (i ? " " : "") + print_type(ctx[i]);
  return out + ")";
}

/// A set of types: base names closed under constructors of fixed arity.
/// Isolated bases are types of their own that may not occur under a constructor.
struct TypeGrammar {
  std::vector<std::string> bases;
  std::vector<std::pair<std::string, std::size_t>> constructors;
  std::vector<std::string> isolated;

  bool well_formed(const TypeExpr& t) const { return well_formed(t, true); }

  /// All types of depth at most `depth`, shallower first, in declaration order.
  std::vector<TypeExpr> enumerate(std::size_t depth) const {
    std::vector<TypeExpr> out;
    if (depth == 0) return out;
    for (const auto& b : bases) out.push_back(TypeExpr::base(b));
    std::vector<TypeExpr> nested = out;  // allowed under constructors
    for (const auto& b : isolated) out.push_back(TypeExpr::base(b));
    for (std::size_t d = 2; d <= depth; ++d) {
      std::vector<TypeExpr> fresh;
      for (const auto& [name, arity] : constructors) {
        std::vector<std::size_t> idx(arity, 0);
        if (arity == 0 || nested.empty()) continue;
        for (;;) {
          TypeExpr t{name, {}};
          bool reaches_depth = false;
          for (auto i : idx) {
            t.args.push_back(nested[i]);
            reaches_depth = reaches_depth || nested[i].depth() == d - 1;
          }
          if (reaches_depth) fresh.push_back(std::move(t));
          std::size_t j = arity;
          bool done = true;
          while (j > 0) {
            --j;
            if (++idx[j] < nested.size()) {
              done = false;
              break;
            }
            idx[j] = 0;
          }
          if (done) break;
        }
      }
      out.insert(out.end(), fresh.begin(), fresh.end());
      nested.insert(nested.end(), fresh.begin(), fresh.end());
    }
    return out;
  }

  friend bool operator==(const TypeGrammar&, const TypeGrammar&) = default;

private:
  bool well_formed(const TypeExpr& t, bool top) const {
    if (t.args.empty()) {
      if (std::find(bases.begin(), bases.end(), t.head) != bases.end()) return true;
      return top && std::find(isolated.begin(), isolated.end(), t.head) != isolated.end();
    }
    auto it = std::find_if(constructors.begin(), constructors.end(), [&](const auto& c) { return c.first == t.head; });
    if (it == constructors.end() || it->second != t.args.size()) return false;
    return std::all_of(t.args.begin(), t.args.end(), [&](const TypeExpr& a) { return well_formed(a, false); });
  }
};

/// t1^(u1) x ... x tn^(un) -> result
struct TypedArity {
  struct Arg {
    std::vector<TypeExpr> bound;
    TypeExpr type;
    friend bool operator==(const Arg&, const Arg&) = default;
  };
  std::vector<Arg> args;
  TypeExpr result;

  friend bool operator==(const TypedArity&, const TypedArity&) = default;
};

/// `(arg (u...) t) ... -> r`
inline std::string print_arity(const TypedArity& a) {
  std::string out;
  for (const auto& arg : a.args) {
    out += "(arg (";
    for (std::size_t i = 0; i < arg.bound.size(); ++i) out += (i ? " " : "") + print_type(arg.bound[i]);
    out += ") " + print_type(arg.type) + ") ";
  }
  return out + "-> " + print_type(a.result);
}

/// A constructor name together with its type parameters, e.g. app with (s, t).
struct Label {
  std::string name;
  std::vector<TypeExpr> params;

  friend bool operator==(const Label&, const Label&) = default;
};

inline std::string print_label(const Label& l) {
  if (l.params.empty()) return l.name;
  std::string out = l.name + "[";
  for (std::size_t i = 0; i < l.params.size(); ++i) out += (i ? ", " : "") + print_type(l.params[i]);
  return out + "]";
}

/// A simply-typed binding signature: a type grammar for arities, a grammar for
/// label parameters, and label families whose arity is computed from the
/// parameters. Families with no parameters are single constructors.
class TypedSignature {
public:
  struct Family {
    std::string name;
    std::size_t params = 0;
    /// Extra restriction on well-formed parameters; absent means all admitted.
    std::function<bool(std::span<const TypeExpr>)> admits;
    std::function<TypedArity(std::span<const TypeExpr>)> arity;
  };

  TypedSignature() = default;
  TypedSignature(TypeGrammar types, TypeGrammar param_types)
      : types_(std::move(types)), param_types_(std::move(param_types)) {}

  void add(Family f) {
    if (find(f.name)) throw SignatureError("duplicate label '" + f.name + "'");
    families_.push_back(std::move(f));
  }

  /// A parameterless constructor with a fixed arity.
  void add(std::string name, TypedArity arity) {
    for (const auto& t : arity_types(arity))
      if (!types_.well_formed(t)) throw SignatureError("type " + print_type(t) + " is not in the type grammar");
    add(Family{std::move(name), 0, {}, [arity](std::span<const TypeExpr>) { return arity; }});
  }

  const TypeGrammar& types() const { return types_; }
  const TypeGrammar& param_types() const { return param_types_; }
  const std::vector<Family>& families() const { return families_; }

  const Family* find(std::string_view name) const {
    auto it = std::find_if(families_.begin(), families_.end(), [&](const Family& f) { return f.name == name; });
    return it == families_.end() ? nullptr : &*it;
  }

  bool has_label(const Label& l) const {
    const Family* f = find(l.name);
    if (!f || f->params != l.params.size()) return false;
    for (const auto& p : l.params)
      if (!param_types_.well_formed(p)) return false;
    return !f->admits || f->admits(l.params);
  }

  TypedArity arity_of(const Label& l) const {
    if (!has_label(l)) throw SignatureError("unknown label " + print_label(l));
    return find(l.name)->arity(l.params);
  }

  /// Every label whose parameters have depth at most `depth`.
  std::vector<Label> instances(std::size_t depth) const {
    std::vector<Label> out;
    std::vector<TypeExpr> params = param_types_.enumerate(depth);
    for (const auto& f : families_) {
      std::vector<std::size_t> idx(f.params, 0);
      if (f.params > 0 && params.empty()) continue;
      for (;;) {
        Label l{f.name, {}};
        for (auto i : idx) l.params.push_back(params[i]);
        if (!f.admits || f.admits(l.params)) out.push_back(std::move(l));
        std::size_t j = f.params;
        bool done = true;
        while (j > 0) {
          --j;
          if (++idx[j] < params.size()) {
            done = false;
            break;
          }
          idx[j] = 0;
        }
        if (done) break;
      }
    }
    return out;
  }

  static std::vector<TypeExpr> arity_types(const TypedArity& a) {
    std::vector<TypeExpr> out;
    for (const auto& arg : a.args) {
      out.insert(out.end(), arg.bound.begin(), arg.bound.end());
      out.push_back(arg.type);
    }
    out.push_back(a.result);
    return out;
  }

private:
  TypeGrammar types_;
  TypeGrammar param_types_;
  std::vector<Family> families_;
};

/// Same grammars and family names, and equal arities on every instance up to `depth`.
inline bool equivalent(const TypedSignature& a, const TypedSignature& b, std::size_t depth) {
  if (!(a.types() == b.types()) || !(a.param_types() == b.param_types())) return false;
  if (a.families().size() != b.families().size()) return false;
  for (std::size_t i = 0; i < a.families().size(); ++i)
    if (a.families()[i].name != b.families()[i].name || a.families()[i].params != b.families()[i].params) return false;
  auto la = a.instances(depth);
  if (!(la == b.instances(depth))) return false;
  for (const auto& l : la)
    if (!(a.arity_of(l) == b.arity_of(l))) return false;
  return true;
}

/// A function between type grammars.
struct TypeMap {
  TypeGrammar from;
  TypeGrammar to;
  std::function<TypeExpr(const TypeExpr&)> fn;

  TypeExpr operator()(const TypeExpr& t) const {
    if (!from.well_formed(t)) throw TypeError("type " + print_type(t) + " is outside the domain of the type map", "");
    TypeExpr out = fn(t);
    if (!to.well_formed(out)) throw TypeError("type map produced " + print_type(out) + " outside its codomain", "");
    return out;
  }

  Context operator()(const Context& ctx) const {
    Context out;
    out.reserve(ctx.size());
    for (const auto& t : ctx) out.push_back((*this)(t));
    return out;
  }

  static TypeMap identity(const TypeGrammar& g) {
    return {g, g, [](const TypeExpr& t) { return t; }};
  }

  static TypeMap constant(const TypeGrammar& from, const TypeGrammar& to, TypeExpr target) {
    return {from, to, [target](const TypeExpr&) { return target; }};
  }
};

/// `second` after `first`.
inline TypeMap compose(const TypeMap& first, const TypeMap& second) {
  return {first.from, second.to, [first, second](const TypeExpr& t) { return second(first(t)); }};
}

inline TypedArity retype_arity(const TypeMap& g, const TypedArity& a) {
  TypedArity out;
  for (const auto& arg : a.args) {
    TypedArity::Arg moved;
    for (const auto& u : arg.bound) moved.bound.push_back(g(u));
    moved.type = g(arg.type);
    out.args.push_back(std::move(moved));
  }
  out.result = g(a.result);
  return out;
}

/// Same labels over the codomain grammar, each arity retyped along g.
inline TypedSignature retype_signature(const TypeMap& g, const TypedSignature& s) {
  TypedSignature out(g.to, s.param_types());
  for (const auto& f : s.families()) {
    auto arity = f.arity;
    out.add(TypedSignature::Family{f.name, f.params, f.admits,
                                   [g, arity](std::span<const TypeExpr> p) { return retype_arity(g, arity(p)); }});
  }
  return out;
}

/// A morphism of typed signatures: a type map and a label map.
struct SigMorphism {
  TypeMap types;
  std::function<Label(const Label&)> labels;

  static SigMorphism identity(const TypedSignature& s) {
    return {TypeMap::identity(s.types()), [](const Label& l) { return l; }};
  }
};

struct MorphismReport {
  struct Violation {
    Label source;
    Label target;
    TypedArity expected;  // retyped source arity
    TypedArity actual;    // arity of the target label
  };
  std::size_t depth = 0;
  std::size_t checked = 0;
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
};

inline std::string format_morphism_report(const MorphismReport& r) {
  std::string out = "MORPHISM " + std::string(r.passed() ? "PASS" : "FAIL") + " depth=" + std::to_string(r.depth) +
                    " labels=" + std::to_string(r.checked) + "\n";
  for (const auto& v : r.violations) {
    out += "  " + print_label(v.source) + " -> " + print_label(v.target) + "\n";
    out += "    expected " + print_arity(v.expected) + "\n";
    out += "    actual   " + print_arity(v.actual) + "\n";
  }
  return out;
}

/// Checks that the target arity of h(i) is the retyping of the arity of i, for
/// every label of `source` with parameters of depth at most `depth`.
///
/// Throws SignatureError when h produces a label unknown to `target`.
inline MorphismReport check_morphism(const SigMorphism& m, const TypedSignature& source, const TypedSignature& target,
                                     std::size_t depth) {
  if (depth == 0) throw Error("morphism check needs a type depth of at least 1");
  MorphismReport report;
  report.depth = depth;
  for (const auto& label : source.instances(depth)) {
    Label mapped = m.labels(label);
    if (!target.has_label(mapped))
      throw SignatureError("label map sends " + print_label(label) + " to unknown label " + print_label(mapped));
    ++report.checked;
    TypedArity expected = retype_arity(m.types, source.arity_of(label));
    TypedArity actual = target.arity_of(mapped);
    if (!(expected == actual)) report.violations.push_back({label, mapped, std::move(expected), std::move(actual)});
  }
  return report;
}

namespace types {

inline TypeExpr boolean() { return TypeExpr::base("bool"); }
inline TypeExpr nat() { return TypeExpr::base("nat"); }
inline TypeExpr star() { return TypeExpr::base("star"); }
inline TypeExpr arrow(TypeExpr a, TypeExpr b) { return TypeExpr::arrow(std::move(a), std::move(b)); }

/// a1 => a2 => ... => r
inline TypeExpr arrows(std::initializer_list<TypeExpr> ts) {
  std::vector<TypeExpr> v(ts);
  TypeExpr out = v.back();
  for (std::size_t i = v.size() - 1; i-- > 0;) out = arrow(v[i], out);
  return out;
}

inline TypeGrammar pcf_grammar() { return {{"bool", "nat"}, {{"=>", 2}}, {}}; }
inline TypeGrammar ulc_grammar() { return {{"star"}, {}, {}}; }

}  // namespace types

/// Adds app_{s,t} : (t => s) x t -> s and abs_{s,t} : s^(t) -> (t => s) for
/// all s, t whose arrow type is well formed.
inline void add_lambda_families(TypedSignature& sig) {
  TypeGrammar grammar = sig.types();
  auto arrow_ok = [grammar](std::span<const TypeExpr> p) {
    return grammar.well_formed(types::arrow(p[1], p[0]));
  };
  sig.add({"app", 2, arrow_ok, [](std::span<const TypeExpr> p) {
             return TypedArity{{{{}, types::arrow(p[1], p[0])}, {{}, p[1]}}, p[0]};
           }});
  sig.add({"abs", 2, arrow_ok, [](std::span<const TypeExpr> p) {
             return TypedArity{{{{p[1]}, p[0]}}, types::arrow(p[1], p[0])};
           }});
}

/// Simply-typed lambda calculus over a grammar with `=>`.
inline TypedSignature stlc_signature(const TypeGrammar& grammar) {
  TypedSignature sig(grammar, grammar);
  add_lambda_families(sig);
  return sig;
}

/// PCF over bool and nat: application and abstraction, the boolean and
/// numeral constants, fix_t : (t => t) -> t and the two conditionals.
inline TypedSignature pcf_signature() {
  using namespace types;
  TypedSignature sig(pcf_grammar(), pcf_grammar());
  add_lambda_families(sig);
  sig.add("true", TypedArity{{}, boolean()});
  sig.add("false", TypedArity{{}, boolean()});
  sig.add("zero", TypedArity{{}, nat()});
  sig.add("succ", TypedArity{{}, arrow(nat(), nat())});
  sig.add("pred", TypedArity{{}, arrow(nat(), nat())});
  sig.add({"fix", 1, {}, [](std::span<const TypeExpr> p) {
             return TypedArity{{{{}, types::arrow(p[0], p[0])}}, p[0]};
           }});
  sig.add("if_bool", TypedArity{{}, arrows({boolean(), boolean(), boolean(), boolean()})});
  sig.add("if_nat", TypedArity{{}, arrows({boolean(), nat(), nat(), nat()})});
  return sig;
}

/// Untyped lambda calculus as a typed signature over the single type `star`.
inline TypedSignature ulc_signature() {
  using namespace types;
  TypedSignature sig(ulc_grammar(), ulc_grammar());
  sig.add("app", TypedArity{{{{}, star()}, {{}, star()}}, star()});
  sig.add("abs", TypedArity{{{{star()}, star()}}, star()});
  return sig;
}

/// Parses `(tysig (types <t>...) (op <label> (arg (<bound>...) <type>)... <result>) ...)`.
inline TypedSignature parse_typed_signature(std::string_view text) {
  sexpr::Node root = sexpr::read_one(text);
  const auto& items = root.expect_list();
  if (items.empty() || !items.front().is_atom("tysig")) root.fail("expected (tysig ...)");
  if (items.size() < 2 || !items[1].is_list || items[1].items.empty() || !items[1].items.front().is_atom("types"))
    root.fail("expected (types ...) after tysig");
  TypeGrammar grammar;
  for (std::size_t i = 1; i < items[1].items.size(); ++i) grammar.bases.push_back(items[1].items[i].expect_atom());
  TypedSignature sig(grammar, grammar);
  for (std::size_t i = 2; i < items.size(); ++i) {
    const auto& decl = items[i].expect_list();
    if (decl.size() < 3 || !decl.front().is_atom("op")) items[i].fail("expected (op <label> ... <result>)");
    const std::string& label = decl[1].expect_atom();
    if (sig.find(label)) decl[1].fail("duplicate label '" + label + "'");
    TypedArity arity;
    for (std::size_t j = 2; j + 1 < decl.size(); ++j) {
      const auto& arg = decl[j].expect_list();
      if (arg.size() != 3 || !arg.front().is_atom("arg")) decl[j].fail("expected (arg (<bound>...) <type>)");
      TypedArity::Arg a;
      for (const auto& u : arg[1].expect_list()) a.bound.push_back(type_from_sexpr(u));
      a.type = type_from_sexpr(arg[2]);
      arity.args.push_back(std::move(a));
    }
    arity.result = type_from_sexpr(decl.back());
    for (const auto& t : TypedSignature::arity_types(arity))
      if (!grammar.well_formed(t)) decl[1].fail("type " + print_type(t) + " is not declared");
    sig.add(label, std::move(arity));
  }
  return sig;
}

}  // namespace binder
