// Command-line front end for the binder library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "binder/binder.hpp"

namespace {

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `lc` names the built-in lambda calculus; anything else is a signature file.
binder::BindingSignature load_signature(const std::string& arg) {
  if (arg == "lc") return binder::lc_signature();
  return binder::parse_signature(read_file(arg));
}

/// A term given inline as an s-expression, or a path to a file holding one.
std::string term_text(const std::string& arg) {
  auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '(') return arg;
  return read_file(arg);
}

/// `(subst <target-scope> <term>...)`
binder::Subst parse_subst_file(const binder::BindingSignature& sig, const std::string& text) {
  auto root = binder::sexpr::read_one(text);
  const auto& items = root.expect_list();
  if (items.size() < 2 || !items.front().is_atom("subst")) root.fail("expected (subst <target-scope> <term>...)");
  std::size_t target = items[1].expect_nat();
  std::vector<binder::ScopedTerm> entries;
  for (std::size_t i = 2; i < items.size(); ++i)
    entries.push_back(binder::make_scoped(sig, binder::term_from_sexpr(sig, items[i]), target));
  return binder::make_subst(entries, target);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abstract syntax with binders: substitution, folds, representations and translation"};
  app.set_version_flag("--version", std::string("binder ") + binder::version);
  app.require_subcommand(1);

  std::string sig_arg, term_arg, subst_arg, to, model_name = "syntax", from_lang, to_lang, term_file, ctx_text;
  std::size_t samples = 1000, max_nodes = 4, scope = 0, fuel = 10000;
  std::uint64_t seed = 42;
  bool normalize = false;

  auto* laws = app.add_subcommand("laws", "Run the substitution, model and representation law suites");
  laws->add_option("signature", sig_arg, "Signature file, or 'lc'")->required();
  laws->add_option("--samples", samples, "Random cases per law")->capture_default_str();
  laws->add_option("--seed", seed, "Random seed")->capture_default_str();
  laws->add_option("--max-nodes", max_nodes, "Exhaustive term size bound")->capture_default_str();

  auto* subst = app.add_subcommand("subst", "Apply a simultaneous substitution to a term");
  subst->add_option("signature", sig_arg, "Signature file, or 'lc'")->required();
  subst->add_option("term", term_arg, "Term s-expression or file")->required();
  subst->add_option("substitution", subst_arg, "File holding (subst <target-scope> <term>...)")->required();
  subst->add_option("--scope", scope, "Scope of the input term")->required();

  auto* convert = app.add_subcommand("convert", "Convert between scoped and unscoped terms");
  convert->add_option("signature", sig_arg, "Signature file, or 'lc'")->required();
  convert->add_option("term", term_arg, "Term s-expression or file")->required();
  convert->add_option("--to", to, "Target representation")->required()->check(CLI::IsMember({"scoped", "unscoped"}));
  auto* convert_scope = convert->add_option("--scope", scope, "Scope of a scoped input term");

  auto* fold = app.add_subcommand("fold", "Fold a term into a model");
  fold->add_option("signature", sig_arg, "Signature file, or 'lc'")->required();
  fold->add_option("term", term_arg, "Term s-expression or file")->required();
  fold->add_option("--model", model_name, "Target model")->check(CLI::IsMember({"syntax", "swap"}))->capture_default_str();
  fold->add_option("--scope", scope, "Scope of the input term")->required();

  auto* translate = app.add_subcommand("translate", "Translate a PCF term into the untyped lambda calculus");
  translate->add_option("--from", from_lang, "Source language")->required()->check(CLI::IsMember({"pcf"}));
  translate->add_option("--to", to_lang, "Target language")->required()->check(CLI::IsMember({"ulc"}));
  translate->add_option("--term", term_file, "File holding the typed term")->required();
  translate->add_option("--ctx", ctx_text, "Context types, innermost first, e.g. \"(nat bool)\"");
  translate->add_flag("--normalize", normalize, "Beta-normalise the translation (normal order)");
  translate->add_option("--fuel", fuel, "Reduction step budget")->capture_default_str();

  auto* enumerate = app.add_subcommand("enumerate", "List all terms up to a size");
  enumerate->add_option("signature", sig_arg, "Signature file, or 'lc'")->required();
  enumerate->add_option("--scope", scope, "Scope")->capture_default_str();
  enumerate->add_option("--max-nodes", max_nodes, "Size bound")->capture_default_str();

  auto* intersect = app.add_subcommand("intersect-check", "Compare closed terms with the 1 => 2 equaliser");
  intersect->add_option("signature", sig_arg, "Signature file, or 'lc'")->required();
  intersect->add_option("--max-nodes", max_nodes, "Size bound")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*laws) {
      auto sig = load_signature(sig_arg);
      auto reports = binder::run_law_suite(sig, {samples, seed, max_nodes});
      for (const auto& r : reports) std::cout << binder::format_report(r);
      return binder::all_passed(reports) ? 0 : kDomainError;
    }
    if (*subst) {
      auto sig = load_signature(sig_arg);
      auto t = binder::parse_scoped(sig, term_text(term_arg), scope);
      auto s = parse_subst_file(sig, read_file(subst_arg));
      std::cout << binder::print_term(binder::substitute(t, s)) << "\n";
      return 0;
    }
    if (*convert) {
      auto sig = load_signature(sig_arg);
      auto tree = binder::parse_term(sig, term_text(term_arg));
      if (to == "scoped") {
        auto s = binder::to_scoped(binder::UnscopedTerm{tree});
        std::cout << binder::print_term(s) << " @" << s.scope << "\n";
      } else {
        binder::UnscopedTerm u{tree};
        auto s = binder::make_scoped(sig, tree, convert_scope->count() ? scope : binder::support(u));
        std::cout << binder::print_term(binder::to_unscoped(s)) << "\n";
      }
      return 0;
    }
    if (*fold) {
      auto sig = load_signature(sig_arg);
      auto t = binder::parse_scoped(sig, term_text(term_arg), scope);
      auto m = model_name == "swap" ? binder::swap_model(sig) : binder::syntax_model(sig);
      std::cout << binder::print_term(binder::fold(m, t)) << "\n";
      return 0;
    }
    if (*translate) {
      auto pcf = binder::pcf_signature();
      auto ctx = binder::parse_context(ctx_text);
      auto t = binder::make_typed(pcf, ctx, binder::parse_typed(read_file(term_file)));
      auto u = binder::pcf_to_ulc(t);
      if (!normalize) {
        std::cout << binder::print_term(u) << "\n";
        return 0;
      }
      auto r = binder::beta_normalize(u, fuel);
      std::cout << (r.exhausted() ? std::string("FUEL-EXHAUSTED") : binder::print_term(*r.normal)) << "\n";
      return 0;
    }
    if (*enumerate) {
      auto sig = load_signature(sig_arg);
      for (const auto& t : binder::enumerate_terms(sig, scope, max_nodes)) std::cout << binder::print_term(t) << "\n";
      return 0;
    }
    if (*intersect) {
      auto r = binder::intersectionality_check(load_signature(sig_arg), max_nodes);
      std::cout << binder::format_intersection(r);
      return r.passed() ? 0 : kDomainError;
    }
  } catch (const binder::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const binder::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return 0;
}
