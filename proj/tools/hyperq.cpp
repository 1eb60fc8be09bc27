// hyperq command-line front end.
//
// Exit codes: 0 holds / success, 1 fails (witness on stdout), 2 usage,
// parse or validation error (one line on stderr).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "hyperq/catalog.hpp"
#include "hyperq/io.hpp"
#include "hyperq/satisfaction.hpp"
#include "hyperq/verify.hpp"

namespace {

using namespace hyperq;

constexpr int kHolds = 0;
constexpr int kFails = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

/// A path to an algebra file, or a catalog name when no such file exists.
FiniteAlgebra load_algebra(const std::string& source) {
  if (std::filesystem::exists(source)) return read_algebra_file(source);
  try {
    return make_catalog_algebra(source);
  } catch (const Error&) {
    throw Error("cannot open '" + source + "' (not a file or catalog name)");
  }
}

Limits resolve_limits(std::optional<std::size_t> max_clone_ops, std::optional<std::size_t> max_arity) {
  Limits limits;
  if (const char* env = std::getenv("HYPERQ_MAX_CLONE_OPS"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw UsageError("HYPERQ_MAX_CLONE_OPS must be a positive integer");
    limits.max_clone_ops = v;
  }
  if (max_clone_ops) limits.max_clone_ops = *max_clone_ops;
  if (max_arity) limits.max_arity = *max_arity;
  if (limits.max_clone_ops == 0 || limits.max_arity == 0) throw UsageError("limits must be positive");
  return limits;
}

std::vector<HornFormula> load_formulas(const std::string& src, const Signature& sig) {
  if (!src.empty() && src[0] == '@') {
    auto formulas = parse_horn_file(read_text_file(src.substr(1)), sig);
    if (formulas.empty()) throw Error("no formulas in '" + src.substr(1) + "'");
    return formulas;
  }
  return {parse_formula(src, sig)};
}

void check_mode(const std::string& mode, const HornFormula& f, std::size_t index) {
  const std::string where = "formula " + std::to_string(index) + ": ";
  const bool plain_mode = mode == "id" || mode == "quasi";
  if (plain_mode && f.is_hyper()) throw UsageError(where + "hypervariables are not allowed in mode " + mode);
  if ((mode == "id" || mode == "hyper") && !f.is_identity()) {
    throw UsageError(where + "premises are not allowed in mode " + mode);
  }
}

Verdict run_check(const std::string& mode, const FiniteAlgebra& a, const HornFormula& f,
                  const Limits& limits) {
  if (mode == "id") return holds_identity(a, f);
  if (mode == "quasi") return holds_quasi(a, f);
  if (mode == "hyper") return holds_hyperidentity(a, f, limits);
  return holds_hyperquasi(a, f, limits);
}

std::string join_elements(std::span<const Element> xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + std::to_string(xs[i]);
  return out;
}

std::string sigma_text(const Hypersubstitution& sigma) {
  std::string out = "sigma{";
  for (std::size_t i = 0; i < sigma.entries.size(); ++i) {
    out += (i ? "," : "") + sigma.entries[i].first + ":=" + to_string(sigma.entries[i].second.witness);
  }
  return out + "}";
}

FilterFamily parse_filter(const std::string& text, std::size_t m) {
  FilterFamily f;
  f.index_size = m;
  std::stringstream members(text);
  std::string member;
  while (std::getline(members, member, ';')) {
    IndexSet s = 0;
    std::stringstream idx(member);
    std::string tok;
    while (std::getline(idx, tok, ',')) {
      if (tok.find_first_not_of(" ") == std::string::npos) continue;
      const unsigned long i = std::stoul(tok);
      if (i >= m) throw UsageError("filter index " + tok + " out of range");
      s |= IndexSet{1} << i;
    }
    f.members.push_back(s);
  }
  std::sort(f.members.begin(), f.members.end());
  f.members.erase(std::unique(f.members.begin(), f.members.end()), f.members.end());
  return f;
}

IndexSet parse_index_set(const std::string& text, std::size_t m) {
  auto f = parse_filter(text, m);
  if (f.members.size() != 1) throw UsageError("expected one index set, e.g. 0,2");
  return f.members.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite algebra calculator for identities, quasi-identities and hyperidentities"};
  app.require_subcommand(1);

  std::optional<std::size_t> max_clone_ops, max_arity;
  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--max-clone-ops", max_clone_ops, "Cap on operations per clone slice");
    cmd->add_option("--max-arity", max_arity, "Largest arity considered");
  };

  // check
  std::string algebra_path, formula_src, mode = "hyperquasi", replay_line;
  auto* check = app.add_subcommand("check", "Decide a formula in an algebra");
  check->add_option("algebra", algebra_path, "Algebra file or catalog name")->required();
  check->add_option("--formula", formula_src, "Formula, or @file with one formula per line")->required();
  check->add_option("--mode", mode, "Satisfaction mode")
      ->check(CLI::IsMember({"id", "quasi", "hyper", "hyperquasi"}));
  check->add_option("--replay", replay_line, "Replay a WITNESS line instead of searching");
  add_limits(check);

  // clone
  std::size_t arity = 2;
  auto* clone = app.add_subcommand("clone", "List the term operations of one arity");
  clone->add_option("algebra", algebra_path)->required();
  clone->add_option("--arity", arity, "Arity of the slice");
  add_limits(clone);

  // derived
  bool dedup = false;
  auto* derived = app.add_subcommand("derived", "List all derived algebras");
  derived->add_option("algebra", algebra_path)->required();
  derived->add_flag("--dedup", dedup, "Skip derived algebras with repeated tables");
  add_limits(derived);

  // product
  std::vector<std::string> factor_paths;
  auto* product = app.add_subcommand("product", "Direct product of algebras");
  product->add_option("algebras", factor_paths, "Factors")->required();

  // subalgebras
  auto* subalgebras = app.add_subcommand("subalgebras", "List all subuniverses");
  subalgebras->add_option("algebra", algebra_path)->required();

  // abelian
  std::size_t abelian_arity = 3;
  auto* abelian = app.add_subcommand("abelian", "Check the term condition");
  abelian->add_option("algebra", algebra_path)->required();
  abelian->add_option("--max-arity", abelian_arity, "Largest term operation arity checked");
  abelian->add_option("--max-clone-ops", max_clone_ops, "Cap on operations per clone slice");

  // reduced-product
  std::string filter_text, principal_text;
  bool ultra = false;
  auto* reduced = app.add_subcommand("reduced-product", "Reduced product over a filter");
  reduced->add_option("algebras", factor_paths, "Factors")->required();
  auto* filter_opt = reduced->add_option("--filter", filter_text, "Filter members, e.g. \"0,1;0,1,2\"");
  reduced->add_option("--principal", principal_text, "Principal filter generator, e.g. \"1\"")
      ->excludes(filter_opt);
  reduced->add_flag("--ultra", ultra, "Require an ultrafilter");

  // verify
  std::string which = "all";
  auto* verify = app.add_subcommand("verify", "Run the built-in verification checks");
  verify->add_option("which", which)->check(CLI::IsMember({"all", "prop41", "prop53", "sec1", "sec3"}));
  verify->add_option("--algebra", algebra_path, "Restrict prop41/prop53 to this algebra");
  add_limits(verify);

  // catalog
  std::string catalog_action, catalog_name;
  auto* catalog = app.add_subcommand("catalog", "Built-in algebras");
  catalog->add_option("action", catalog_action)->required()->check(CLI::IsMember({"list", "show"}));
  catalog->add_option("name", catalog_name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::cerr << "error: " << msg.substr(0, msg.find('\n')) << "\n";
    return kUsage;
  }

  try {
    if (*check) {
      const Limits limits = resolve_limits(max_clone_ops, max_arity);
      const FiniteAlgebra a = load_algebra(algebra_path);
      const auto formulas = load_formulas(formula_src, a.sig);
      for (std::size_t i = 0; i < formulas.size(); ++i) check_mode(mode, formulas[i], i);

      if (!replay_line.empty()) {
        const WitnessRecord w = parse_witness_line(replay_line, a.sig);
        if (w.formula_index >= formulas.size()) throw UsageError("witness eq index out of range");
        const bool confirmed = replay_witness(a, formulas[w.formula_index], w);
        std::cout << (confirmed ? "REPLAY confirmed" : "REPLAY not-confirmed") << "\n";
        return confirmed ? kHolds : kFails;
      }
      for (std::size_t i = 0; i < formulas.size(); ++i) {
        Verdict v = run_check(mode, a, formulas[i], limits);
        if (!v.holds) {
          v.witness->formula_index = i;
          std::cout << emit_witness(v) << "\n";
          return kFails;
        }
        std::cout << "HOLDS eq=" << i << "\n";
      }
      return kHolds;
    }

    if (*clone) {
      const Limits limits = resolve_limits(max_clone_ops, max_arity);
      const FiniteAlgebra a = load_algebra(algebra_path);
      const CloneSlice slice = clone_slice(a, arity, limits.max_clone_ops);
      for (std::size_t i = 0; i < slice.size(); ++i) {
        std::cout << i << " " << join_elements(slice.ops[i].table, " ") << " "
                  << to_string(slice.ops[i].witness) << "\n";
      }
      return kHolds;
    }

    if (*derived) {
      const Limits limits = resolve_limits(max_clone_ops, max_arity);
      const FiniteAlgebra a = load_algebra(algebra_path);
      std::size_t i = 0;
      for_each_derived_algebra(
          a, limits,
          [&](const DerivedAlgebra& d) {
            std::cout << "# derived " << i++ << " " << sigma_text(d.sigma) << "\n"
                      << format_algebra(d.algebra);
            return true;
          },
          dedup);
      return kHolds;
    }

    if (*product) {
      std::vector<FiniteAlgebra> family;
      for (const auto& p : factor_paths) family.push_back(load_algebra(p));
      std::cout << format_algebra(direct_product(family));
      return kHolds;
    }

    if (*subalgebras) {
      const FiniteAlgebra a = load_algebra(algebra_path);
      const auto subs = all_subalgebras(a);
      for (std::size_t i = 0; i < subs.size(); ++i) {
        std::cout << i << " {" << join_elements(subs[i].elements, ",") << "}\n";
      }
      return kHolds;
    }

    if (*abelian) {
      const Limits limits = resolve_limits(max_clone_ops, std::nullopt);
      const FiniteAlgebra a = load_algebra(algebra_path);
      const AbelianVerdict v = is_abelian(a, abelian_arity, limits);
      if (v.abelian) {
        std::cout << "ABELIAN max-arity=" << abelian_arity << "\n";
        return kHolds;
      }
      const auto& w = *v.witness;
      std::cout << "TERM-CONDITION-FAILS op=" << to_string(w.op.witness) << " u=" << w.u << " v=" << w.v
                << " x=(" << join_elements(w.x, ",") << ") y=(" << join_elements(w.y, ",") << ")"
                << (w.forward ? "" : " reverse") << "\n";
      return kFails;
    }

    if (*reduced) {
      std::vector<FiniteAlgebra> family;
      for (const auto& p : factor_paths) family.push_back(load_algebra(p));
      const std::size_t m = family.size();
      if (filter_text.empty() && principal_text.empty()) throw UsageError("give --filter or --principal");
      const FilterFamily f = principal_text.empty()
                                 ? parse_filter(filter_text, m)
                                 : FilterFamily::principal(m, parse_index_set(principal_text, m));
      if (auto errs = filter_errors(f); !errs.empty()) throw UsageError("not a filter: " + errs.front());
      std::cout << format_algebra(ultra ? ultraproduct(family, f) : reduced_product(family, f));
      return kHolds;
    }

    if (*verify) {
      const Limits limits = resolve_limits(max_clone_ops, max_arity);
      std::vector<FiniteAlgebra> targets;
      if (!algebra_path.empty()) {
        targets.push_back(load_algebra(algebra_path));
      } else {
        targets = {make_zn(2), make_lattice("chain2"), make_rect_band(2, 2)};
      }
      Report report;
      auto append = [&](Report part) { report.insert(report.end(), part.begin(), part.end()); };
      if (which == "all" && algebra_path.empty()) {
        append(verify_all(limits));
      } else {
        if (which == "sec1" || which == "all") {
          for (std::size_t n = 2; n <= 6; ++n) append(verify_section1(n, limits));
        }
        if (which == "sec3" || which == "all") append(verify_section3(limits));
        if (which == "prop41" || which == "all") {
          for (const auto& a : targets) {
            auto battery = standard_battery_for(a.sig);
            if (!battery) throw UsageError("no standard battery for signature " + a.sig.to_string());
            append(verify_prop41(a, *battery, limits));
          }
        }
        if (which == "prop53" || which == "all") {
          for (const auto& a : targets) append(verify_prop53_instances({a}, limits));
        }
      }
      std::cout << format_report(report);
      return all_pass(report) ? kHolds : kFails;
    }

    if (*catalog) {
      if (catalog_action == "list") {
        for (const auto& n : catalog_names()) std::cout << n << "\n";
        return kHolds;
      }
      if (catalog_name.empty()) throw UsageError("catalog show needs a name");
      std::cout << format_algebra(make_catalog_algebra(catalog_name));
      return kHolds;
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::cerr << "error: " << msg.substr(0, msg.find('\n')) << "\n";
    return kUsage;
  }
  return kUsage;
}
