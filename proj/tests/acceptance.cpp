// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "hyperq/catalog.hpp"
#include "hyperq/satisfaction.hpp"
#include "hyperq/verify.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace hyperq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

struct CliResult {
  int status = -1;
  std::string out;
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

CliResult run_cli(const std::vector<std::string>& args) {
  std::string cmd = shell_quote(HYPERQ_CLI);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>/dev/null";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Every witness emitted by the suite, replayed under criterion 10.
struct Emitted {
  FiniteAlgebra algebra;
  HornFormula formula;
  std::string line;
  std::string mode;
  std::string formula_text;
};
std::vector<Emitted> g_emitted;

void record(const FiniteAlgebra& a, const HornFormula& f, const Verdict& v, const std::string& mode) {
  if (!v.holds) g_emitted.push_back({a, f, emit_witness(v), mode, to_string(f)});
}

const Limits kLimits;
const char* const kLatticeHq = "F(x,y) = F(x,z) -> F(x,y) = F(x,G(y,z))";

Outcome medial_on_zn() {
  Outcome o;
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto z = make_zn(n);
    o.require(holds_hyperidentity(z, parse_formula("F(F(u,v),F(x,y)) = F(F(u,x),F(v,y))", z.sig), kLimits).holds,
              "medial fails on z" + std::to_string(n));
    const auto size = clone_slice(z, 2).size();
    o.require(size == n * n, "z" + std::to_string(n) + " slice size " + std::to_string(size));
  }
  if (o.pass) o.detail = "n=2..6 hold, slice sizes 4,9,16,25,36";
  return o;
}

Outcome commutativity_fails_on_z2() {
  Outcome o;
  const auto z2 = make_zn(2);
  const auto f = parse_formula("F(x,y) = F(y,x)", z2.sig);
  const auto v = holds_hyperidentity(z2, f, kLimits);
  record(z2, f, v, "hyper");
  const std::string pinned = "WITNESS sigma{F:=x1} asg{x:=0,y:=1} eq=0";
  o.require(!v.holds, "holds unexpectedly");
  if (!v.holds) o.require(emit_witness(v) == pinned, "witness " + emit_witness(v));
  const auto cli = run_cli({"check", "z2", "--formula", "F(x,y) = F(y,x)", "--mode", "hyper"});
  o.require(cli.status == 1, "cli exit " + std::to_string(cli.status));
  o.require(cli.out == pinned + "\n", "cli output " + cli.out);
  if (o.pass) o.detail = pinned + ", exit 1";
  return o;
}

Outcome lattice_hyperquasi() {
  Outcome o;
  for (const char* name : {"chain2", "n5"}) {
    const auto l = make_lattice(name);
    o.require(holds_hyperquasi(l, parse_formula(kLatticeHq, l.sig), kLimits).holds, std::string(name) + " fails");
  }
  const auto m3 = make_lattice("m3");
  const auto f = parse_formula(kLatticeHq, m3.sig);
  const auto v = holds_hyperquasi(m3, f, kLimits);
  record(m3, f, v, "hyperquasi");
  o.require(!v.holds, "m3 holds");
  if (!v.holds) {
    const auto rec = parse_witness_line(emit_witness(v), m3.sig);
    o.require(replay_witness(m3, f, rec), "m3 witness does not replay");
    const Element a = rec.assignment.at("x"), b = rec.assignment.at("y"), c = rec.assignment.at("z");
    auto join = [&](Element p, Element q) { return m3.apply("join", std::vector<Element>{p, q}); };
    auto meet = [&](Element p, Element q) { return m3.apply("meet", std::vector<Element>{p, q}); };
    o.require(join(a, b) == 4 && join(a, c) == 4 && join(a, meet(b, c)) == a, "witness shape");
  }
  std::size_t cases = 0;
  for (const auto& c : verify_section3(kLimits)) {
    if (c.name.rfind("sec3.n5.case", 0) == 0) {
      ++cases;
      o.require(c.pass, c.name + " " + c.detail);
    }
  }
  o.require(cases == 4, "expected 4 cases");
  if (o.pass) o.detail = "chain2, n5 hold; m3 " + emit_witness(v) + "; cases 1-4 hold on n5";
  return o;
}

Outcome rectangular_bands() {
  Outcome o;
  double rb23_seconds = 0;
  for (auto [m, k] : {std::pair{2, 2}, std::pair{2, 3}}) {
    const auto rb = make_rect_band(m, k);
    const auto start = std::chrono::steady_clock::now();
    o.require(holds_hyperidentity(rb, parse_formula("F(x,x) = x", rb.sig), kLimits).holds, rb.name + " F(x,x)=x");
    o.require(is_abelian(rb, 3, kLimits).abelian, rb.name + " not abelian");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (k == 3) rb23_seconds = secs;
  }
  o.require(rb23_seconds <= 60.0, "rb2x3 too slow");
  std::ostringstream d;
  d << "rb2x2, rb2x3 idempotent and abelian to arity 3; rb2x3 in " << rb23_seconds << "s";
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome term_condition() {
  Outcome o;
  o.require(is_abelian(make_zn(4), 3, kLimits).abelian, "z4 not abelian");
  const auto s3 = make_s3();
  const auto v = is_abelian(s3, 2, kLimits);
  o.require(!v.abelian, "s3 abelian");
  if (!v.abelian) {
    o.require(v.witness->op.arity == 2, "witness arity");
    o.require(confirms_term_condition_failure(s3, *v.witness), "s3 witness unsound");
    // The same failure through the Horn form of the condition.
    const auto f = term_condition_formula(2, !v.witness->forward, s3.sig);
    Witness w;
    w.hyper = true;
    w.sigma.entries = {{"F", v.witness->op}};
    w.assignment = {{"u", v.witness->u}, {"x1", v.witness->x[0]}, {"y1", v.witness->y[0]}, {"v", v.witness->v}};
    o.require(replay_witness(s3, f, w), "horn form does not replay");
    Verdict fake{false, w};
    record(s3, f, fake, "hyperquasi");
  }
  if (o.pass) o.detail = "z4 abelian; s3 fails via " + to_string(v.witness->op.witness);
  return o;
}

Outcome prop41() {
  Outcome o;
  std::size_t checks = 0;
  for (const auto& a : {make_zn(2), make_lattice("chain2"), make_rect_band(2, 2)}) {
    const auto battery = standard_battery_for(a.sig);
    o.require(battery && battery->entries.size() == 6, a.name + " battery");
    if (!battery) continue;
    for (const auto& c : verify_prop41(a, *battery, kLimits)) {
      ++checks;
      o.require(c.pass, c.name + " " + c.detail);
    }
  }
  const auto z2 = make_zn(2);
  o.require(enumerate_derived_algebras(z2, kLimits).size() == 8, "z2 derived count");
  o.require(clone_slice(z2, 2).size() == 4 && clone_slice(z2, 1).size() == 2 && clone_slice(z2, 0).size() == 1,
            "z2 slice sizes");
  if (o.pass) o.detail = std::to_string(checks) + " battery checks agree; z2 has 4x2x1=8 derived algebras";
  return o;
}

Outcome prop53() {
  Outcome o;
  std::size_t checks = 0;
  for (const char* name : {"z2", "chain2", "rb2x2"}) {
    for (const auto& c : verify_prop53_instances({make_catalog_algebra(name)}, kLimits)) {
      ++checks;
      o.require(c.pass, c.name + " " + c.detail);
    }
  }
  if (o.pass) o.detail = std::to_string(checks) + " item checks over {z2}, {chain2}, {rb2x2}";
  return o;
}

Outcome constructions() {
  Outcome o;
  std::map<std::string, std::vector<FiniteAlgebra>> by_sig;
  for (const auto& name : catalog_names()) {
    auto a = make_catalog_algebra(name);
    by_sig[a.sig.to_string()].push_back(std::move(a));
  }

  // Families of length 1..4 drawn from one signature's catalog members, with
  // at most kMaxProduct elements in the product.
  constexpr std::size_t kMaxProduct = 128;
  std::size_t ultra = 0, reduced = 0, limits = 0;
  for (const auto& [sig, members] : by_sig) {
    std::function<void(std::vector<FiniteAlgebra>&, std::size_t)> grow = [&](std::vector<FiniteAlgebra>& fam,
                                                                              std::size_t total) {
      if (!fam.empty()) {
        const std::size_t m = fam.size();
        if (total <= kMaxProduct) {
          for (std::size_t i = 0; i < m; ++i) {
            ++ultra;
            const auto u = ultraproduct(fam, FilterFamily::principal(m, IndexSet{1} << i));
            o.require(iso_search(u, fam[i]).has_value(), "ultraproduct over " + std::to_string(m));
          }
        }
        if (total <= 64) {
          ++reduced;
          FilterFamily top{m, {static_cast<IndexSet>((IndexSet{1} << m) - 1)}};
          o.require(iso_search(reduced_product(fam, top), direct_product(fam)).has_value(), "reduced product {I}");
        }
      }
      if (fam.size() == 4) return;
      for (const auto& a : members) {
        if (total * a.size > kMaxProduct) continue;
        fam.push_back(a);
        grow(fam, total * a.size);
        fam.pop_back();
      }
    };
    std::vector<FiniteAlgebra> fam;
    grow(fam, 1);

    // Spectra with a maximum element: generated ones plus a four-element diamond.
    std::vector<FiniteAlgebra> small;
    for (const auto& a : members) {
      if (a.size <= 6) small.push_back(a);
    }
    auto spectra = generated_spectra(small, 1u << 20);
    for (const auto& a : small) {
      for (const auto& b : small) {
        for (const auto& h : all_homomorphisms(a, b)) {
          DirectSpectrum s;
          s.leq = {{true, true, true, true}, {false, true, false, true}, {false, false, true, true},
                   {false, false, false, true}};
          s.algebras = {a, a, a, b};
          ElementMap id(a.size), idb(b.size);
          for (Element x = 0; x < a.size; ++x) id[x] = x;
          for (Element x = 0; x < b.size; ++x) idb[x] = x;
          s.maps.assign(4, std::vector<ElementMap>(4));
          s.maps[0][0] = s.maps[1][1] = s.maps[2][2] = s.maps[0][1] = s.maps[0][2] = id;
          s.maps[3][3] = idb;
          s.maps[0][3] = s.maps[1][3] = s.maps[2][3] = h;
          spectra.push_back(std::move(s));
        }
      }
    }
    for (const auto& s : spectra) {
      o.require(spectrum_errors(s).empty(), "invalid generated spectrum");
      const std::size_t n = s.index_size();
      for (std::size_t m = 0; m < n; ++m) {
        bool top = true;
        for (std::size_t i = 0; i < n; ++i) top = top && s.leq[i][m];
        if (!top) continue;
        ++limits;
        o.require(iso_search(direct_limit(s), s.algebras[m]).has_value(), "direct limit vs maximum");
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(ultra) + " principal ultraproducts, " + std::to_string(reduced) +
               " reduced products over {I}, " + std::to_string(limits) + " spectra with a maximum";
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::size_t formulas = 0, pairs = 0;
  for (const auto& section : testing::load_corpus()) {
    formulas += section.formulas.size();
    for (const auto& a : testing::catalog_up_to(3)) {
      if (!(a.sig == section.sig)) continue;
      for (const auto& f : section.formulas) {
        ++pairs;
        const Verdict v = f.is_hyper() ? holds_hyperquasi(a, f, kLimits) : holds_quasi(a, f);
        o.require(v.holds == oracle::holds(a, f), a.name + ": " + to_string(f));
        record(a, f, v, f.is_hyper() ? "hyperquasi" : "quasi");
      }
    }
  }
  o.require(formulas >= 50, "corpus too small");
  if (o.pass) o.detail = std::to_string(formulas) + " formulas, " + std::to_string(pairs) + " algebra/formula pairs agree";
  return o;
}

Outcome witness_replay() {
  Outcome o;
  // Extra witnesses from larger catalog members.
  for (const auto& section : testing::load_corpus()) {
    for (const auto& a : testing::catalog_up_to(5)) {
      if (!(a.sig == section.sig) || a.size <= 3) continue;
      for (const auto& f : section.formulas) {
        const Verdict v = f.is_hyper() ? holds_hyperquasi(a, f, kLimits) : holds_quasi(a, f);
        record(a, f, v, f.is_hyper() ? "hyperquasi" : "quasi");
      }
    }
  }
  std::size_t confirmed = 0, via_cli = 0;
  for (const auto& e : g_emitted) {
    const bool ok = replay_witness(e.algebra, e.formula, parse_witness_line(e.line, e.algebra.sig));
    confirmed += ok;
    o.require(ok, e.algebra.name + " " + e.line);
  }
  // The CLI --replay path, on a stride through the emitted witnesses.
  const std::size_t stride = std::max<std::size_t>(1, g_emitted.size() / 40);
  for (std::size_t i = 0; i < g_emitted.size(); i += stride) {
    const auto& e = g_emitted[i];
    const auto r = run_cli({"check", e.algebra.name, "--formula", e.formula_text, "--mode", e.mode, "--replay", e.line});
    ++via_cli;
    o.require(r.status == 0 && r.out == "REPLAY confirmed\n", "cli replay " + e.algebra.name + " " + e.line);
  }
  o.require(!g_emitted.empty(), "no witnesses");
  if (o.pass) {
    o.detail = std::to_string(confirmed) + "/" + std::to_string(g_emitted.size()) + " witnesses confirmed, " +
               std::to_string(via_cli) + " through the CLI";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"medial hyperidentity on Z_n", medial_on_zn},
      {"commutativity hyperidentity fails on Z2", commutativity_fails_on_z2},
      {"lattice hyper-quasi-identity", lattice_hyperquasi},
      {"rectangular bands", rectangular_bands},
      {"term condition", term_condition},
      {"battery agrees with derived algebras", prop41},
      {"operator inclusions at instance scale", prop53},
      {"construction sanity", constructions},
      {"oracle equivalence", oracle_equivalence},
      {"witness replay", witness_replay},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::printf("CRITERION %zu %s %s (%.2fs): %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
