#include "hyperq/verify.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "hyperq/catalog.hpp"

namespace hyperq {

namespace detail {
extern const char* const kBatteryText;
}

bool all_pass(const Report& r) {
  return std::all_of(r.begin(), r.end(), [](const CheckResult& c) { return c.pass; });
}

std::string format_report(const Report& r) {
  std::string out;
  for (const auto& c : r) {
    out += "CHECK " + c.name + (c.pass ? " PASS" : " FAIL");
    if (!c.detail.empty()) out += " " + c.detail;
    out += "\n";
  }
  return out;
}

// -- Batteries ---------------------------------------------------------------

std::vector<FormulaBattery> parse_batteries(std::string_view text) {
  std::vector<FormulaBattery> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "battery line " + std::to_string(line_no) + ": ";

    if (line.rfind("signature ", 0) == 0) {
      std::istringstream syms(line.substr(10));
      std::vector<Symbol> symbols;
      std::string tok;
      while (syms >> tok) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw Error(where + "expected <symbol>:<arity>");
        symbols.push_back({tok.substr(0, colon), std::stoul(tok.substr(colon + 1))});
      }
      out.push_back({Signature(std::move(symbols)), {}});
      continue;
    }
    if (out.empty()) throw Error(where + "entry before any 'signature' line");
    auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(where + "expected <name>: <formula>");
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    auto& battery = out.back();
    for (const auto& e : battery.entries) {
      if (e.name == name) throw Error(where + "duplicate entry name '" + name + "'");
    }
    const HornFormula q = parse_formula(line.substr(colon + 1), battery.sig);
    battery.entries.push_back({name, transform_T(q), canonical_binding(q)});
  }
  return out;
}

const std::vector<FormulaBattery>& standard_batteries() {
  static const std::vector<FormulaBattery> batteries = parse_batteries(detail::kBatteryText);
  return batteries;
}

std::optional<FormulaBattery> standard_battery_for(const Signature& sig) {
  for (const auto& b : standard_batteries()) {
    if (b.sig == sig) return b;
  }
  return std::nullopt;
}

// -- Battery versus derived algebras ------------------------------------------

Report verify_prop41(const FiniteAlgebra& a, const FormulaBattery& battery, const Limits& limits) {
  Report report;
  const auto derived = enumerate_derived_algebras(a, limits);
  for (const auto& entry : battery.entries) {
    const std::string name = "prop41." + a.name + "." + entry.name;
    const bool hyper = holds_hyperquasi(a, entry.formula, limits).holds;
    const HornFormula plain = transform_Tinv(entry.formula, entry.binding, a.sig);
    std::size_t failing = 0;
    std::string first_failing;
    for (std::size_t i = 0; i < derived.size(); ++i) {
      if (!holds_quasi(derived[i].algebra, plain).holds) {
        if (failing++ == 0) first_failing = std::to_string(i);
      }
    }
    const bool all_derived = failing == 0;
    std::string detail = std::string("hyper=") + (hyper ? "holds" : "fails") +
                         " derived=" + std::to_string(derived.size() - failing) + "/" +
                         std::to_string(derived.size());
    if (!all_derived) detail += " first_failing_derived=" + first_failing;
    report.push_back({name, hyper == all_derived, detail});
  }
  return report;
}

// -- Operator inclusions ------------------------------------------------------

namespace {

constexpr std::size_t kMaxProductSize = 64;

/// The hypersubstitution of `factor` picking, for every symbol, the term
/// operation named by sigma's witness term.
Hypersubstitution transfer(const Hypersubstitution& sigma, const FiniteAlgebra& factor) {
  Hypersubstitution out;
  for (const auto& [name, op] : sigma.entries) {
    out.entries.emplace_back(name, term_to_table(factor, op.witness, formal_variables(op.arity)));
  }
  return out;
}

FiniteAlgebra derive_factor(const FiniteAlgebra& factor, const Hypersubstitution& sigma) {
  return derived_algebra(factor, transfer(sigma, factor));
}

std::vector<FiniteAlgebra> derive_family(std::span<const FiniteAlgebra> family,
                                         const Hypersubstitution& sigma) {
  std::vector<FiniteAlgebra> out;
  for (const auto& f : family) out.push_back(derive_factor(f, sigma));
  return out;
}

bool isomorphic(const FiniteAlgebra& x, const FiniteAlgebra& y) {
  if (x.size != y.size) return false;
  if (x.tables == y.tables) return true;
  return iso_search(x, y).has_value();
}

/// All sequences of members of K with lengths in [min_len, max_len].
std::vector<std::vector<FiniteAlgebra>> families(const std::vector<FiniteAlgebra>& k,
                                                 std::size_t min_len, std::size_t max_len) {
  std::vector<std::vector<FiniteAlgebra>> out;
  for (std::size_t len = min_len; len <= max_len; ++len) {
    std::vector<std::size_t> pick(len, 0);
    while (true) {
      std::vector<FiniteAlgebra> fam;
      std::size_t total = 1;
      for (std::size_t i : pick) {
        fam.push_back(k[i]);
        total *= k[i].size;
      }
      if (total <= kMaxProductSize) out.push_back(std::move(fam));
      std::size_t i = len;
      while (i > 0 && ++pick[i - 1] == k.size()) pick[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

std::string family_name(std::span<const FiniteAlgebra> fam) {
  std::string out = "[";
  for (std::size_t i = 0; i < fam.size(); ++i) out += (i ? "," : "") + fam[i].name;
  return out + "]";
}

CheckResult item1_subalgebras(const std::vector<FiniteAlgebra>& k, const Limits& limits) {
  std::size_t checked = 0;
  for (const auto& a : k) {
    std::vector<FiniteAlgebra> rhs;  // S D(a)
    for_each_derived_algebra(a, limits, [&](const DerivedAlgebra& d) {
      for (auto& sub : all_subalgebras(d.algebra, limits.subalgebra_cap)) rhs.push_back(std::move(sub.algebra));
      return true;
    });
    for (const auto& sub : all_subalgebras(a, limits.subalgebra_cap)) {
      bool ok = true;
      std::string missing;
      for_each_derived_algebra(sub.algebra, limits, [&](const DerivedAlgebra& d) {
        ++checked;
        bool found = std::any_of(rhs.begin(), rhs.end(),
                                 [&](const FiniteAlgebra& r) { return isomorphic(d.algebra, r); });
        if (!found) {
          ok = false;
          missing = "derived algebra of subalgebra of " + a.name + " with " +
                    std::to_string(sub.elements.size()) + " elements";
        }
        return found;
      });
      if (!ok) return {"prop53.1.DS<=SD", false, "no match for " + missing};
    }
  }
  return {"prop53.1.DS<=SD", true, "members=" + std::to_string(checked)};
}

CheckResult product_item(const std::string& name, const std::vector<FiniteAlgebra>& k,
                         std::size_t min_len, std::size_t max_len, const Limits& limits) {
  std::size_t checked = 0;
  for (const auto& fam : families(k, min_len, max_len)) {
    const Signature& sig = k.front().sig;
    const FiniteAlgebra product = direct_product(fam, sig);
    bool ok = true;
    for_each_derived_algebra(product, limits, [&](const DerivedAlgebra& d) {
      ++checked;
      const FiniteAlgebra rhs = direct_product(derive_family(fam, d.sigma), sig);
      ok = rhs.tables == d.algebra.tables;
      return ok;
    });
    if (!ok) return {name, false, "table mismatch for product " + family_name(fam)};
  }
  return {name, true, "members=" + std::to_string(checked) + " (exact table equality)"};
}

CheckResult item4_subdirect(const std::vector<FiniteAlgebra>& k, const Limits& limits) {
  std::size_t checked = 0;
  for (const auto& fam : families(k, 2, 2)) {
    const FiniteAlgebra product = direct_product(fam);
    std::set<Subuniverse> subs;
    for (Element p = 0; p < product.size; ++p) {
      for (Element q = p; q < product.size; ++q) {
        const Element seed[] = {p, q};
        subs.insert(subuniverse_generated(product, seed));
      }
    }
    for (const auto& sub : subs) {
      if (!is_subdirect(restrict_to(product, sub), sub, fam)) continue;
      const FiniteAlgebra b = restrict_to(product, sub);
      std::string failure;
      for_each_derived_algebra(b, limits, [&](const DerivedAlgebra& d) {
        ++checked;
        const auto derived_fam = derive_family(fam, d.sigma);
        try {
          if (!is_subdirect(d.algebra, sub, derived_fam)) failure = "projections not onto";
        } catch (const Error& e) {
          failure = e.what();
        }
        return failure.empty();
      });
      if (!failure.empty()) {
        return {"prop53.4.DPs<=PsD", false, family_name(fam) + ": " + failure};
      }
    }
  }
  return {"prop53.4.DPs<=PsD", true, "members=" + std::to_string(checked)};
}

CheckResult filtered_item(const std::vector<FiniteAlgebra>& k, bool ultra, const Limits& limits) {
  const std::string name = ultra ? "prop53.6.DPu<=PuD" : "prop53.5.DPr<=PrD";
  std::size_t checked = 0, filters_seen = 0;
  for (const auto& fam : families(k, 1, 3)) {
    for (const auto& f : all_filters(fam.size())) {
      if (ultra && ultrafilter_gap(f)) continue;
      ++filters_seen;
      const FiniteAlgebra r = ultra ? ultraproduct(fam, f) : reduced_product(fam, f);
      if (ultra) {
        // Over a finite index set the ultrafilter is principal at some i.
        std::size_t at = 0;
        while (!f.contains(IndexSet{1} << at)) ++at;
        if (!isomorphic(r, fam[at])) {
          return {name, false, "ultraproduct of " + family_name(fam) + " not isomorphic to factor " +
                                   std::to_string(at)};
        }
      }
      bool ok = true;
      for_each_derived_algebra(r, limits, [&](const DerivedAlgebra& d) {
        ++checked;
        const auto derived_fam = derive_family(fam, d.sigma);
        const FiniteAlgebra rhs = ultra ? ultraproduct(derived_fam, f) : reduced_product(derived_fam, f);
        ok = isomorphic(d.algebra, rhs);
        return ok;
      });
      if (!ok) return {name, false, "no isomorphic match over " + family_name(fam)};
    }
  }
  return {name, true,
          "filters=" + std::to_string(filters_seen) + " members=" + std::to_string(checked)};
}

DirectSpectrum derive_spectrum(const DirectSpectrum& s, const Hypersubstitution& sigma) {
  DirectSpectrum out = s;
  for (auto& a : out.algebras) a = derive_factor(a, sigma);
  return out;
}

CheckResult limit_item(const std::vector<FiniteAlgebra>& k, bool superdirect, const Limits& limits) {
  const std::string name = superdirect ? "prop53.8.DLs<=LsD" : "prop53.7.DL<=LD";
  std::size_t spectra = 0, checked = 0;
  for (const auto& s : generated_spectra(k, 256)) {
    if (superdirect && !is_superdirect(s)) continue;
    ++spectra;
    const FiniteAlgebra lim = direct_limit(s);
    std::string failure;
    for_each_derived_algebra(lim, limits, [&](const DerivedAlgebra& d) {
      ++checked;
      const DirectSpectrum ds = derive_spectrum(s, d.sigma);
      if (auto errs = spectrum_errors(ds); !errs.empty()) {
        failure = "derived spectrum invalid: " + errs.front();
      } else if (superdirect && !is_superdirect(ds)) {
        failure = "derived spectrum not superdirect";
      } else if (!isomorphic(d.algebra, direct_limit(ds))) {
        failure = "derived limit not isomorphic to limit of derived spectrum";
      }
      return failure.empty();
    });
    if (!failure.empty()) return {name, false, failure};
  }
  if (spectra == 0) return {name, false, "no spectra generated"};
  return {name, true, "spectra=" + std::to_string(spectra) + " members=" + std::to_string(checked)};
}

DirectSpectrum make_spectrum(std::vector<FiniteAlgebra> algebras,
                             const std::vector<std::tuple<std::size_t, std::size_t, ElementMap>>& edges) {
  const std::size_t m = algebras.size();
  DirectSpectrum s;
  s.leq.assign(m, std::vector<bool>(m, false));
  s.maps.assign(m, std::vector<ElementMap>(m));
  for (std::size_t i = 0; i < m; ++i) {
    s.leq[i][i] = true;
    s.maps[i][i].resize(algebras[i].size);
    for (Element x = 0; x < algebras[i].size; ++x) s.maps[i][i][x] = x;
  }
  for (const auto& [i, j, g] : edges) {
    s.leq[i][j] = true;
    s.maps[i][j] = g;
  }
  // Close under composition (index sets here have at most three elements).
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t l = 0; l < m; ++l) {
        if (i != j && j != l && s.leq[i][j] && s.leq[j][l] && !s.leq[i][l]) {
          s.leq[i][l] = true;
          s.maps[i][l].resize(algebras[i].size);
          for (Element x = 0; x < algebras[i].size; ++x) s.maps[i][l][x] = s.maps[j][l][s.maps[i][j][x]];
        }
      }
    }
  }
  s.algebras = std::move(algebras);
  return s;
}

ElementMap identity_map(std::size_t n) {
  ElementMap id(n);
  for (Element x = 0; x < n; ++x) id[x] = x;
  return id;
}

}  // namespace

std::vector<ElementMap> all_homomorphisms(const FiniteAlgebra& a, const FiniteAlgebra& b,
                                          std::size_t cap) {
  std::vector<ElementMap> out;
  const std::size_t count = checked_power(b.size, a.size);
  if (count > cap) throw Error("too many maps to enumerate homomorphisms");
  ElementMap g(a.size);
  for (std::size_t idx = 0; idx < count; ++idx) {
    unflatten(idx, b.size, g);
    if (is_homomorphism(a, b, g)) out.push_back(g);
  }
  return out;
}

std::vector<DirectSpectrum> generated_spectra(const std::vector<FiniteAlgebra>& k,
                                              std::size_t max_spectra) {
  std::vector<DirectSpectrum> out;
  auto push = [&](DirectSpectrum s) {
    if (out.size() < max_spectra) out.push_back(std::move(s));
  };
  for (const auto& a : k) {
    const auto id = identity_map(a.size);
    push(make_spectrum({a}, {}));
    push(make_spectrum({a, a}, {{0, 1, id}}));
    push(make_spectrum({a, a, a}, {{0, 1, id}, {1, 2, id}}));
    push(make_spectrum({a, a, a}, {{0, 2, id}, {1, 2, id}}));
  }
  for (const auto& a : k) {
    for (const auto& b : k) {
      for (const auto& h : all_homomorphisms(a, b)) {
        push(make_spectrum({a, b}, {{0, 1, h}}));
        push(make_spectrum({a, a, b}, {{0, 1, identity_map(a.size)}, {1, 2, h}}));
        push(make_spectrum({a, b, b}, {{0, 1, h}, {1, 2, identity_map(b.size)}}));
        push(make_spectrum({a, a, b}, {{0, 2, h}, {1, 2, h}}));
      }
    }
  }
  return out;
}

Report verify_prop53_instances(const std::vector<FiniteAlgebra>& k, const Limits& limits) {
  if (k.empty()) throw Error("verify_prop53_instances needs a nonempty class");
  for (const auto& a : k) {
    if (!(a.sig == k.front().sig)) throw Error("class members must share a signature");
  }
  Report r;
  auto run = [&](auto&& fn, const std::string& name) {
    try {
      r.push_back(fn());
    } catch (const Error& e) {
      r.push_back({name, false, std::string("error: ") + e.what()});
    }
  };
  run([&] { return item1_subalgebras(k, limits); }, "prop53.1.DS<=SD");
  run([&] { return product_item("prop53.2.DP<=PD", k, 2, 2, limits); }, "prop53.2.DP<=PD");
  run([&] { return product_item("prop53.3.DPw<=PwD", k, 0, 3, limits); }, "prop53.3.DPw<=PwD");
  run([&] { return item4_subdirect(k, limits); }, "prop53.4.DPs<=PsD");
  run([&] { return filtered_item(k, false, limits); }, "prop53.5.DPr<=PrD");
  run([&] { return filtered_item(k, true, limits); }, "prop53.6.DPu<=PuD");
  run([&] { return limit_item(k, false, limits); }, "prop53.7.DL<=LD");
  run([&] { return limit_item(k, true, limits); }, "prop53.8.DLs<=LsD");
  std::string members;
  for (const auto& a : k) members += (members.empty() ? "" : ",") + a.name;
  for (auto& c : r) c.name += "{" + members + "}";
  return r;
}

// -- Worked examples ---------------------------------------------------------

Report verify_section1(std::size_t n, const Limits& limits) {
  if (n < 2 || n > 6) throw Error("verify_section1 expects 2 <= n <= 6");
  const FiniteAlgebra z = make_zn(n);
  const std::string tag = "sec1.z" + std::to_string(n);
  Report r;

  const HornFormula medial = parse_formula("F(F(u,v),F(x,y)) = F(F(u,x),F(v,y))", z.sig);
  const Verdict v = holds_hyperidentity(z, medial, limits);
  r.push_back({tag + ".medial", v.holds, v.holds ? "holds" : emit_witness(v)});

  const CloneSlice slice = clone_slice(z, 2, limits.max_clone_ops);
  std::set<Table> linear;  // ax + by
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      Table t(n * n);
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) t[x * n + y] = static_cast<Element>((a * x + b * y) % n);
      }
      linear.insert(std::move(t));
    }
  }
  std::set<Table> found;
  for (const auto& op : slice.ops) found.insert(op.table);
  const bool slice_ok = slice.size() == n * n && found == linear;
  r.push_back({tag + ".slice", slice_ok,
               "size=" + std::to_string(slice.size()) + " expected=" + std::to_string(n * n)});
  return r;
}

Report verify_section3(const Limits& limits) {
  Report r;
  auto verdict_detail = [](const Verdict& v) { return v.holds ? std::string("holds") : emit_witness(v); };

  // Rectangular bands: binary instances of the hyperidentities, then abelianness.
  for (const auto& [m, k] : {std::pair{2, 2}, std::pair{2, 3}}) {
    const FiniteAlgebra rb = make_rect_band(m, k);
    const std::vector<std::pair<std::string, std::string>> laws = {
        {"idempotent", "F(x,x) = x"},
        {"left-absorb", "F(F(x,y),z) = F(x,z)"},
        {"right-absorb", "F(x,F(y,z)) = F(x,z)"},
        {"associative", "F(x,F(y,z)) = F(F(x,y),z)"},
    };
    for (const auto& [name, src] : laws) {
      const Verdict v = holds_hyperidentity(rb, parse_formula(src, rb.sig), limits);
      r.push_back({"sec3.rb." + rb.name + "." + name, v.holds, verdict_detail(v)});
    }
    const AbelianVerdict ab = is_abelian(rb, 3, limits);
    r.push_back({"sec3.rb." + rb.name + ".abelian", ab.abelian, ab.abelian ? "arity<=3" : "term condition fails"});
  }

  // Semidistributive lattices.
  const std::string prop32 = "F(x,y) = F(x,z) -> F(x,y) = F(x,G(y,z))";
  for (const char* name : {"chain2", "n5"}) {
    const FiniteAlgebra l = make_lattice(name);
    const Verdict v = holds_hyperquasi(l, parse_formula(prop32, l.sig), limits);
    r.push_back({std::string("sec3.lattice.") + name + ".hyperquasi", v.holds, verdict_detail(v)});
  }

  // Case split: F over the four binary term operations, G over y, z, meet, join.
  {
    const FiniteAlgebra n5 = make_lattice("n5");
    const HornFormula h = parse_formula(prop32, n5.sig);
    const CloneSlice binary = clone_slice(n5, 2, limits.max_clone_ops);
    auto op_named = [&](const std::string& witness) -> const TermOperation& {
      for (const auto& op : binary.ops) {
        if (to_string(op.witness) == witness) return op;
      }
      throw Error("binary term operation '" + witness + "' not found");
    };
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"case1", "x1"}, {"case2", "x2"}, {"case3", "meet(x1,x2)"}, {"case4", "join(x1,x2)"}};
    for (const auto& [label, f_op] : cases) {
      bool ok = true;
      std::string detail;
      for (const char* g_op : {"x1", "x2", "meet(x1,x2)", "join(x1,x2)"}) {
        Hypersubstitution sigma;
        sigma.entries = {{"F", op_named(f_op)}, {"G", op_named(g_op)}};
        const HornFormula q = apply_hypersubstitution(sigma, h);
        const Verdict v = holds_quasi(n5, q);
        if (!v.holds) {
          ok = false;
          detail += "[" + to_string(q) + "] ";
        }
      }
      r.push_back({"sec3.n5." + label, ok, ok ? "F=" + f_op + " all four G hold" : detail});
    }

    // M3 fails; the first witness is F=join, G=meet at the atoms.
    const FiniteAlgebra m3 = make_lattice("m3");
    const Verdict v = holds_hyperquasi(m3, parse_formula(prop32, m3.sig), limits);
    bool shape = false;
    if (!v.holds) {
      const auto& w = *v.witness;
      const auto* f = w.sigma.find("F");
      const auto* g = w.sigma.find("G");
      shape = f && g && to_string(f->witness) == "join(x1,x2)" &&
              to_string(g->witness) == "meet(x1,x2)" &&
              w.assignment == std::vector<std::pair<std::string, Element>>{{"x", 1}, {"y", 2}, {"z", 3}};
    }
    r.push_back({"sec3.m3.fails", !v.holds && shape, v.holds ? "unexpectedly holds" : emit_witness(v)});
  }

  // Term condition contrast.
  {
    const AbelianVerdict z4 = is_abelian(make_zn(4), 3, limits);
    r.push_back({"sec3.tc.z4", z4.abelian, z4.abelian ? "abelian up to arity 3" : "term condition fails"});
    const FiniteAlgebra s3 = make_s3();
    const AbelianVerdict ab = is_abelian(s3, 2, limits);
    const bool sound = !ab.abelian && confirms_term_condition_failure(s3, *ab.witness);
    r.push_back({"sec3.tc.s3", sound,
                 ab.abelian ? "unexpectedly abelian" : "fails via " + to_string(ab.witness->op.witness)});
  }
  return r;
}

Report verify_all(const Limits& limits) {
  Report r;
  for (std::size_t n = 2; n <= 6; ++n) {
    auto part = verify_section1(n, limits);
    r.insert(r.end(), part.begin(), part.end());
  }
  auto s3 = verify_section3(limits);
  r.insert(r.end(), s3.begin(), s3.end());
  for (const auto& a : {make_zn(2), make_lattice("chain2"), make_rect_band(2, 2)}) {
    auto part = verify_prop41(a, *standard_battery_for(a.sig), limits);
    r.insert(r.end(), part.begin(), part.end());
  }
  for (const auto& a : {make_zn(2), make_lattice("chain2"), make_rect_band(2, 2)}) {
    auto part = verify_prop53_instances({a}, limits);
    r.insert(r.end(), part.begin(), part.end());
  }
  return r;
}

}  // namespace hyperq
