#pragma once

// Instance-scale reproductions of the hyper-quasi-identity results: the
// derived-algebra characterization of hyper-satisfaction, the operator
// inclusions for D against S, P, P_fin, P_s, P_r, P_u, L, L_s, and the
// worked examples for Z_n, rectangular bands and small lattices.

#include <optional>
#include <string>
#include <vector>

#include "hyperq/satisfaction.hpp"

namespace hyperq {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

using Report = std::vector<CheckResult>;

bool all_pass(const Report& r);
/// `CHECK <name> PASS|FAIL <detail>`, one line per check.
std::string format_report(const Report& r);

struct BatteryEntry {
  std::string name;
  HornFormula formula;  // hyper form
  Binding binding;      // hypervariable -> basic symbol
};

struct FormulaBattery {
  Signature sig;
  std::vector<BatteryEntry> entries;
};

/// Parses the battery document format (see data/battery.horn).
std::vector<FormulaBattery> parse_batteries(std::string_view text);
/// Batteries compiled into the library from data/battery.horn.
const std::vector<FormulaBattery>& standard_batteries();
std::optional<FormulaBattery> standard_battery_for(const Signature& sig);

/// Compares hyper-satisfaction of each battery formula with plain
/// satisfaction of its unbound form in every derived algebra.
Report verify_prop41(const FiniteAlgebra& a, const FormulaBattery& battery,
                     const Limits& limits = {});

/// Items 1-8 of the D-operator inclusions, as instance checks on the class K.
Report verify_prop53_instances(const std::vector<FiniteAlgebra>& k, const Limits& limits = {});

/// Medial hyperidentity on Z_n and |binary clone slice| = n^2.
Report verify_section1(std::size_t n, const Limits& limits = {});

/// Rectangular band hyperidentities and abelianness, the lattice
/// hyper-quasi-identity with its case split, and the term condition on Z4/S3.
Report verify_section3(const Limits& limits = {});

Report verify_all(const Limits& limits = {});

/// Direct spectra with |I| <= 3 built from K: identity chains, a V shape and
/// chains through homomorphisms between members.
std::vector<DirectSpectrum> generated_spectra(const std::vector<FiniteAlgebra>& k,
                                              std::size_t max_spectra = 64);

/// All homomorphisms a -> b by brute force over maps (at most `cap` maps examined).
std::vector<ElementMap> all_homomorphisms(const FiniteAlgebra& a, const FiniteAlgebra& b,
                                          std::size_t cap = 1u << 20);

}  // namespace hyperq
