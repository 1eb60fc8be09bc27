#pragma once

// Decision procedures for identities, quasi-identities, hyperidentities and
// hyper-quasi-identities in a finite algebra, by exhaustive search.
//
// Search order is fixed: hypersubstitutions outer (first hypervariable
// fastest), assignments inner (row-major in first-occurrence variable order).
// The first violation in that order is the reported witness.

#include <optional>
#include <string>
#include <vector>

#include "hyperq/clone.hpp"

namespace hyperq {

struct Witness {
  bool hyper = false;  // print a sigma block
  Hypersubstitution sigma;
  std::vector<std::pair<std::string, Element>> assignment;  // formula variable order
  std::size_t formula_index = 0;
};

struct Verdict {
  bool holds = true;
  std::optional<Witness> witness;  // present iff !holds

  explicit operator bool() const { return holds; }
};

Verdict holds_identity(const FiniteAlgebra& a, const HornFormula& f);
Verdict holds_quasi(const FiniteAlgebra& a, const HornFormula& f);
Verdict holds_hyperidentity(const FiniteAlgebra& a, const HornFormula& f,
                            const Limits& limits = {});
Verdict holds_hyperquasi(const FiniteAlgebra& a, const HornFormula& f,
                         const Limits& limits = {});

/// Up to `cap` violations in search order; empty iff the formula holds
/// (hyper-satisfaction when the formula has hypervariables).
std::vector<Witness> find_all_failures(const FiniteAlgebra& a, const HornFormula& f,
                                       const Limits& limits, std::size_t cap);

// -- Term condition ----------------------------------------------------------

struct TermConditionFailure {
  TermOperation op;
  Element u = 0;
  Element v = 0;
  std::vector<Element> x;
  std::vector<Element> y;
  /// true: f(u,x)=f(u,y) but f(v,x)!=f(v,y); false: the converse.
  bool forward = true;
};

struct AbelianVerdict {
  bool abelian = true;
  std::optional<TermConditionFailure> witness;

  explicit operator bool() const { return abelian; }
};

/// Term condition for every term operation of arity 2..max_arity.
AbelianVerdict is_abelian(const FiniteAlgebra& a, std::size_t max_arity,
                          const Limits& limits = {});

/// True iff the failure really violates the term condition in `a`.
bool confirms_term_condition_failure(const FiniteAlgebra& a, const TermConditionFailure& w);

/// `F(u,x1..) = F(u,y1..) -> F(v,x1..) = F(v,y1..)` for an m-ary F
/// (reverse swaps u and v).
HornFormula term_condition_formula(std::size_t arity, bool reverse, const Signature& sig);

// -- Witness lines -----------------------------------------------------------

/// `WITNESS sigma{F:=x1} asg{x:=0,y:=1} eq=0`; sigma omitted for plain checks,
/// entries sorted by name.
std::string emit_witness(const Verdict& v);
std::string emit_witness(const Witness& w);

struct WitnessRecord {
  std::optional<std::map<std::string, Term>> sigma;
  std::map<std::string, Element> assignment;
  std::size_t formula_index = 0;
};

WitnessRecord parse_witness_line(std::string_view line, const Signature& sig);

/// Re-evaluates the formula under the recorded hypersubstitution and
/// assignment by plain term evaluation; true iff the premises hold and the
/// conclusion fails.
bool replay_witness(const FiniteAlgebra& a, const HornFormula& f, const WitnessRecord& w);
bool replay_witness(const FiniteAlgebra& a, const HornFormula& f, const Witness& w);

}  // namespace hyperq
