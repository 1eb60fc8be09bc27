#pragma once

// Naive reference checker used only by tests. It shares nothing with the
// library's search code: term operations are found by composing terms and
// evaluating them recursively, and formulas are checked by recursive
// enumeration of hypersubstitutions and assignments.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hyperq/term.hpp"

namespace oracle {

using hyperq::Element;
using hyperq::FiniteAlgebra;
using hyperq::HornFormula;
using hyperq::Table;
using hyperq::Term;

struct OpInterp {
  std::size_t arity = 0;
  Table table;
};
using HyperInterp = std::map<std::string, OpInterp>;
using Env = std::map<std::string, Element>;

Element eval(const FiniteAlgebra& a, const Term& t, const Env& env, const HyperInterp& hyper = {});

/// Table of `t` over variables x1..xk (first variable most significant).
Table table_of(const FiniteAlgebra& a, const Term& t, std::size_t k);

/// Tables of all k-ary term operations, by composing terms until nothing new appears.
std::set<Table> term_operations(const FiniteAlgebra& a, std::size_t k);

/// Hyper-satisfaction when the formula has hypervariables, plain satisfaction otherwise.
bool holds(const FiniteAlgebra& a, const HornFormula& f);

/// True iff premises hold and the conclusion fails under this interpretation.
bool violates(const FiniteAlgebra& a, const HornFormula& f, const Env& env, const HyperInterp& hyper);

}  // namespace oracle
