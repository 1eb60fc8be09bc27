#pragma once

// Terms, hyperterms and Horn formulas, plus the formula DSL.
//
//   formula := [eq ("&" eq)* "->"] eq
//   eq      := term "=" term
//   term    := IDENT | IDENT "(" [term ("," term)*] ")"
//
// A lowercase identifier without parentheses is a variable, with
// parentheses a signature symbol (nullary symbols are written `c()`).
// An uppercase identifier with parentheses is a hypervariable.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hyperq/algebra.hpp"

namespace hyperq {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A term over a signature, optionally containing hypervariable
/// applications. A term without HyperApply nodes is a plain term.
struct Term {
  enum class Kind { Variable, Apply, HyperApply };

  Kind kind = Kind::Variable;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string name) { return {Kind::Variable, std::move(name), {}}; }
  static Term apply(std::string symbol, std::vector<Term> args) {
    return {Kind::Apply, std::move(symbol), std::move(args)};
  }
  static Term hyper(std::string hypervariable, std::vector<Term> args) {
    return {Kind::HyperApply, std::move(hypervariable), std::move(args)};
  }

  bool is_variable() const { return kind == Kind::Variable; }
  bool contains_hypervariable() const;
  std::size_t depth() const;

  bool operator==(const Term&) const = default;
};

struct Equation {
  Term lhs;
  Term rhs;

  bool operator==(const Equation&) const = default;
};

struct HornFormula {
  std::vector<Equation> premises;
  Equation conclusion;

  bool is_hyper() const;
  bool is_identity() const { return premises.empty(); }

  /// Variables in order of first occurrence, left to right.
  std::vector<std::string> variables() const;
  /// Hypervariables with arities, in order of first occurrence; throws on
  /// inconsistent arity.
  std::vector<std::pair<std::string, std::size_t>> hypervariables() const;

  bool operator==(const HornFormula&) const = default;
};

/// Hypervariable name -> basic symbol name.
using Binding = std::map<std::string, std::string>;

HornFormula parse_formula(std::string_view src, const Signature& sig);
Term parse_term(std::string_view src, const Signature& sig);

/// Parses a `.horn` document: one formula per line, `#` comments.
std::vector<HornFormula> parse_horn_file(std::string_view text, const Signature& sig);

std::string to_string(const Term& t);
std::string to_string(const Equation& e);
std::string to_string(const HornFormula& f);

/// Checks symbols and arities against `sig` (parser output already satisfies this).
void check_well_formed(const Term& t, const Signature& sig);

/// Variable name -> element; looked up by name.
using Assignment = std::map<std::string, Element>;

Element eval_term(const FiniteAlgebra& a, const Term& t, const Assignment& asg);

struct TermOperation {
  std::size_t arity = 0;
  Table table;
  Term witness;  // over the formal variables x1..x_arity

  bool operator==(const TermOperation&) const = default;
};

/// Formal variable names used by witness terms: x1, x2, ...
std::string formal_variable(std::size_t i);
std::vector<std::string> formal_variables(std::size_t arity);

TermOperation term_to_table(const FiniteAlgebra& a, const Term& t,
                            const std::vector<std::string>& var_order);

/// Replaces every basic symbol with its own hypervariable F1, F2, ...
/// numbered by first occurrence.
HornFormula transform_T(const HornFormula& q);
/// The binding under which transform_Tinv inverts transform_T(q).
Binding canonical_binding(const HornFormula& q);

HornFormula transform_Tinv(const HornFormula& h, const Binding& binding, const Signature& sig);

}  // namespace hyperq
