#pragma once

// Finite algebras and first-order constructions over them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperq {

using Element = std::uint32_t;
using ElementMap = std::vector<Element>;
using Table = std::vector<Element>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by validate_algebra and the constructions that re-check their
/// inputs; carries one message per violation.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct Symbol {
  std::string name;
  std::size_t arity = 0;

  bool operator==(const Symbol&) const = default;
};

class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Text form used in diagnostics and battery headers, e.g. "plus:2 neg:1 zero:0".
  std::string to_string() const;

  bool operator==(const Signature&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

bool is_symbol_name(std::string_view s);
bool is_hypervariable_name(std::string_view s);

/// n^k with overflow detection.
std::size_t checked_power(std::size_t base, std::size_t exponent);

/// Row-major index with the first argument most significant.
std::size_t flat_index(std::span<const Element> args, std::size_t size);

/// Inverse of flat_index: fills `out` with the digits of `index`.
void unflatten(std::size_t index, std::size_t size, std::span<Element> out);

struct FiniteAlgebra {
  std::string name;
  Signature sig;
  std::size_t size = 0;
  std::vector<Table> tables;  // one per symbol, length size^arity

  Element apply(std::size_t symbol, std::span<const Element> args) const {
    return tables[symbol][flat_index(args, size)];
  }
  Element apply(std::string_view symbol, std::span<const Element> args) const;
};

std::vector<std::string> validation_errors(const FiniteAlgebra& a);
void validate_algebra(const FiniteAlgebra& a);

/// Lookup by symbol name with arity and range checks.
Element op_apply(const FiniteAlgebra& a, std::string_view symbol,
                 std::span<const Element> args);

/// Direct product; an empty family yields the one-element algebra of `sig`.
FiniteAlgebra direct_product(std::span<const FiniteAlgebra> family,
                             const Signature& sig);
FiniteAlgebra direct_product(std::span<const FiniteAlgebra> family);
FiniteAlgebra trivial_algebra(const Signature& sig, std::string name = "trivial");

/// Coordinates of a product element, first factor first.
std::vector<Element> product_coordinates(Element e, std::span<const std::size_t> sizes);
Element product_element(std::span<const Element> coords, std::span<const std::size_t> sizes);

// -- Subalgebras ------------------------------------------------------------

using Subuniverse = std::vector<Element>;  // sorted ascending

Subuniverse subuniverse_generated(const FiniteAlgebra& a, std::span<const Element> seed);
bool is_closed(const FiniteAlgebra& a, std::span<const Element> subset);

/// Restriction of `a` to a closed subset, renumbered in increasing order.
FiniteAlgebra restrict_to(const FiniteAlgebra& a, std::span<const Element> subset);

struct Subalgebra {
  Subuniverse elements;
  FiniteAlgebra algebra;
};

inline constexpr std::size_t kDefaultSubalgebraCap = 12;

std::vector<Subalgebra> all_subalgebras(const FiniteAlgebra& a,
                                        std::size_t cap = kDefaultSubalgebraCap);

// -- Homomorphisms and isomorphisms ----------------------------------------

struct HomCheck {
  bool ok = true;
  std::string symbol;         // first violating symbol when !ok
  std::vector<Element> args;  // and its argument tuple

  explicit operator bool() const { return ok; }
};

HomCheck is_homomorphism(const FiniteAlgebra& source, const FiniteAlgebra& target,
                         std::span<const Element> map);

/// Lexicographically least isomorphism a -> b, if any.
std::optional<ElementMap> iso_search(const FiniteAlgebra& a, const FiniteAlgebra& b);

bool is_surjective(std::span<const Element> map, std::size_t target_size);
bool is_injective(std::span<const Element> map);

// -- Quotients ---------------------------------------------------------------

struct Equivalence {
  std::size_t size = 0;
  std::vector<Element> rep;  // rep[rep[x]] == rep[x]

  static Equivalence identity(std::size_t n);
  static Equivalence total(std::size_t n);
  /// Builds the representative map from a class labelling; the least
  /// member of each class becomes its representative.
  static Equivalence from_labels(std::span<const std::size_t> labels);

  bool related(Element x, Element y) const { return rep[x] == rep[y]; }
  std::vector<Element> representatives() const;
};

struct CongruenceViolation {
  std::string symbol;
  std::vector<Element> lhs_args;
  std::vector<Element> rhs_args;
};

std::optional<CongruenceViolation> congruence_violation(const FiniteAlgebra& a,
                                                        const Equivalence& e);
FiniteAlgebra quotient(const FiniteAlgebra& a, const Equivalence& e);

// -- Filtered products -------------------------------------------------------

using IndexSet = std::uint32_t;  // bitmask over {0, ..., m-1}

struct FilterFamily {
  std::size_t index_size = 0;
  std::vector<IndexSet> members;  // kept sorted, unique

  static FilterFamily principal(std::size_t m, IndexSet generator);
  bool contains(IndexSet s) const;
  IndexSet full() const { return index_size == 32 ? ~IndexSet{0} : (IndexSet{1} << index_size) - 1; }
};

std::vector<std::string> filter_errors(const FilterFamily& f);
/// Subset S with neither S nor its complement in f, if any.
std::optional<IndexSet> ultrafilter_gap(const FilterFamily& f);
/// Every filter over {0,...,m-1}, found by brute force over families of subsets.
std::vector<FilterFamily> all_filters(std::size_t m);

Equivalence filter_equivalence(std::span<const FiniteAlgebra> family, const FilterFamily& f);
FiniteAlgebra reduced_product(std::span<const FiniteAlgebra> family, const FilterFamily& f);
FiniteAlgebra ultraproduct(std::span<const FiniteAlgebra> family, const FilterFamily& f);

// -- Direct limits -----------------------------------------------------------

struct DirectSpectrum {
  std::vector<std::vector<bool>> leq;           // leq[i][j] iff i <= j
  std::vector<FiniteAlgebra> algebras;
  std::vector<std::vector<ElementMap>> maps;    // maps[i][j] defined iff leq[i][j]

  std::size_t index_size() const { return algebras.size(); }
};

std::vector<std::string> spectrum_errors(const DirectSpectrum& s);

/// Index order used to pick upper bounds: a linear extension of <=,
/// smallest index first among the available minimal elements.
std::vector<std::size_t> topological_order(const DirectSpectrum& s);

/// Direct limit. With `upper_bound` unset the least upper bound in
/// topological order is used for every operation; otherwise `upper_bound`
/// is asked to pick one from the candidate list (for choice-independence tests).
using UpperBoundChooser = std::size_t (*)(std::span<const std::size_t> candidates);
FiniteAlgebra direct_limit(const DirectSpectrum& s, UpperBoundChooser upper_bound = nullptr);

bool is_superdirect(const DirectSpectrum& s);

bool is_subdirect(const FiniteAlgebra& b, std::span<const Element> embedding,
                  std::span<const FiniteAlgebra> family);

}  // namespace hyperq
