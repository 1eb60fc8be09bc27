#pragma once

// Clone slices (all term operations of one arity), hypersubstitutions and
// derived algebras.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hyperq/algebra.hpp"
#include "hyperq/term.hpp"

namespace hyperq {

inline constexpr std::size_t kDefaultCloneLimit = 4096;

struct Limits {
  std::size_t max_clone_ops = kDefaultCloneLimit;
  std::size_t max_arity = 3;
  std::size_t subalgebra_cap = kDefaultSubalgebraCap;
};

class CloneLimitExceeded : public Error {
 public:
  CloneLimitExceeded(std::size_t arity, std::size_t count)
      : Error("clone limit exceeded: " + std::to_string(count) + " operations of arity " +
              std::to_string(arity)),
        arity_(arity), count_(count) {}
  std::size_t arity() const { return arity_; }
  std::size_t count() const { return count_; }

 private:
  std::size_t arity_;
  std::size_t count_;
};

/// All term operations of one arity, sorted by table, no duplicates.
struct CloneSlice {
  std::size_t carrier_size = 0;
  std::size_t arity = 0;
  std::vector<TermOperation> ops;

  std::size_t size() const { return ops.size(); }
  /// Index of the operation with this table, or size() if absent.
  std::size_t find(const Table& table) const;
};

/// Breadth-first closure of the projections under the basic operations.
/// Operations first found in the same round are ordered by table; each keeps
/// the first witness produced for it (symbols in signature order, argument
/// tuples in lexicographic order of operation index).
CloneSlice clone_slice(const FiniteAlgebra& a, std::size_t arity,
                       std::size_t limit = kDefaultCloneLimit);

/// Memoizes clone_slice per arity for one algebra.
class SliceCache {
 public:
  SliceCache(const FiniteAlgebra& a, std::size_t limit) : algebra_(a), limit_(limit) {}
  const CloneSlice& get(std::size_t arity);

 private:
  const FiniteAlgebra& algebra_;
  std::size_t limit_;
  std::map<std::size_t, std::unique_ptr<CloneSlice>> slices_;
};

struct Hypersubstitution {
  std::vector<std::pair<std::string, TermOperation>> entries;

  const TermOperation* find(std::string_view name) const;
};

using HypervariableList = std::vector<std::pair<std::string, std::size_t>>;

/// Lazy cartesian product over clone slices. The first hypervariable varies
/// fastest.
class HypersubstitutionEnumerator {
 public:
  HypersubstitutionEnumerator(HypervariableList hypervars,
                              std::vector<const CloneSlice*> slices);

  /// Total number of hypersubstitutions (product of slice sizes).
  std::size_t count() const;
  /// Produces the next hypersubstitution; false when exhausted.
  bool next(Hypersubstitution& out);
  /// Slice indices of the most recent hypersubstitution.
  const std::vector<std::size_t>& indices() const { return indices_; }
  const std::vector<const CloneSlice*>& slices() const { return slices_; }

 private:
  HypervariableList hypervars_;
  std::vector<const CloneSlice*> slices_;
  std::vector<std::size_t> indices_;
  bool started_ = false;
  bool done_ = false;
};

HypersubstitutionEnumerator enumerate_hypersubstitutions(
    const HypervariableList& hypervars, const std::map<std::size_t, CloneSlice>& slices);

/// Replaces each hypervariable application by the witness term of its
/// operation, with the formal variables x1..xk substituted by the arguments.
Term apply_hypersubstitution(const Hypersubstitution& h, const Term& t);
HornFormula apply_hypersubstitution(const Hypersubstitution& h, const HornFormula& f);

/// Same carrier, each basic symbol's table replaced by sigma's choice.
FiniteAlgebra derived_algebra(const FiniteAlgebra& a, const Hypersubstitution& sigma);

/// The identity hypersubstitution: each symbol mapped to its own basic operation.
Hypersubstitution identity_hypersubstitution(const FiniteAlgebra& a);

struct DerivedAlgebra {
  Hypersubstitution sigma;
  FiniteAlgebra algebra;
};

/// Visits every derived algebra (one per choice of term operation for each
/// basic symbol). Stops early when `visit` returns false.
void for_each_derived_algebra(const FiniteAlgebra& a, const Limits& limits,
                              const std::function<bool(const DerivedAlgebra&)>& visit,
                              bool dedup = false);
std::vector<DerivedAlgebra> enumerate_derived_algebras(const FiniteAlgebra& a,
                                                       const Limits& limits, bool dedup = false);

}  // namespace hyperq
