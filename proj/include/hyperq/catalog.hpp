#pragma once

// Built-in algebras: cyclic groups, small lattices, rectangular bands, S3.
//
// Lattice element order is fixed: N5 = (0, a, b, c, 1) with 0 < a < b < 1
// and c incomparable to a and b; M3 = (0, a1, a2, a3, 1).

#include <string>
#include <vector>

#include "hyperq/algebra.hpp"

namespace hyperq {

Signature group_signature();    // plus:2 neg:1 zero:0
Signature lattice_signature();  // meet:2 join:2
Signature band_signature();     // dot:2

FiniteAlgebra make_zn(std::size_t n);
/// "chain2" (alias "l2"), "n5", "m3".
FiniteAlgebra make_lattice(std::string_view name);
FiniteAlgebra make_rect_band(std::size_t m, std::size_t k);
FiniteAlgebra make_s3();

/// Names accepted by make_catalog_algebra, in listing order.
std::vector<std::string> catalog_names();
/// Resolves "zN", "chain2", "l2", "n5", "m3", "rbMxK", "s3".
FiniteAlgebra make_catalog_algebra(std::string_view name);

}  // namespace hyperq
