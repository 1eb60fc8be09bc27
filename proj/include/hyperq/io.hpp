#pragma once

// Line-oriented algebra text format:
//
//   algebra <name>
//   size <n>
//   op <symbol> <arity>
//   table <v0> <v1> ... <v_{n^arity - 1}>
//
// `op`/`table` pairs repeat per symbol, `#` starts a comment, blank lines
// are ignored.

#include <string>

#include "hyperq/algebra.hpp"

namespace hyperq {

FiniteAlgebra parse_algebra(std::string_view text);
FiniteAlgebra read_algebra_file(const std::string& path);
std::string format_algebra(const FiniteAlgebra& a);

std::string read_text_file(const std::string& path);

}  // namespace hyperq
