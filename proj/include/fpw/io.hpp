#pragma once

// Line-oriented text formats for algebras, quasivarieties and filter pairs.
//
//   algebra Z2
//   signature: mul/2 inv/1 e/0
//   carrier: 0 1
//   op mul: 0,0->0 0,1->1 1,0->1 1,1->0
//   op inv: 0->0 1->1
//   op e: ->0
//
//   quasivariety groups
//   signature: mul/2 inv/1 e/0
//   axiom: mul(x,e) = x
//   quasi: s(x) = s(y) -> x = y
//   point: e
//   generator: z2.alg
//
//   filterpair groups
//   include groups.qv          (or an inline quasivariety block)
//   tau: x = e
//   oracle: ls-successor-fixed-point
//
// '#' starts a comment. Relative paths resolve against the including file.

#include <filesystem>
#include <string>
#include <string_view>

#include "fpw/algebra.hpp"
#include "fpw/filterpair.hpp"
#include "fpw/leibniz.hpp"
#include "fpw/quasivariety.hpp"

namespace fpw {

  // All loaders throw ParseError (with a 1-based line) on malformed text and
  // InvariantError when a parsed object violates its invariants.
  FiniteAlgebra parse_algebra(std::string_view text);
  FiniteAlgebra load_algebra(std::filesystem::path const& path);

  // An algebra file with an extra "designated: <elements>" line.
  Matrix parse_matrix(std::string_view text);

  QuasivarietySpec parse_quasivariety(std::string_view text, std::filesystem::path const& base_dir = ".");
  QuasivarietySpec load_quasivariety(std::filesystem::path const& path);

  FilterPairInstance parse_filterpair(std::string_view             text,
                                      std::filesystem::path const& base_dir = ".",
                                      std::string                  default_name = "filterpair");
  FilterPairInstance load_filterpair(std::filesystem::path const& path);

  // Inverse of parse_algebra (tuples in table order).
  std::string write_algebra(FiniteAlgebra const& a);

}  // namespace fpw
