#pragma once

// Compatibility of congruences with subsets, the Leibniz operator, matrix
// reduction and the left adjoint L over a family of filters.

#include <span>
#include <vector>

#include "fpw/algebra.hpp"
#include "fpw/congruence.hpp"

namespace fpw {

  // θ does not relate members of F with non-members (F is a union of blocks).
  bool is_compatible(Congruence const& theta, ElemSet const& f);

  // Ω^A(F): the greatest congruence of A compatible with F, computed as the
  // join of the compatible principal congruences.
  Congruence leibniz_omega(FiniteAlgebra const& a, ElemSet const& f);

  struct Matrix {
    FiniteAlgebra algebra;
    ElemSet       designated;
  };

  // ⟨A/Ω(F), F/Ω(F)⟩.
  Matrix reduce_matrix(Matrix const& m);
  bool   is_reduced(Matrix const& m);
  // Isomorphism of matrices: an algebra isomorphism carrying one designated
  // set onto the other.
  bool matrices_isomorphic(Matrix const& x, Matrix const& y);

  // Intersection of the filters F in the family with θ ⊆ Ω(F); the full
  // carrier when there are none.
  ElemSet left_adjoint_L(FiniteAlgebra const& a, Congruence const& theta, std::span<ElemSet const> filters);

}  // namespace fpw
