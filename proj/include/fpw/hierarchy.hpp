#pragma once

// Leibniz-hierarchy diagnostics over a corpus of finite algebras. Logic-level
// properties are only ever refuted with a witness or reported consistent up
// to the corpus.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpw/certificate.hpp"
#include "fpw/congruence.hpp"
#include "fpw/filterpair.hpp"

namespace fpw {

  struct SandwichRow {
    std::string algebra;
    Congruence  theta;
    Congruence  lower;  // Ξ(i(θ))
    Congruence  upper;  // Ω(i(θ))
    bool        lower_equal;
    bool        upper_equal;
  };

  struct SandwichReport {
    std::vector<SandwichRow> rows;
    std::size_t              algebras = 0;
    // Both inclusions were equalities on every row.
    bool equal_everywhere() const;
    json to_json(std::span<FiniteAlgebra const> corpus) const;
  };

  // Checks Ξ(i(θ)) ⊆ θ ⊆ Ω(i(θ)) for every θ ∈ Co_K(A) and every A; a failed
  // inclusion throws InternalError.
  SandwichReport sandwich_battery(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

  // Refuted when Ω fails to be an order embedding on the i-filters of some
  // algebra (two filters with one Ω, or an order violation either way).
  Certificate algebraizability_refute(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

  // Refuted when some i-filter F differs from {a : τ(a) ⊆ Ω(F)}.
  Certificate truth_equational_refute(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

  // Refuted by F ⊆ F' with Ω(F) ⊄ Ω(F'), or by Ω(F ∩ F') ≠ Ω(F) ∩ Ω(F').
  Certificate protoalgebraic_refute(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

  struct AssertionalReport {
    Certificate right_inverse;   // F = i(Ω(F))
    Certificate reduced_point;   // reduced i-matrices designate exactly the constant
    Certificate solution_set;    // reduced designated set = τ-solutions
    bool passed() const noexcept {
      return !right_inverse.is_refuted() && !reduced_point.is_refuted() && !solution_set.is_refuted();
    }
    json to_json() const;
  };

  // Throws InvariantError unless fp is pointed assertional.
  AssertionalReport assertional_checks(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

  struct IterationResult {
    // θ₀, θ₁, ... up to the first repeat (exclusive) or the step limit.
    std::vector<Congruence>    sequence;
    std::vector<std::size_t>   quotient_sizes;
    std::optional<std::size_t> stabilized_at;
    json                       to_json(FiniteAlgebra const& a) const;
  };

  // θ_{k+1} = Ω(i(θ_k)). Throws InvariantError unless θ₀ ∈ Co_K(A).
  IterationResult omega_i_iterate(FiniteAlgebra const&      a,
                                  Congruence const&         theta0,
                                  FilterPairInstance const& fp,
                                  std::size_t               max_steps = 32);

  // Ω(F) ⊆ θ ⇔ F ⊆ i(θ) over i-filters and K-congruences, plus L = i when no
  // protoalgebraicity violation was found. Throws InvariantError unless fp is
  // pointed assertional.
  Certificate rwa_probe(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

  struct HierarchyReport {
    SandwichReport                   sandwich;
    Certificate                      algebraizable;
    Certificate                      truth_equational;
    Certificate                      protoalgebraic;
    std::optional<AssertionalReport> assertional;
    std::optional<Certificate>       rwa;
    std::vector<std::string>         notes;

    Verdict verdict() const;
    int     exit_code() const;
    json    to_json(std::span<FiniteAlgebra const> corpus) const;
  };

  HierarchyReport hierarchy_report(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus);

}  // namespace fpw
