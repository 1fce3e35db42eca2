#pragma once

// Finite model search for quasivariety presentations: backtracking over
// table cells with pruning by axiom instances that are already decided.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fpw/algebra.hpp"
#include "fpw/compiled_term.hpp"
#include "fpw/quasivariety.hpp"

namespace fpw {

  struct ModelSearchOptions {
    std::size_t size = 1;
    // Optional partial tables (one per signature symbol, n^arity cells,
    // `undefined_elem` for free cells). Empty means no prefilled cells.
    std::vector<std::vector<Elem>> prefilled;
    // Skip models isomorphic to one already visited. Only honoured without
    // prefilled cells, where relabelling is harmless.
    bool        dedupe_isomorphic = true;
    std::size_t variable_cap      = default_variable_cap;
    // Abort with BoundExceeded after this many search nodes.
    std::size_t node_budget = 50'000'000;
  };

  // Calls `visit` on every member of K with the given carrier size (and
  // prefilled cells) in a deterministic order; `visit` returns false to stop.
  // Returns the number of models visited.
  std::size_t enumerate_models(QuasivarietySpec const&                          k,
                               ModelSearchOptions const&                        options,
                               std::function<bool(FiniteAlgebra const&)> const& visit);

  // First enumerated model accepted by `accept`.
  std::optional<FiniteAlgebra> find_model(QuasivarietySpec const&                          k,
                                          ModelSearchOptions const&                        options,
                                          std::function<bool(FiniteAlgebra const&)> const& accept);

}  // namespace fpw
