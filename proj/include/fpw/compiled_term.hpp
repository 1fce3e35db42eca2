#pragma once

// Terms flattened to postfix over fixed variable slots, for fast repeated
// evaluation in exhaustive loops.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fpw/algebra.hpp"

namespace fpw {

  // Marks an undefined table cell or value during partial evaluation.
  inline constexpr Elem undefined_elem = std::numeric_limits<Elem>::max();

  class CompiledTerm {
   public:
    CompiledTerm() = default;
    // `slots` fixes the variable numbering; every variable of `t` must occur.
    CompiledTerm(Term const& t, Signature const& sig, std::span<std::string const> slots);

    Elem eval(FiniteAlgebra const& a, std::span<Elem const> values) const;

    // Evaluation against possibly incomplete tables (undefined cells hold
    // `undefined_elem`); returns `undefined_elem` if a needed cell is unset.
    Elem eval_partial(std::span<std::vector<Elem> const> tables,
                      std::size_t                        n,
                      std::span<Elem const>              values) const;

   private:
    struct Op {
      bool          is_var;
      std::uint32_t index;  // variable slot or symbol index
      std::uint32_t arity;
    };
    std::vector<Op> _ops;
  };

}  // namespace fpw
