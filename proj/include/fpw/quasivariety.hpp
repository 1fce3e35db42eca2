#pragma once

// Equations, quasi-identities, quasivariety presentations, membership and
// relative congruences.

#include <compare>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpw/algebra.hpp"
#include "fpw/congruence.hpp"

namespace fpw {

  struct Equation {
    Term lhs;
    Term rhs;

    std::set<std::string> variables() const;
    // "lhs = rhs"
    std::string to_string() const;

    friend bool                 operator==(Equation const&, Equation const&) = default;
    friend std::strong_ordering operator<=>(Equation const&, Equation const&) = default;
  };

  struct QuasiIdentity {
    std::vector<Equation> premises;
    Equation              conclusion;

    std::set<std::string> variables() const;
    // "p1 = q1 & p2 = q2 -> p = q"
    std::string to_string() const;

    friend bool operator==(QuasiIdentity const&, QuasiIdentity const&) = default;
  };

  // "t = u"
  Equation parse_equation(std::string_view text, Signature const& sig);
  // "t1 = u1 & t2 = u2 -> t = u"; an empty premise list is written "-> t = u".
  QuasiIdentity parse_quasi_identity(std::string_view text, Signature const& sig);

  struct QuasivarietySpec {
    std::string                  name;
    Signature                    signature;
    std::vector<Equation>        identities;
    std::vector<QuasiIdentity>   quasi_identities;
    std::optional<std::string>   point;
    // Finite members used to seed countermodel search; never consulted for
    // membership.
    std::vector<FiniteAlgebra>   generators;

    // Throws InvariantError on ill-formed axioms, a point that is not a
    // constant, or a generator outside the class.
    void validate() const;
    bool is_variety() const noexcept {
      return quasi_identities.empty();
    }
    std::size_t axiom_count() const noexcept {
      return identities.size() + quasi_identities.size();
    }
    // Axiom number i in the fixed order identities-then-quasis.
    std::string axiom_to_string(std::size_t i) const;
  };

  // The class of all algebras over `sig`.
  QuasivarietySpec all_algebras(Signature sig, std::string name = "all");

  inline constexpr std::size_t default_variable_cap = 4;

  // A failing axiom instance. `axiom` indexes identities then quasis.
  struct Violation {
    std::size_t axiom;
    Assignment  assignment;
    Elem        lhs_value;
    Elem        rhs_value;

    std::string describe(QuasivarietySpec const& k, FiniteAlgebra const& a) const;
  };

  // Exhaustive over carrier^|vars|. Throws BoundExceeded for an axiom with more
  // than `variable_cap` variables, MismatchError on a signature mismatch.
  bool satisfies(FiniteAlgebra const& a, Equation const& e, std::size_t variable_cap = default_variable_cap);
  bool satisfies(FiniteAlgebra const&  a,
                 QuasiIdentity const& q,
                 std::size_t          variable_cap = default_variable_cap);

  // First violation in the order identities-then-quasis, assignments
  // lexicographic in sorted variable order.
  std::optional<Violation> find_violation(FiniteAlgebra const&    a,
                                          QuasivarietySpec const& k,
                                          std::size_t             variable_cap = default_variable_cap);

  bool member_of_K(FiniteAlgebra const&    a,
                   QuasivarietySpec const& k,
                   std::size_t             variable_cap = default_variable_cap);

  // Co_K(A) = {θ : A/θ ∈ K}, sorted.
  std::vector<Congruence> relative_congruences(FiniteAlgebra const&    a,
                                               QuasivarietySpec const& k,
                                               std::size_t             max_size = 8);

  bool is_relative_congruence(FiniteAlgebra const& a, Congruence const& theta, QuasivarietySpec const& k);

  // Least θ ⊇ pairs with A/θ ∈ K.
  Congruence k_congruence_generated(FiniteAlgebra const&      a,
                                    std::span<ElemPair const> pairs,
                                    QuasivarietySpec const&   k);
  Congruence min_k_congruence(FiniteAlgebra const& a, QuasivarietySpec const& k);

  struct ClosureViolation {
    enum class Kind { Subalgebra, Product };
    Kind        kind;
    std::string algebra;  // offending subalgebra or product
    std::string detail;
  };

  struct ClosureReport {
    std::size_t                   algebras_checked    = 0;
    std::size_t                   subalgebras_checked = 0;
    std::size_t                   products_checked    = 0;
    std::size_t                   products_skipped    = 0;
    std::vector<ClosureViolation> violations;

    bool closed() const noexcept {
      return violations.empty();
    }
  };

  using MembershipOracle = std::function<bool(FiniteAlgebra const&)>;

  // For each listed algebra in the class: every subalgebra (up to isomorphism)
  // and every pairwise product of size <= size_bound must be in the class.
  // Algebras outside the class are skipped. Products above the bound are
  // counted as skipped.
  ClosureReport closure_diagnostics(std::span<FiniteAlgebra const> algebras,
                                    MembershipOracle const&        in_class,
                                    std::size_t                    size_bound);
  ClosureReport closure_diagnostics(std::span<FiniteAlgebra const> algebras,
                                    QuasivarietySpec const&        k,
                                    std::size_t                    size_bound);

}  // namespace fpw
