#pragma once

// Equational filter pairs (Co_K, i^τ): the maps i and Ξ on finite algebras,
// the induced closure operator, i-filters, naturality and adjunction checks,
// and the consequence relation of the associated logic.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpw/algebra.hpp"
#include "fpw/certificate.hpp"
#include "fpw/congruence.hpp"
#include "fpw/eqlogic.hpp"
#include "fpw/quasivariety.hpp"

namespace fpw {

  // Equations ⟨δ, ε⟩ in the single variable x.
  struct EquationSetTau {
    std::vector<Equation> equations;

    // Throws InvariantError if empty or if a term uses a variable other
    // than x or is ill-formed over `sig`.
    void        validate(Signature const& sig) const;
    std::string to_string() const;
    // Largest term depth in τ.
    std::size_t depth() const;
  };

  inline constexpr std::string_view tau_variable = "x";

  enum class ExactOracle { SuccessorFixedPoint };

  std::string_view           to_string(ExactOracle o) noexcept;
  std::optional<ExactOracle> parse_oracle_tag(std::string_view tag) noexcept;

  struct FilterPairInstance {
    std::string                name;
    QuasivarietySpec           k;
    EquationSetTau             tau;
    std::optional<ExactOracle> oracle;

    void validate() const;
    // Index of the constant c when τ = {x = c} (either orientation) and c is
    // the pointed constant of K.
    std::optional<std::size_t> assertional_constant() const;
    bool                       is_pointed_assertional() const {
      return assertional_constant().has_value();
    }
  };

  // The signature is {s/1}, K has no axioms and τ = {x = s(x)} up to
  // orientation.
  bool has_successor_shape(FilterPairInstance const& fp);

  // Throws InvariantError for an unknown tag or a pair of the wrong shape.
  FilterPairInstance register_exact_oracle(FilterPairInstance fp, std::string_view tag);

  // Exact consequence for the successor logic. A term is s^n(v); a theory
  // generated by terms has, per variable v, the threshold n_v = least n
  // with s^n(v) among the generators. s^m(w) belongs to the theory iff
  // m >= n_w, and the generated congruence relates s^a(v), s^b(w) iff they
  // are equal or v = w and a, b >= n_v.
  class SuccessorOracle {
   public:
    explicit SuccessorOracle(std::span<Term const> generators);
    static SuccessorOracle from_thresholds(std::map<std::string, std::size_t> thresholds);

    // (variable, n) for the term s^n(v); throws InvariantError otherwise.
    static std::pair<std::string, std::size_t> tower(Term const& t);

    std::optional<std::size_t> threshold(std::string const& v) const;
    std::map<std::string, std::size_t> const& thresholds() const noexcept {
      return _thresholds;
    }
    bool in_theory(Term const& phi) const;
    bool related(Term const& a, Term const& b) const;

   private:
    SuccessorOracle() = default;
    std::map<std::string, std::size_t> _thresholds;
  };

  // ⟨δ^A(a), ε^A(a)⟩.
  ElemPair tau_value(FiniteAlgebra const& a, Equation const& e, Elem elem);
  // All τ-pairs of the members of S.
  std::vector<ElemPair> tau_pairs(FiniteAlgebra const& a, ElemSet const& s, FilterPairInstance const& fp);

  // i(θ) = {a : every τ-pair of a lies in θ}. Throws InvariantError unless
  // θ ∈ Co_K(A).
  ElemSet i_tau(FiniteAlgebra const& a, Congruence const& theta, FilterPairInstance const& fp);
  // The same set without the Co_K membership check; used where the argument
  // is a plain congruence such as Ω(F).
  ElemSet i_tau_unchecked(FiniteAlgebra const& a, Congruence const& theta, FilterPairInstance const& fp);

  // Ξ(S): the K-congruence generated by the τ-pairs of S.
  Congruence xi(FiniteAlgebra const& a, ElemSet const& s, FilterPairInstance const& fp);
  // C(S) = i(Ξ(S)).
  ElemSet closure_c(FiniteAlgebra const& a, ElemSet const& s, FilterPairInstance const& fp);

  struct IFilterTable {
    std::vector<Congruence>  congruences;  // Co_K(A), sorted
    std::vector<ElemSet>     filters;      // distinct images, sorted
    std::vector<std::size_t> multiplicity; // congruences per filter
    std::vector<std::size_t> filter_of;    // filter index per congruence

    bool i_injective() const noexcept {
      return filters.size() == congruences.size();
    }
  };

  IFilterTable i_filters(FiniteAlgebra const& a, FilterPairInstance const& fp, std::size_t max_size = 8);

  // For every θ ∈ Co_K(target): f^{-1}(i(θ)) = i(f^{-1}(θ)).
  Certificate naturality_check(Homomorphism const& f, FilterPairInstance const& fp);

  struct AdjunctionOptions {
    // Exhaust all subsets when |A| <= this, else sample.
    std::size_t   exhaustive_limit = 12;
    std::size_t   samples          = 512;
    std::uint64_t seed             = 1;
  };

  // Ξ(S) ⊆ θ ⇔ S ⊆ i(θ) for subsets S and θ ∈ Co_K(A).
  Certificate adjunction_check(FiniteAlgebra const& a, FilterPairInstance const& fp, AdjunctionOptions const& opts = {});

  struct EntailsConfig {
    std::size_t      countermodel_size = 4;
    DerivationBudget budget;
    // Run every prong even after one has decided, and fail loudly on a
    // disagreement.
    bool cross_check = false;
  };

  struct EntailmentResult {
    Certificate                  certificate;
    std::string                  decided_by;  // "oracle", "derivation", "countermodel" or ""
    // One derivation per τ-instance of φ.
    std::vector<Derivation>      derivations;
    std::optional<FiniteAlgebra> countermodel;
    Assignment                   valuation;
  };

  // Γ ⊢ φ in the logic of the filter pair, i.e. the τ-instances of Γ entail
  // the τ-instances of φ over K. Precedence: exact oracle, derivation,
  // countermodel, undetermined. Throws InternalError when a proof and a
  // countermodel are both found.
  EntailmentResult entails(FilterPairInstance const& fp,
                           std::span<Term const>     gamma,
                           Term const&               phi,
                           EntailsConfig const&      config = {});

  // τ-instances of a formula: δ(φ) = ε(φ) for each ⟨δ, ε⟩ ∈ τ.
  std::vector<Equation> tau_instances(FilterPairInstance const& fp, Term const& phi);

}  // namespace fpw
