#pragma once

// Amalgamation of finite members of K, theory lifting and flat theory
// amalgamation at window scale, and Craig interpolant extraction.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpw/algebra.hpp"
#include "fpw/certificate.hpp"
#include "fpw/filterpair.hpp"
#include "fpw/quasivariety.hpp"

namespace fpw {

  // Two injective homomorphisms out of a common A.
  class Span {
   public:
    // Throws InvariantError unless both legs are injective with one source.
    Span(Homomorphism ib, Homomorphism ic);

    FiniteAlgebra const& a() const noexcept {
      return _ib.source();
    }
    FiniteAlgebra const& b() const noexcept {
      return _ib.target();
    }
    FiniteAlgebra const& c() const noexcept {
      return _ic.target();
    }
    Homomorphism const& ib() const noexcept {
      return _ib;
    }
    Homomorphism const& ic() const noexcept {
      return _ic;
    }

   private:
    Homomorphism _ib;
    Homomorphism _ic;
  };

  struct Amalgam {
    Homomorphism eb;  // B → D
    Homomorphism ec;  // C → D
    FiniteAlgebra const& d() const noexcept {
      return eb.target();
    }
  };

  // First failing amalgam condition (legs injective, square commutes, D ∈ K
  // when `k` is given), or nullopt.
  std::optional<std::string> amalgam_failure(Span const& span, Amalgam const& m, QuasivarietySpec const* k = nullptr);

  json to_json(Span const& span, Amalgam const& m);

  // B and C glued along A, with the induced operations. Throws
  // InvariantError for a symbol of arity >= 2.
  Amalgam pushout_unary(Span const& span);

  struct AmalgamExhausted {
    std::size_t size_bound;
    std::string reason;
  };

  using AmalgamResult = std::variant<Amalgam, AmalgamExhausted>;

  // Searches D ∈ K with max(|B|,|C|) <= |D| <= size_bound. B is placed on the
  // first |B| elements of D and fresh elements are used in order, so each
  // candidate is tried once up to relabelling. Throws InvariantError unless A,
  // B, C ∈ K, BoundExceeded when the node budget runs out.
  AmalgamResult amalgamate_search(Span const&             span,
                                  QuasivarietySpec const& k,
                                  std::size_t             size_bound,
                                  std::size_t             node_budget = 50'000'000);

  // θ_T ∩ Fm(Z) = θ_T'' = θ_T' ∩ Fm(Z) within depth-`depth` windows, where T
  // is generated over X, T'' = T ∩ Fm(Z) and T' is generated over Y by T''.
  Certificate theory_lifting_probe(FilterPairInstance const&       fp,
                                   std::vector<std::string> const& x,
                                   std::vector<std::string> const& y,
                                   std::vector<Term> const&        generators,
                                   std::size_t                     depth);

  struct FlatAmalgamationOptions {
    // Bound for amalgamate_search, used when the signature is not unary or
    // the unary pushout leaves K.
    std::size_t size_bound  = 6;
    std::size_t node_budget = 5'000'000;
  };

  // Quotients of the X-, Y- and Z-windows by the closures of T, T' and T''
  // (with a sink element for operations leaving the window) are amalgamated,
  // and R = i(ker h) is pulled back to the X∪Y window; R ∩ Fm(X) = T and
  // R ∩ Fm(Y) = T' are checked on the window.
  Certificate flat_amalgamation_probe(FilterPairInstance const&       fp,
                                      std::vector<std::string> const& x,
                                      std::vector<std::string> const& y,
                                      std::vector<Term> const&        generators,
                                      std::size_t                     depth,
                                      FlatAmalgamationOptions const&  options = {});

  struct CraigConfig {
    std::size_t   window_depth = 6;
    EntailsConfig entails;
    // Greedily drop members of Γ' while Γ' ⊢ φ still holds.
    bool minimize = false;
  };

  enum class InterpolationStatus { Interpolated, NotEntailed, Undetermined, Failed };

  std::string_view to_string(InterpolationStatus s) noexcept;

  struct InterpolationResult {
    InterpolationStatus      status = InterpolationStatus::Undetermined;
    Certificate              certificate;
    std::vector<std::string> shared_variables;
    std::vector<Term>        interpolant;
    json                     to_json() const;
  };

  // Γ' = (window theory of Γ over var(Γ)) ∩ Fm(var(Γ) ∩ var(φ)), with Γ ⊢ Γ'
  // and Γ' ⊢ φ certified. Holds only when all three entailments hold.
  InterpolationResult craig_interpolate(FilterPairInstance const& fp,
                                        std::vector<Term> const&  gamma,
                                        Term const&               phi,
                                        CraigConfig const&        config = {});

}  // namespace fpw
