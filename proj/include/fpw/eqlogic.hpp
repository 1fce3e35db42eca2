#pragma once

// Bounded equational reasoning relative to a quasivariety: saturation of
// term windows under the Birkhoff rules plus quasi-identity detachment,
// replayable derivations, regularity analysis and the conservativity probe.
//
// Everything here works inside a finite window of terms. Window results are
// sound under-approximations of the consequence relation: a pair found
// related is genuinely entailed, while a missing pair may only need terms
// outside the window.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fpw/certificate.hpp"
#include "fpw/quasivariety.hpp"
#include "fpw/term_window.hpp"

namespace fpw {

  struct FilterPairInstance;

  enum class Rule {
    Reflexivity,
    Hypothesis,
    AxiomInstance,
    QuasiDetachment,
    Symmetry,
    Transitivity,
    CongruenceRule,
  };

  std::string_view to_string(Rule r) noexcept;

  struct DerivationStep {
    Equation equation;
    Rule     rule;
    // Hypothesis, identity or quasi-identity index, depending on `rule`.
    std::size_t              index = 0;
    Substitution             substitution;
    std::vector<std::size_t> refs;
    std::string              symbol;  // CongruenceRule only
  };

  struct Derivation {
    std::vector<Equation>       hypotheses;
    std::vector<DerivationStep> steps;
    Equation                    goal;

    bool uses_quasi_detachment() const;
    // Numbered step list, one step per line.
    std::string to_text() const;
    json        to_json() const;
  };

  // Independent step-by-step check of a derivation. Throws InvariantError
  // naming the first bad step.
  void replay(Derivation const& d, QuasivarietySpec const& k);
  bool replays(Derivation const& d, QuasivarietySpec const& k) noexcept;

  // A partition of the terms of a window.
  class WindowRelation {
   public:
    WindowRelation() = default;
    explicit WindowRelation(std::vector<TermId> labels) : _labels(std::move(labels)) {}

    std::size_t size() const noexcept {
      return _labels.size();
    }
    // Least id in the class of `t`.
    TermId class_of(TermId t) const {
      return _labels.at(t);
    }
    bool related(TermId a, TermId b) const {
      return _labels.at(a) == _labels.at(b);
    }
    std::vector<TermId> const& labels() const noexcept {
      return _labels;
    }
    std::size_t num_classes() const noexcept;

    friend bool operator==(WindowRelation const&, WindowRelation const&) = default;

   private:
    std::vector<TermId> _labels;
  };

  // Congruence closure of a window under hypotheses, axiom instances and
  // quasi-identity detachment, with a proof forest for explanations.
  class WindowSaturator {
   public:
    // Caps the number of precomputed axiom instances and of substitutions
    // tried per quasi-identity pass; exceeding either throws BoundExceeded.
    WindowSaturator(QuasivarietySpec const& k, TermWindow const& window, std::size_t instance_cap = 5'000'000);
    ~WindowSaturator();
    WindowSaturator(WindowSaturator&&) noexcept;

    TermWindow const& window() const noexcept;

    // Hypothesis sides must lie in the window (BoundExceeded otherwise).
    void add_hypotheses(std::span<Equation const> hyps);
    void saturate();

    bool           equal(TermId a, TermId b);
    WindowRelation relation();

    // A derivation of lhs = rhs from the hypotheses; requires equal(lhs, rhs).
    Derivation explain(TermId lhs, TermId rhs);

   private:
    struct Impl;
    std::unique_ptr<Impl> _impl;
  };

  // The window part of the consequence closure of Γ.
  WindowRelation cn_window(QuasivarietySpec const& k, std::span<Equation const> gamma, TermWindow const& window);

  struct DerivationBudget {
    std::size_t max_depth  = 6;
    std::size_t max_steps  = 10000;
    std::size_t window_cap = 200'000;
  };

  struct Exhausted {
    std::size_t depth_reached = 0;
    std::string reason;
  };

  using DeriveResult = std::variant<Derivation, Exhausted>;

  // Saturates windows over var(hypotheses ∪ goal) of increasing depth, from
  // the deepest input term up to the budget. Any returned derivation replays.
  DeriveResult derive(QuasivarietySpec const&  k,
                      std::span<Equation const> hypotheses,
                      Equation const&          goal,
                      DerivationBudget const&  budget = {});

  bool is_regular_equation(Equation const& e);

  struct RegularityReport {
    struct Item {
      std::string axiom;
      bool        regular;
    };
    std::vector<Item> axioms;
    // Every identity regular and no quasi-identities.
    bool regular = true;
    json to_json() const;
  };

  RegularityReport presentation_regularity(QuasivarietySpec const& k);

  // Replays `d` (throwing on failure), then Holds iff every step equation is
  // regular; RefutedBy names the first irregular step.
  Certificate derivation_regularity_check(Derivation const& d, QuasivarietySpec const& k);

  // Theory of a filter pair on a window: T = i(θ) where θ is the window
  // closure of the τ-instances of the generators. `members` holds the ids
  // whose τ-instances fit in the window and are related by θ.
  struct WindowTheory {
    WindowRelation      theta;
    std::vector<TermId> members;
  };

  WindowTheory window_theory(FilterPairInstance const& fp,
                             TermWindow const&         window,
                             std::span<Term const>     generators);

  // τ-instances of the given window terms that fit in the window, as
  // equations.
  std::vector<Equation> tau_instances(FilterPairInstance const& fp,
                                      TermWindow const&         window,
                                      std::span<TermId const>   terms);

  // Conservativity of the theory generated by `generators` (over X) with
  // respect to Z ⊆ X: within depth-`depth` windows, the X-closure of the
  // τ-instances of T restricted to Z-terms must equal the Z-closure of the
  // τ-instances of T ∩ Fm(Z). With an exact oracle both sides are also
  // compared with the oracle.
  Certificate conservativity_probe(FilterPairInstance const&       fp,
                                   std::vector<std::string> const& x,
                                   std::vector<std::string> const& z,
                                   std::span<Term const>           generators,
                                   std::size_t                     depth);

}  // namespace fpw
