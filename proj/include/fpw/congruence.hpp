#pragma once

// Congruences on finite algebras: generation, the full lattice, joins and
// meets, quotients.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpw/algebra.hpp"

namespace fpw {

  using ElemPair = std::pair<Elem, Elem>;

  // A partition of a carrier, stored as a block label per element where each
  // block is labelled by its least member. `certified()` records that the
  // partition was checked to be compatible with every operation of the
  // algebra it was built for.
  class Congruence {
   public:
    Congruence() = default;

    // Canonicalises an arbitrary labelling (equal labels = same block) and
    // certifies it against `a` if it is compatible.
    static Congruence from_partition(FiniteAlgebra const& a, std::span<Elem const> labels);
    // Parses "[[0,2],[1,3]]" (indices, element names or JSON strings); elements not
    // mentioned form singleton blocks.
    static Congruence parse(FiniteAlgebra const& a, std::string_view text);

    std::size_t universe() const noexcept {
      return _label.size();
    }
    Elem block_of(Elem a) const {
      return _label.at(a);
    }
    bool related(Elem a, Elem b) const {
      return _label.at(a) == _label.at(b);
    }
    std::vector<Elem> const& labels() const noexcept {
      return _label;
    }
    std::size_t num_blocks() const noexcept;
    // Blocks sorted by least member, each sorted.
    std::vector<std::vector<Elem>> blocks() const;
    ElemSet                        block_set(Elem a) const;

    bool certified() const noexcept {
      return _certified;
    }
    std::uint64_t algebra_fingerprint() const noexcept {
      return _fingerprint;
    }

    bool is_diagonal() const noexcept {
      return num_blocks() == universe();
    }
    bool is_full() const noexcept {
      return num_blocks() == 1;
    }

    // Inclusion of relations (this refines other).
    bool is_subset_of(Congruence const& other) const;

    // "[[0,2],[1,3]]"
    std::string to_string() const;

    friend bool operator==(Congruence const& a, Congruence const& b) noexcept {
      return a._label == b._label;
    }
    // Canonical lattice order used for sorting: finer first (more blocks),
    // then by label vector.
    friend std::strong_ordering operator<=>(Congruence const& a, Congruence const& b) noexcept;

   private:
    Congruence(std::vector<Elem> labels, bool certified, std::uint64_t fp)
        : _label(std::move(labels)), _certified(certified), _fingerprint(fp) {}

    friend Congruence congruence_from_union_find(FiniteAlgebra const&, std::vector<Elem>&);

    std::vector<Elem> _label;
    bool              _certified   = false;
    std::uint64_t     _fingerprint = 0;
  };

  // Whether a labelling is compatible with every operation of `a`.
  bool is_compatible_partition(FiniteAlgebra const& a, std::span<Elem const> labels);

  Congruence diagonal(FiniteAlgebra const& a);
  Congruence full(FiniteAlgebra const& a);

  // Least congruence containing `pairs`: union-find seeding followed by
  // one-step operation closure until fixpoint.
  Congruence congruence_generated(FiniteAlgebra const& a, std::span<ElemPair const> pairs);
  Congruence principal_congruence(FiniteAlgebra const& a, Elem x, Elem y);

  // Cutoff for exhaustive partition enumeration.
  constexpr std::size_t partition_enumeration_cutoff = 8;

  // The complete congruence lattice, sorted. Throws BoundExceeded when
  // |A| > max_size.
  std::vector<Congruence> all_congruences(FiniteAlgebra const& a, std::size_t max_size = 8);

  // Throws MismatchError when the congruences live on different algebras.
  Congruence join(FiniteAlgebra const& a, Congruence const& x, Congruence const& y);
  Congruence meet(FiniteAlgebra const& a, Congruence const& x, Congruence const& y);

  // A/θ with blocks numbered by least member, and the projection.
  // Throws InvariantError unless θ is certified for `a`.
  std::pair<FiniteAlgebra, Homomorphism> quotient(FiniteAlgebra const& a, Congruence const& theta);

  Congruence kernel(Homomorphism const& f);
  // f^{-1}(θ) for θ a congruence on the target of f.
  Congruence pullback(Homomorphism const& f, Congruence const& theta);

}  // namespace fpw
