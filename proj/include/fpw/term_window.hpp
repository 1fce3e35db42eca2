#pragma once

// Bounded windows of the term algebra: all terms of depth <= d over a finite
// variable set, in canonical order, with hash-consed ids.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpw/algebra.hpp"

namespace fpw {

  using TermId = std::uint32_t;

  class TermWindow {
   public:
    static constexpr std::size_t default_cap = 2'000'000;

    // Throws BoundExceeded if the window would hold more than `cap` terms,
    // InvariantError if it would be empty or has more than 64 variables.
    TermWindow(Signature                sig,
               std::vector<std::string> variables,
               std::size_t              depth,
               std::size_t              cap = default_cap);

    Signature const& signature() const noexcept {
      return _sig;
    }
    std::vector<std::string> const& variables() const noexcept {
      return _vars;
    }
    std::size_t depth() const noexcept {
      return _depth;
    }
    std::size_t size() const noexcept {
      return _terms.size();
    }

    Term const& term(TermId id) const {
      return _terms.at(id);
    }
    std::span<Term const> terms() const noexcept {
      return _terms;
    }

    std::optional<TermId> find(Term const& t) const;

    // Structure of term `id`: the head is a symbol index, or a variable
    // index when `is_variable(id)`.
    bool is_variable(TermId id) const {
      return _nodes[id].is_var;
    }
    std::uint32_t head(TermId id) const {
      return _nodes[id].head;
    }
    std::span<TermId const> children(TermId id) const {
      auto const& n = _nodes[id];
      return {_child_pool.data() + n.child_offset, n.arity};
    }
    std::size_t depth_of(TermId id) const {
      return _nodes[id].depth;
    }
    // Bit i set iff variable i occurs.
    std::uint64_t variable_mask(TermId id) const {
      return _nodes[id].var_mask;
    }
    std::uint64_t mask_of(std::span<std::string const> vars) const;

    // Hash-consed lookup of symbol `head` applied to `children`.
    std::optional<TermId> find_node(std::uint32_t head, std::span<TermId const> children) const;
    std::optional<TermId> find_variable(std::string_view name) const;

    // Ids of all terms whose variables lie in `mask`.
    std::vector<TermId> restricted_to(std::uint64_t mask) const;

   private:
    struct Node {
      bool          is_var;
      std::uint32_t head;
      std::uint32_t arity;
      std::uint32_t child_offset;
      std::uint32_t depth;
      std::uint64_t var_mask;
    };
    struct KeyHash {
      std::size_t operator()(std::vector<std::uint32_t> const& k) const noexcept;
    };

    std::vector<std::uint32_t> key(std::uint32_t head, std::span<TermId const> children) const;

    Signature                                                          _sig;
    std::vector<std::string>                                           _vars;
    std::size_t                                                        _depth;
    std::vector<Term>                                                  _terms;
    std::vector<Node>                                                  _nodes;
    std::vector<TermId>                                                _child_pool;
    std::unordered_map<std::vector<std::uint32_t>, TermId, KeyHash>    _index;
  };

  // All terms of depth <= d over `vars`, in canonical order.
  TermWindow enumerate_terms(Signature const&                sig,
                             std::vector<std::string> const& vars,
                             std::size_t                     depth,
                             std::size_t                     cap = TermWindow::default_cap);

}  // namespace fpw
