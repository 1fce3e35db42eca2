#pragma once

// Signatures, terms, finite algebras and homomorphisms.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fpw {

  // Carrier elements are always the indices 0..n-1.
  using Elem = std::uint32_t;

  struct Symbol {
    std::string name;
    std::size_t arity;

    friend bool operator==(Symbol const&, Symbol const&) = default;
    friend auto operator<=>(Symbol const&, Symbol const&) = default;
  };

  // A finite set of operation symbols, kept sorted by name so that two
  // signatures with the same symbols compare equal regardless of the order
  // in which they were declared.
  class Signature {
   public:
    Signature() = default;
    explicit Signature(std::vector<Symbol> symbols);

    std::size_t size() const noexcept {
      return _symbols.size();
    }
    Symbol const& operator[](std::size_t i) const {
      return _symbols[i];
    }
    std::span<Symbol const> symbols() const noexcept {
      return _symbols;
    }

    std::optional<std::size_t> find(std::string_view name) const;
    // Throws InvariantError for an unknown name.
    std::size_t index(std::string_view name) const;

    std::size_t max_arity() const noexcept;
    bool has_constants() const noexcept;
    // Every symbol has arity <= 1.
    bool is_unary() const noexcept;

    // "s/1 z/0"
    std::string to_string() const;

    friend bool operator==(Signature const&, Signature const&) = default;

   private:
    std::vector<Symbol> _symbols;
  };

  bool is_identifier(std::string_view s) noexcept;

  ////////////////////////////////////////////////////////////////////////
  // Terms
  ////////////////////////////////////////////////////////////////////////

  // Immutable first-order term with structural sharing. Ordering is the
  // canonical term order: depth, then head name, then children
  // lexicographically.
  class Term {
   public:
    static Term variable(std::string name);
    static Term apply(std::string symbol, std::vector<Term> args);

    bool is_variable() const noexcept;
    std::string const& name() const noexcept;
    std::span<Term const> args() const noexcept;
    std::size_t depth() const noexcept;
    std::size_t size() const noexcept;
    std::size_t hash() const noexcept;

    // var(t), sorted.
    std::set<std::string> variables() const;
    void collect_variables(std::set<std::string>& out) const;

    std::string to_string() const;

    friend bool                 operator==(Term const& a, Term const& b) noexcept;
    friend std::strong_ordering operator<=>(Term const& a, Term const& b) noexcept;

   private:
    struct Node;
    explicit Term(std::shared_ptr<Node const> n) : _node(std::move(n)) {}
    std::shared_ptr<Node const> _node;
  };

  using Substitution = std::map<std::string, Term>;

  // Simultaneous substitution; variables outside the map are left alone.
  Term substitute(Term const& t, Substitution const& sigma);

  // Checks that every application node matches a declared arity.
  void check_term(Term const& t, Signature const& sig);

  // Parses `text` against `sig`. Bare names that are not symbols are read as
  // variables.
  Term parse_term(std::string_view text, Signature const& sig);
  // As above, but bare non-symbol names must belong to `vars`.
  Term parse_term(std::string_view text,
                  Signature const&             sig,
                  std::set<std::string> const& vars);

  ////////////////////////////////////////////////////////////////////////
  // Element subsets
  ////////////////////////////////////////////////////////////////////////

  // Subset of a carrier {0..n-1}. Ordered by cardinality, then by the sorted
  // element list.
  class ElemSet {
   public:
    ElemSet() = default;
    explicit ElemSet(std::size_t universe) : _bits(universe, false) {}
    ElemSet(std::size_t universe, std::initializer_list<Elem> elems);
    ElemSet(std::size_t universe, std::span<Elem const> elems);

    static ElemSet full(std::size_t universe) {
      ElemSet s;
      s._bits.assign(universe, true);
      return s;
    }

    std::size_t universe() const noexcept {
      return _bits.size();
    }
    std::size_t count() const noexcept;
    bool        empty() const noexcept {
      return count() == 0;
    }
    bool is_full() const noexcept {
      return count() == universe();
    }
    bool contains(Elem a) const {
      return a < _bits.size() && _bits[a];
    }
    void insert(Elem a) {
      _bits.at(a) = true;
    }
    void erase(Elem a) {
      _bits.at(a) = false;
    }

    std::vector<Elem> elements() const;
    bool              is_subset_of(ElemSet const& other) const;
    ElemSet           intersect(ElemSet const& other) const;
    ElemSet           unite(ElemSet const& other) const;

    // "{0,2}"
    std::string to_string() const;

    friend bool operator==(ElemSet const&, ElemSet const&) = default;
    friend std::strong_ordering operator<=>(ElemSet const& a, ElemSet const& b);

   private:
    std::vector<bool> _bits;
  };

  ////////////////////////////////////////////////////////////////////////
  // Finite algebras
  ////////////////////////////////////////////////////////////////////////

  class FiniteAlgebra {
   public:
    // `tables[i]` is the table of signature symbol i, of length n^arity,
    // indexed in mixed radix with the first argument most significant.
    FiniteAlgebra(std::string                    name,
                  Signature                      sig,
                  std::vector<std::string>       element_names,
                  std::vector<std::vector<Elem>> tables);

    std::string const& name() const noexcept {
      return _name;
    }
    Signature const& signature() const noexcept {
      return _sig;
    }
    std::size_t size() const noexcept {
      return _names.size();
    }
    std::string const& element_name(Elem a) const {
      return _names.at(a);
    }
    std::vector<std::string> const& element_names() const noexcept {
      return _names;
    }
    std::optional<Elem> find_element(std::string_view name) const;

    std::vector<Elem> const& table(std::size_t symbol) const {
      return _tables.at(symbol);
    }
    std::vector<std::vector<Elem>> const& tables() const noexcept {
      return _tables;
    }

    Elem apply(std::size_t symbol, std::span<Elem const> args) const;
    Elem apply(std::string_view symbol, std::span<Elem const> args) const {
      return apply(_sig.index(symbol), args);
    }

    // Hash over signature and tables (names excluded).
    std::uint64_t fingerprint() const noexcept {
      return _fingerprint;
    }

    FiniteAlgebra renamed(std::string name) const;

    // Same signature and identical tables (names ignored).
    bool same_tables(FiniteAlgebra const& other) const noexcept {
      return _sig == other._sig && _tables == other._tables;
    }

   private:
    std::string                    _name;
    Signature                      _sig;
    std::vector<std::string>       _names;
    std::vector<std::vector<Elem>> _tables;
    std::uint64_t                  _fingerprint = 0;
  };

  // Index of `args` in a table over a carrier of size n.
  std::size_t tuple_index(std::size_t n, std::span<Elem const> args) noexcept;

  // Calls `fn(tuple, index)` for every tuple of carrier^arity in index order.
  void for_each_tuple(std::size_t n,
                      std::size_t arity,
                      std::function<void(std::span<Elem const>, std::size_t)> const& fn);

  class Homomorphism {
   public:
    // Verifies the homomorphism condition; throws InvariantError naming the
    // first failing symbol and tuple.
    Homomorphism(FiniteAlgebra source, FiniteAlgebra target, std::vector<Elem> map);

    // Description of the first failure, or nullopt if `map` is a
    // homomorphism.
    static std::optional<std::string> check(FiniteAlgebra const&  source,
                                            FiniteAlgebra const&  target,
                                            std::span<Elem const> map);

    FiniteAlgebra const& source() const noexcept {
      return *_source;
    }
    FiniteAlgebra const& target() const noexcept {
      return *_target;
    }
    std::vector<Elem> const& map() const noexcept {
      return _map;
    }
    Elem operator()(Elem a) const {
      return _map.at(a);
    }

    bool is_injective() const;
    bool is_surjective() const;

    // Image of a subset, preimage of a subset.
    ElemSet image(ElemSet const& s) const;
    ElemSet preimage(ElemSet const& s) const;

   private:
    std::shared_ptr<FiniteAlgebra const> _source;
    std::shared_ptr<FiniteAlgebra const> _target;
    std::vector<Elem>                    _map;
  };

  // g ∘ f; throws MismatchError if f's target is not g's source.
  Homomorphism compose(Homomorphism const& g, Homomorphism const& f);

  Homomorphism identity_homomorphism(FiniteAlgebra const& a);

  ////////////////////////////////////////////////////////////////////////
  // Evaluation and constructions
  ////////////////////////////////////////////////////////////////////////

  using Assignment = std::map<std::string, Elem>;

  // Throws InvariantError for an unassigned variable or unknown symbol.
  Elem evaluate(Term const& t, FiniteAlgebra const& a, Assignment const& assignment);

  // Componentwise product; carrier pairs (a, b) are numbered a * |B| + b.
  FiniteAlgebra product(FiniteAlgebra const& a, FiniteAlgebra const& b);

  // Least subset containing `s` and all constants, closed under all
  // operations.
  ElemSet subuniverse_generated(FiniteAlgebra const& a, ElemSet const& s);

  // The subalgebra on a (closed, non-empty) subuniverse together with its
  // inclusion homomorphism. Elements keep their relative order.
  std::pair<FiniteAlgebra, Homomorphism> subalgebra(FiniteAlgebra const& a,
                                                    ElemSet const&       universe);

  // All non-empty subuniverses, sorted. Throws BoundExceeded if |A| > max_size.
  std::vector<ElemSet> all_subuniverses(FiniteAlgebra const& a, std::size_t max_size = 16);

  // Isomorphism-invariant code: the lexicographically least table encoding
  // over all relabelings of the carrier (optionally including a designated
  // subset). Throws BoundExceeded if |A| > max_size.
  std::vector<Elem> canonical_code(FiniteAlgebra const& a,
                                   ElemSet const*       designated = nullptr,
                                   std::size_t          max_size   = 9);

  bool isomorphic(FiniteAlgebra const& a, FiniteAlgebra const& b);

}  // namespace fpw

template <>
struct std::hash<fpw::Term> {
  std::size_t operator()(fpw::Term const& t) const noexcept {
    return t.hash();
  }
};
