#pragma once

// Small algebras and classes shared by the unit tests, built directly in code
// so the lower layers can be tested without the file readers.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fpw/algebra.hpp"
#include "fpw/quasivariety.hpp"

namespace fpw::fixtures {

  inline Signature unary_s() {
    return Signature({{"s", 1}});
  }

  inline Signature group_sig() {
    return Signature({{"mul", 2}, {"inv", 1}, {"e", 0}});
  }

  inline Signature semilattice_sig() {
    return Signature({{"meet", 2}, {"top", 0}});
  }

  // Unary algebra from a successor map.
  inline FiniteAlgebra unary(std::string name, std::vector<Elem> succ, std::vector<std::string> names = {}) {
    if (names.empty()) {
      for (std::size_t i = 0; i < succ.size(); ++i) {
        names.push_back(std::to_string(i));
      }
    }
    return FiniteAlgebra(std::move(name), unary_s(), std::move(names), {std::move(succ)});
  }

  // 0 -> 1 -> 2 -> 0 plus a fixed point z.
  inline FiniteAlgebra cyc3z() {
    return unary("cyc3z", {1, 2, 0, 3}, {"0", "1", "2", "z"});
  }

  inline FiniteAlgebra cyclic_group(std::size_t n) {
    auto const&       sig = group_sig();
    std::vector<Elem> mul(n * n), inv(n), e{0};
    for (Elem a = 0; a < n; ++a) {
      inv[a] = static_cast<Elem>((n - a) % n);
      for (Elem b = 0; b < n; ++b) {
        mul[a * n + b] = static_cast<Elem>((a + b) % n);
      }
    }
    // Tables follow the sorted signature: e, inv, mul.
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back(std::to_string(i));
    }
    std::vector<std::vector<Elem>> tables(sig.size());
    tables[sig.index("mul")] = mul;
    tables[sig.index("inv")] = inv;
    tables[sig.index("e")]   = e;
    return FiniteAlgebra("Z" + std::to_string(n), sig, names, tables);
  }

  // Symmetric group on three points; element i is the i-th permutation of
  // (0,1,2) in lexicographic order, so 0 is the identity.
  inline FiniteAlgebra s3() {
    std::vector<std::vector<int>> perms = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    auto find = [&](std::vector<int> const& p) {
      for (Elem i = 0; i < perms.size(); ++i) {
        if (perms[i] == p) {
          return i;
        }
      }
      return Elem{0};
    };
    auto const&       sig = group_sig();
    std::vector<Elem> mul(36), inv(6), e{0};
    for (Elem a = 0; a < 6; ++a) {
      std::vector<int> ia(3);
      for (int k = 0; k < 3; ++k) {
        ia[perms[a][k]] = k;
      }
      inv[a] = find(ia);
      for (Elem b = 0; b < 6; ++b) {
        std::vector<int> c(3);
        for (int k = 0; k < 3; ++k) {
          c[k] = perms[a][perms[b][k]];
        }
        mul[a * 6 + b] = find(c);
      }
    }
    std::vector<std::vector<Elem>> tables(sig.size());
    tables[sig.index("mul")] = mul;
    tables[sig.index("inv")] = inv;
    tables[sig.index("e")]   = e;
    return FiniteAlgebra("S3", sig, {"id", "t12", "t01", "c1", "c2", "t02"}, tables);
  }

  // Subsets of {0..k-1} under intersection with top = everything; element i
  // is the bit mask i.
  inline FiniteAlgebra powerset_semilattice(std::size_t k) {
    auto const&       sig = semilattice_sig();
    std::size_t const n   = std::size_t{1} << k;
    std::vector<Elem> meet(n * n), top{static_cast<Elem>(n - 1)};
    for (Elem a = 0; a < n; ++a) {
      for (Elem b = 0; b < n; ++b) {
        meet[a * n + b] = a & b;
      }
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back(std::to_string(i));
    }
    std::vector<std::vector<Elem>> tables(sig.size());
    tables[sig.index("meet")] = meet;
    tables[sig.index("top")]  = top;
    return FiniteAlgebra("P" + std::to_string(k), sig, names, tables);
  }

  inline QuasivarietySpec groups() {
    QuasivarietySpec k;
    k.name      = "groups";
    k.signature = group_sig();
    for (auto const* ax : {"mul(x,mul(y,z)) = mul(mul(x,y),z)",
                           "mul(x,e) = x",
                           "mul(e,x) = x",
                           "mul(x,inv(x)) = e",
                           "mul(inv(x),x) = e"}) {
      k.identities.push_back(parse_equation(ax, k.signature));
    }
    k.point = "e";
    return k;
  }

  inline QuasivarietySpec bounded_semilattices() {
    QuasivarietySpec k;
    k.name      = "semilattices";
    k.signature = semilattice_sig();
    for (auto const* ax : {"meet(x,x) = x",
                           "meet(x,y) = meet(y,x)",
                           "meet(x,meet(y,z)) = meet(meet(x,y),z)",
                           "meet(x,top) = x"}) {
      k.identities.push_back(parse_equation(ax, k.signature));
    }
    return k;
  }

  inline QuasivarietySpec unary_all() {
    return all_algebras(unary_s(), "unary");
  }

  // Every unary algebra on {0..n-1}.
  inline std::vector<FiniteAlgebra> all_unary(std::size_t n) {
    std::vector<FiniteAlgebra> out;
    std::vector<Elem>          succ(n, 0);
    while (true) {
      out.push_back(unary("u" + std::to_string(n) + "_" + std::to_string(out.size()), succ));
      std::size_t i = n;
      while (i > 0) {
        --i;
        if (++succ[i] < n) {
          break;
        }
        succ[i] = 0;
        if (i == 0) {
          return out;
        }
      }
    }
  }

  // A ⊆ B generated by one random element, and C extending a copy of A by
  // random elements; |B|, |C| <= max_size. Returns (A, B, C, iB, iC maps).
  struct UnarySpanData {
    FiniteAlgebra     a, b, c;
    std::vector<Elem> ib, ic;
  };

  inline UnarySpanData random_unary_span(std::mt19937_64& rng, std::size_t max_size = 6) {
    auto pick = [&](std::size_t lo, std::size_t hi) {
      return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::size_t const nb = pick(1, max_size);
    std::vector<Elem> sb(nb);
    for (auto& v : sb) {
      v = static_cast<Elem>(pick(0, nb - 1));
    }
    auto b = unary("B", sb);
    auto u = subuniverse_generated(b, ElemSet(nb, {static_cast<Elem>(pick(0, nb - 1))}));
    auto [a, inc] = subalgebra(b, u);
    std::size_t const na = a.size();
    std::size_t const nc = pick(na, std::max(na, max_size));
    std::vector<Elem> sc(nc);
    for (Elem x = 0; x < nc; ++x) {
      sc[x] = x < na ? a.table(0)[x] : static_cast<Elem>(pick(0, nc - 1));
    }
    std::vector<Elem> ic(na);
    for (Elem x = 0; x < na; ++x) {
      ic[x] = x;
    }
    return {unary("A", a.table(0)), b, unary("C", sc), inc.map(), ic};
  }

}  // namespace fpw::fixtures
