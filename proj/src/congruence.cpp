#include "fpw/congruence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "fpw/error.hpp"

namespace fpw {

  namespace {
    constexpr Elem none = std::numeric_limits<Elem>::max();

    class UnionFind {
     public:
      explicit UnionFind(std::size_t n) : _parent(n) {
        std::iota(_parent.begin(), _parent.end(), Elem{0});
      }
      Elem find(Elem a) {
        while (_parent[a] != a) {
          _parent[a] = _parent[_parent[a]];
          a          = _parent[a];
        }
        return a;
      }
      bool unite(Elem a, Elem b) {
        a = find(a);
        b = find(b);
        if (a == b) {
          return false;
        }
        if (a < b) {
          _parent[b] = a;
        } else {
          _parent[a] = b;
        }
        return true;
      }
      std::vector<Elem> labels() {
        std::vector<Elem> out(_parent.size());
        for (Elem a = 0; a < out.size(); ++a) {
          out[a] = find(a);
        }
        return out;
      }

     private:
      std::vector<Elem> _parent;
    };

    // Least-member labels from an arbitrary labelling.
    std::vector<Elem> canonical_labels(std::span<Elem const> labels) {
      std::vector<Elem> out(labels.size());
      std::vector<std::pair<Elem, Elem>> first;  // raw label -> least member
      for (Elem a = 0; a < labels.size(); ++a) {
        auto it = std::find_if(
            first.begin(), first.end(), [&](auto const& p) { return p.first == labels[a]; });
        if (it == first.end()) {
          first.emplace_back(labels[a], a);
          out[a] = a;
        } else {
          out[a] = it->second;
        }
      }
      return out;
    }

    // One closure pass: unite outputs of tuples that agree blockwise.
    bool close_once(FiniteAlgebra const& a, UnionFind& uf) {
      auto const&       sig     = a.signature();
      std::size_t const n       = a.size();
      bool              changed = false;
      std::vector<Elem> roots(n);
      for (Elem x = 0; x < n; ++x) {
        roots[x] = uf.find(x);
      }
      std::vector<Elem> rt;
      for (std::size_t f = 0; f < sig.size(); ++f) {
        std::size_t arity = sig[f].arity;
        if (arity == 0) {
          continue;
        }
        auto const&       tab = a.table(f);
        std::vector<Elem> seen(tab.size(), none);
        for_each_tuple(n, arity, [&](std::span<Elem const> t, std::size_t idx) {
          rt.resize(arity);
          for (std::size_t k = 0; k < arity; ++k) {
            rt[k] = roots[t[k]];
          }
          std::size_t key = tuple_index(n, rt);
          if (seen[key] == none) {
            seen[key] = tab[idx];
          } else if (uf.unite(seen[key], tab[idx])) {
            changed = true;
          }
        });
      }
      return changed;
    }
  }  // namespace

  Congruence congruence_from_union_find(FiniteAlgebra const& a, std::vector<Elem>& labels) {
    return Congruence(canonical_labels(labels), true, a.fingerprint());
  }

  bool is_compatible_partition(FiniteAlgebra const& a, std::span<Elem const> labels) {
    auto const&       sig = a.signature();
    std::size_t const n   = a.size();
    if (labels.size() != n) {
      return false;
    }
    for (Elem l : labels) {
      if (l >= n) {
        return false;
      }
    }
    std::vector<Elem> lt;
    for (std::size_t f = 0; f < sig.size(); ++f) {
      std::size_t arity = sig[f].arity;
      if (arity == 0) {
        continue;
      }
      auto const&       tab = a.table(f);
      std::vector<Elem> seen(tab.size(), none);
      bool              ok = true;
      for_each_tuple(n, arity, [&](std::span<Elem const> t, std::size_t idx) {
        if (!ok) {
          return;
        }
        lt.resize(arity);
        for (std::size_t k = 0; k < arity; ++k) {
          lt[k] = labels[t[k]];
        }
        std::size_t key = tuple_index(n, lt);
        Elem        out = labels[tab[idx]];
        if (seen[key] == none) {
          seen[key] = out;
        } else if (seen[key] != out) {
          ok = false;
        }
      });
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  Congruence Congruence::from_partition(FiniteAlgebra const& a, std::span<Elem const> labels) {
    if (labels.size() != a.size()) {
      throw InvariantError("partition has " + std::to_string(labels.size())
                           + " entries, algebra has " + std::to_string(a.size()));
    }
    auto canon = canonical_labels(labels);
    bool ok    = is_compatible_partition(a, canon);
    return Congruence(std::move(canon), ok, a.fingerprint());
  }

  Congruence Congruence::parse(FiniteAlgebra const& a, std::string_view text) {
    std::size_t const n = a.size();
    std::vector<Elem> labels(n);
    std::iota(labels.begin(), labels.end(), Elem{0});
    std::vector<bool> seen(n, false);
    std::size_t       pos = 0;
    auto              ws  = [&] {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
        ++pos;
      }
    };
    auto expect = [&](char c) {
      ws();
      if (pos >= text.size() || text[pos] != c) {
        throw ParseError(std::string("expected '") + c + "' in congruence", pos);
      }
      ++pos;
    };
    auto token = [&]() -> Elem {
      ws();
      std::size_t start = pos;
      std::string tok;
      if (pos < text.size() && text[pos] == '"') {
        auto close = text.find('"', pos + 1);
        if (close == std::string_view::npos) {
          throw ParseError("unterminated element name", start);
        }
        tok = std::string(text.substr(pos + 1, close - pos - 1));
        pos = close + 1;
      } else {
        while (pos < text.size() && text[pos] != ',' && text[pos] != ']' && text[pos] != ' ') {
          ++pos;
        }
        tok = std::string(text.substr(start, pos - start));
      }
      if (tok.empty()) {
        throw ParseError("expected an element", start);
      }
      if (auto e = a.find_element(tok)) {
        return *e;
      }
      bool digits = std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
      if (digits && std::stoul(tok) < n) {
        return static_cast<Elem>(std::stoul(tok));
      }
      throw ParseError("unknown element \"" + tok + "\"", start);
    };
    expect('[');
    ws();
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
    } else {
      while (true) {
        expect('[');
        std::vector<Elem> block;
        block.push_back(token());
        ws();
        while (pos < text.size() && text[pos] == ',') {
          ++pos;
          block.push_back(token());
          ws();
        }
        expect(']');
        for (Elem e : block) {
          if (seen[e]) {
            throw ParseError("element listed twice in congruence", pos);
          }
          seen[e]   = true;
          labels[e] = block.front();
        }
        ws();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        expect(']');
        break;
      }
    }
    ws();
    if (pos != text.size()) {
      throw ParseError("trailing input after congruence", pos);
    }
    return from_partition(a, labels);
  }

  std::size_t Congruence::num_blocks() const noexcept {
    std::size_t c = 0;
    for (Elem a = 0; a < _label.size(); ++a) {
      c += (_label[a] == a);
    }
    return c;
  }

  std::vector<std::vector<Elem>> Congruence::blocks() const {
    std::vector<std::vector<Elem>> out;
    std::vector<std::size_t>       slot(_label.size(), 0);
    for (Elem a = 0; a < _label.size(); ++a) {
      if (_label[a] == a) {
        slot[a] = out.size();
        out.push_back({a});
      } else {
        out[slot[_label[a]]].push_back(a);
      }
    }
    return out;
  }

  ElemSet Congruence::block_set(Elem a) const {
    ElemSet s(_label.size());
    for (Elem b = 0; b < _label.size(); ++b) {
      if (_label[b] == _label.at(a)) {
        s.insert(b);
      }
    }
    return s;
  }

  bool Congruence::is_subset_of(Congruence const& other) const {
    if (other.universe() != universe()) {
      return false;
    }
    for (Elem a = 0; a < _label.size(); ++a) {
      if (other._label[a] != other._label[_label[a]]) {
        return false;
      }
    }
    return true;
  }

  std::string Congruence::to_string() const {
    std::string out = "[";
    bool        first_block = true;
    for (auto const& b : blocks()) {
      out += first_block ? "[" : ",[";
      first_block = false;
      for (std::size_t i = 0; i < b.size(); ++i) {
        out += (i ? "," : "") + std::to_string(b[i]);
      }
      out += "]";
    }
    return out + "]";
  }

  std::strong_ordering operator<=>(Congruence const& a, Congruence const& b) noexcept {
    if (auto c = b.num_blocks() <=> a.num_blocks(); c != 0) {
      return c;
    }
    return a._label <=> b._label;
  }

  Congruence diagonal(FiniteAlgebra const& a) {
    std::vector<Elem> labels(a.size());
    std::iota(labels.begin(), labels.end(), Elem{0});
    return congruence_from_union_find(a, labels);
  }

  Congruence full(FiniteAlgebra const& a) {
    std::vector<Elem> labels(a.size(), 0);
    return congruence_from_union_find(a, labels);
  }

  Congruence congruence_generated(FiniteAlgebra const& a, std::span<ElemPair const> pairs) {
    UnionFind uf(a.size());
    for (auto [x, y] : pairs) {
      if (x >= a.size() || y >= a.size()) {
        throw InvariantError("congruence_generated: pair (" + std::to_string(x) + ","
                             + std::to_string(y) + ") out of range");
      }
      uf.unite(x, y);
    }
    while (close_once(a, uf)) {
    }
    auto labels = uf.labels();
    return congruence_from_union_find(a, labels);
  }

  Congruence principal_congruence(FiniteAlgebra const& a, Elem x, Elem y) {
    ElemPair p{x, y};
    return congruence_generated(a, std::span<ElemPair const>(&p, 1));
  }

  namespace {
    void enumerate_partitions(FiniteAlgebra const&     a,
                              std::vector<Elem>&       rgs,
                              std::size_t              pos,
                              Elem                     max_block,
                              std::vector<Congruence>& out) {
      std::size_t const n = a.size();
      if (pos == n) {
        if (is_compatible_partition(a, rgs)) {
          out.push_back(Congruence::from_partition(a, rgs));
        }
        return;
      }
      for (Elem b = 0; b <= max_block + 1 && b <= pos; ++b) {
        rgs[pos] = b;
        enumerate_partitions(a, rgs, pos + 1, std::max(max_block, b), out);
      }
    }
  }  // namespace

  std::vector<Congruence> all_congruences(FiniteAlgebra const& a, std::size_t max_size) {
    std::size_t const n = a.size();
    if (n > max_size) {
      throw BoundExceeded("all_congruences: |" + a.name() + "| = " + std::to_string(n)
                          + " exceeds the bound " + std::to_string(max_size));
    }
    std::vector<Congruence> out;
    if (n <= partition_enumeration_cutoff) {
      std::vector<Elem> rgs(n, 0);
      if (n == 1) {
        out.push_back(diagonal(a));
      } else {
        enumerate_partitions(a, rgs, 1, 0, out);
      }
    } else {
      // Every congruence is a join of principal congruences.
      std::set<Congruence> found;
      found.insert(diagonal(a));
      std::vector<Congruence> principal;
      for (Elem x = 0; x < n; ++x) {
        for (Elem y = x + 1; y < n; ++y) {
          principal.push_back(principal_congruence(a, x, y));
        }
      }
      std::sort(principal.begin(), principal.end());
      principal.erase(std::unique(principal.begin(), principal.end()), principal.end());
      std::vector<Congruence> frontier(principal.begin(), principal.end());
      for (auto const& p : principal) {
        found.insert(p);
      }
      while (!frontier.empty()) {
        std::vector<Congruence> next;
        for (auto const& c : frontier) {
          for (auto const& p : principal) {
            if (p.is_subset_of(c)) {
              continue;
            }
            auto j = join(a, c, p);
            if (found.insert(j).second) {
              next.push_back(std::move(j));
            }
          }
        }
        frontier = std::move(next);
      }
      out.assign(found.begin(), found.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  namespace {
    void check_same(FiniteAlgebra const& a, Congruence const& x, Congruence const& y) {
      if (x.universe() != a.size() || y.universe() != a.size()
          || (x.algebra_fingerprint() != a.fingerprint())
          || (y.algebra_fingerprint() != a.fingerprint())) {
        throw MismatchError("congruences do not belong to algebra " + a.name());
      }
    }
  }  // namespace

  Congruence join(FiniteAlgebra const& a, Congruence const& x, Congruence const& y) {
    check_same(a, x, y);
    std::vector<ElemPair> pairs;
    for (Elem e = 0; e < a.size(); ++e) {
      if (x.block_of(e) != e) {
        pairs.emplace_back(x.block_of(e), e);
      }
      if (y.block_of(e) != e) {
        pairs.emplace_back(y.block_of(e), e);
      }
    }
    return congruence_generated(a, pairs);
  }

  Congruence meet(FiniteAlgebra const& a, Congruence const& x, Congruence const& y) {
    check_same(a, x, y);
    std::vector<Elem> labels(a.size());
    for (Elem e = 0; e < a.size(); ++e) {
      labels[e] = static_cast<Elem>(x.block_of(e) * a.size() + y.block_of(e));
    }
    // Raw labels may exceed n; canonicalise through a relabelling.
    std::vector<Elem> compact(a.size());
    std::vector<Elem> keys;
    for (Elem e = 0; e < a.size(); ++e) {
      auto it = std::find(keys.begin(), keys.end(), labels[e]);
      if (it == keys.end()) {
        keys.push_back(labels[e]);
        compact[e] = static_cast<Elem>(keys.size() - 1);
      } else {
        compact[e] = static_cast<Elem>(it - keys.begin());
      }
    }
    return Congruence::from_partition(a, compact);
  }

  std::pair<FiniteAlgebra, Homomorphism> quotient(FiniteAlgebra const& a, Congruence const& theta) {
    if (!theta.certified() || theta.algebra_fingerprint() != a.fingerprint()
        || theta.universe() != a.size()) {
      throw InvariantError("quotient: " + theta.to_string() + " is not a certified congruence of "
                           + a.name());
    }
    auto const        blocks = theta.blocks();
    std::size_t const m      = blocks.size();
    std::vector<Elem> proj(a.size());
    for (std::size_t i = 0; i < m; ++i) {
      for (Elem e : blocks[i]) {
        proj[e] = static_cast<Elem>(i);
      }
    }
    std::vector<std::string> names;
    for (auto const& b : blocks) {
      std::string nm;
      for (std::size_t i = 0; i < b.size(); ++i) {
        nm += (i ? "~" : "") + a.element_name(b[i]);
      }
      names.push_back(std::move(nm));
    }
    auto const&                    sig = a.signature();
    std::vector<std::vector<Elem>> tables(sig.size());
    std::vector<Elem>              reps;
    for (std::size_t f = 0; f < sig.size(); ++f) {
      std::size_t arity = sig[f].arity;
      std::size_t cells = 1;
      for (std::size_t k = 0; k < arity; ++k) {
        cells *= m;
      }
      tables[f].resize(cells);
      for_each_tuple(m, arity, [&](std::span<Elem const> t, std::size_t idx) {
        reps.resize(arity);
        for (std::size_t k = 0; k < arity; ++k) {
          reps[k] = blocks[t[k]].front();
        }
        tables[f][idx] = proj[a.apply(f, reps)];
      });
    }
    FiniteAlgebra q(a.name() + "/" + theta.to_string(), sig, std::move(names), std::move(tables));
    Homomorphism  p(a, q, std::move(proj));
    return {std::move(q), std::move(p)};
  }

  Congruence kernel(Homomorphism const& f) {
    return Congruence::from_partition(f.source(), f.map());
  }

  Congruence pullback(Homomorphism const& f, Congruence const& theta) {
    if (theta.universe() != f.target().size()) {
      throw MismatchError("pullback: congruence does not live on the target of the map");
    }
    std::vector<Elem> labels(f.source().size());
    for (Elem e = 0; e < labels.size(); ++e) {
      labels[e] = theta.block_of(f(e));
    }
    return Congruence::from_partition(f.source(), labels);
  }

}  // namespace fpw
