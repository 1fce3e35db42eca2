#include "fpw/models.hpp"

#include <algorithm>
#include <set>

#include "fpw/compiled_term.hpp"
#include "fpw/error.hpp"

namespace fpw {

  namespace {
    struct Axiom {
      std::size_t                                        nvars;
      std::vector<std::pair<CompiledTerm, CompiledTerm>> premises;
      CompiledTerm                                       lhs;
      CompiledTerm                                       rhs;
    };

    Axiom compile_axiom(std::vector<Equation> const& premises,
                        Equation const&              conclusion,
                        Signature const&             sig,
                        std::size_t                  cap) {
      std::set<std::string> vs = conclusion.variables();
      for (auto const& p : premises) {
        p.lhs.collect_variables(vs);
        p.rhs.collect_variables(vs);
      }
      if (vs.size() > cap) {
        throw BoundExceeded("axiom with " + std::to_string(vs.size())
                            + " variables exceeds the variable cap " + std::to_string(cap));
      }
      std::vector<std::string> slots(vs.begin(), vs.end());
      Axiom                    ax;
      ax.nvars = slots.size();
      for (auto const& p : premises) {
        ax.premises.emplace_back(CompiledTerm(p.lhs, sig, slots), CompiledTerm(p.rhs, sig, slots));
      }
      ax.lhs = CompiledTerm(conclusion.lhs, sig, slots);
      ax.rhs = CompiledTerm(conclusion.rhs, sig, slots);
      return ax;
    }

    class Search {
     public:
      Search(QuasivarietySpec const&                          k,
             ModelSearchOptions const&                        opts,
             std::function<bool(FiniteAlgebra const&)> const& visit)
          : _k(k), _opts(opts), _visit(visit), _n(opts.size) {
        if (_n == 0) {
          throw InvariantError("model search: carrier size must be positive");
        }
        auto const& sig = k.signature;
        for (auto const& e : k.identities) {
          _axioms.push_back(compile_axiom({}, e, sig, opts.variable_cap));
        }
        for (auto const& q : k.quasi_identities) {
          _axioms.push_back(compile_axiom(q.premises, q.conclusion, sig, opts.variable_cap));
        }
        _tables.resize(sig.size());
        for (std::size_t f = 0; f < sig.size(); ++f) {
          std::size_t cells = 1;
          for (std::size_t i = 0; i < sig[f].arity; ++i) {
            cells *= _n;
            if (cells > (std::size_t{1} << 20)) {
              throw BoundExceeded("model search: table too large");
            }
          }
          _tables[f].assign(cells, undefined_elem);
        }
        if (!opts.prefilled.empty()) {
          if (opts.prefilled.size() != sig.size()) {
            throw InvariantError("model search: prefilled tables do not match the signature");
          }
          for (std::size_t f = 0; f < sig.size(); ++f) {
            if (opts.prefilled[f].size() != _tables[f].size()) {
              throw InvariantError("model search: prefilled table for \"" + sig[f].name
                                   + "\" has the wrong length");
            }
            for (std::size_t c = 0; c < _tables[f].size(); ++c) {
              Elem v = opts.prefilled[f][c];
              if (v != undefined_elem && v >= _n) {
                throw InvariantError("model search: prefilled value out of range");
              }
              _tables[f][c] = v;
            }
          }
        }
        _dedupe = opts.dedupe_isomorphic && opts.prefilled.empty() && _n <= 8;
        std::vector<std::size_t> order(sig.size());
        for (std::size_t f = 0; f < sig.size(); ++f) {
          order[f] = f;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return sig[a].arity < sig[b].arity;
        });
        for (std::size_t f : order) {
          for (std::size_t c = 0; c < _tables[f].size(); ++c) {
            if (_tables[f][c] == undefined_elem) {
              _cells.emplace_back(f, c);
            }
          }
        }
      }

      std::size_t run() {
        if (consistent()) {
          recurse(0);
        }
        return _visited;
      }

     private:
      bool consistent() const {
        std::vector<Elem> vals;
        for (auto const& ax : _axioms) {
          vals.assign(ax.nvars, 0);
          while (true) {
            bool decided_true = false;
            bool undecided    = false;
            for (auto const& [l, r] : ax.premises) {
              Elem lv = l.eval_partial(_tables, _n, vals);
              Elem rv = r.eval_partial(_tables, _n, vals);
              if (lv == undefined_elem || rv == undefined_elem) {
                undecided = true;
              } else if (lv != rv) {
                decided_true = true;
                break;
              }
            }
            if (!decided_true && !undecided) {
              Elem lv = ax.lhs.eval_partial(_tables, _n, vals);
              Elem rv = ax.rhs.eval_partial(_tables, _n, vals);
              if (lv != undefined_elem && rv != undefined_elem && lv != rv) {
                return false;
              }
            }
            std::size_t i    = ax.nvars;
            bool        done = true;
            while (i > 0) {
              --i;
              if (++vals[i] < _n) {
                done = false;
                break;
              }
              vals[i] = 0;
            }
            if (done) {
              break;
            }
          }
        }
        return true;
      }

      bool recurse(std::size_t depth) {
        if (++_nodes > _opts.node_budget) {
          throw BoundExceeded("model search exceeded its node budget of "
                              + std::to_string(_opts.node_budget));
        }
        if (depth == _cells.size()) {
          std::vector<std::string> names;
          for (std::size_t i = 0; i < _n; ++i) {
            names.push_back(std::to_string(i));
          }
          FiniteAlgebra a(_k.name + "-model-" + std::to_string(_n) + "-" + std::to_string(_visited),
                          _k.signature,
                          std::move(names),
                          _tables);
          if (_dedupe && !_codes.insert(canonical_code(a)).second) {
            return true;
          }
          ++_visited;
          return _visit(a);
        }
        auto [f, c] = _cells[depth];
        for (Elem v = 0; v < _n; ++v) {
          _tables[f][c] = v;
          if (consistent() && !recurse(depth + 1)) {
            _tables[f][c] = undefined_elem;
            return false;
          }
        }
        _tables[f][c] = undefined_elem;
        return true;
      }

      QuasivarietySpec const&                          _k;
      ModelSearchOptions const&                        _opts;
      std::function<bool(FiniteAlgebra const&)> const& _visit;
      std::size_t                                      _n;
      std::vector<Axiom>                               _axioms;
      std::vector<std::vector<Elem>>                   _tables;
      std::vector<std::pair<std::size_t, std::size_t>> _cells;
      bool                                             _dedupe  = true;
      std::set<std::vector<Elem>>                      _codes;
      std::size_t                                      _visited = 0;
      std::size_t                                      _nodes   = 0;
    };
  }  // namespace

  std::size_t enumerate_models(QuasivarietySpec const&                          k,
                               ModelSearchOptions const&                        options,
                               std::function<bool(FiniteAlgebra const&)> const& visit) {
    return Search(k, options, visit).run();
  }

  std::optional<FiniteAlgebra> find_model(QuasivarietySpec const&                          k,
                                          ModelSearchOptions const&                        options,
                                          std::function<bool(FiniteAlgebra const&)> const& accept) {
    std::optional<FiniteAlgebra> found;
    enumerate_models(k, options, [&](FiniteAlgebra const& a) {
      if (accept(a)) {
        found.emplace(a);
        return false;
      }
      return true;
    });
    return found;
  }

}  // namespace fpw
