#include "fpw/compiled_term.hpp"

#include <algorithm>

#include "fpw/error.hpp"

namespace fpw {

  namespace {
    void flatten(Term const&                  t,
                 Signature const&             sig,
                 std::span<std::string const> slots,
                 auto&                        ops) {
      if (t.is_variable()) {
        auto it = std::find(slots.begin(), slots.end(), t.name());
        if (it == slots.end()) {
          throw InvariantError("variable \"" + t.name() + "\" has no evaluation slot");
        }
        ops.push_back({true, static_cast<std::uint32_t>(it - slots.begin()), 0});
        return;
      }
      for (auto const& c : t.args()) {
        flatten(c, sig, slots, ops);
      }
      auto f = sig.index(t.name());
      if (sig[f].arity != t.args().size()) {
        throw InvariantError("arity mismatch for \"" + t.name() + "\"");
      }
      ops.push_back(
          {false, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(t.args().size())});
    }
  }  // namespace

  CompiledTerm::CompiledTerm(Term const& t, Signature const& sig, std::span<std::string const> slots) {
    flatten(t, sig, slots, _ops);
    std::size_t sp = 0, peak = 0;
    for (auto const& op : _ops) {
      sp   = op.is_var ? sp + 1 : sp - op.arity + 1;
      peak = std::max(peak, sp);
    }
    if (peak > 64) {
      throw BoundExceeded("term too wide for compiled evaluation: " + t.to_string());
    }
  }

  Elem CompiledTerm::eval(FiniteAlgebra const& a, std::span<Elem const> values) const {
    Elem        stack[64];
    std::size_t sp = 0;
    std::size_t n  = a.size();
    for (auto const& op : _ops) {
      if (op.is_var) {
        stack[sp++] = values[op.index];
        continue;
      }
      std::size_t idx = 0;
      for (std::size_t k = sp - op.arity; k < sp; ++k) {
        idx = idx * n + stack[k];
      }
      sp -= op.arity;
      stack[sp++] = a.table(op.index)[idx];
    }
    return stack[0];
  }

  Elem CompiledTerm::eval_partial(std::span<std::vector<Elem> const> tables,
                                  std::size_t                        n,
                                  std::span<Elem const>              values) const {
    Elem        stack[64];
    std::size_t sp = 0;
    for (auto const& op : _ops) {
      if (op.is_var) {
        stack[sp++] = values[op.index];
        continue;
      }
      std::size_t idx = 0;
      for (std::size_t k = sp - op.arity; k < sp; ++k) {
        if (stack[k] == undefined_elem) {
          return undefined_elem;
        }
        idx = idx * n + stack[k];
      }
      sp -= op.arity;
      Elem v = tables[op.index][idx];
      if (v == undefined_elem) {
        return undefined_elem;
      }
      stack[sp++] = v;
    }
    return stack[0];
  }

}  // namespace fpw
