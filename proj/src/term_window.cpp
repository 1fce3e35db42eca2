#include "fpw/term_window.hpp"

#include <algorithm>

#include "fpw/error.hpp"

namespace fpw {

  namespace {
    constexpr std::uint32_t var_tag = 0x8000'0000u;
  }

  std::size_t TermWindow::KeyHash::operator()(std::vector<std::uint32_t> const& k) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto v : k) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::vector<std::uint32_t> TermWindow::key(std::uint32_t head,
                                             std::span<TermId const> children) const {
    std::vector<std::uint32_t> k;
    k.reserve(children.size() + 1);
    k.push_back(head);
    k.insert(k.end(), children.begin(), children.end());
    return k;
  }

  TermWindow::TermWindow(Signature sig, std::vector<std::string> variables, std::size_t depth,
                         std::size_t cap)
      : _sig(std::move(sig)), _vars(std::move(variables)), _depth(depth) {
    std::sort(_vars.begin(), _vars.end());
    _vars.erase(std::unique(_vars.begin(), _vars.end()), _vars.end());
    if (_vars.size() > 64) {
      throw InvariantError("term window: more than 64 variables");
    }
    for (auto const& v : _vars) {
      if (!is_identifier(v)) {
        throw InvariantError("term window: invalid variable name \"" + v + "\"");
      }
      if (_sig.find(v)) {
        throw InvariantError("term window: variable \"" + v + "\" clashes with a symbol");
      }
    }
    if (_vars.empty() && !_sig.has_constants()) {
      throw InvariantError("term window: no variables and no constants");
    }

    // Level 0: variables and constants, ordered by name.
    struct Leaf {
      std::string   name;
      bool          is_var;
      std::uint32_t head;
    };
    std::vector<Leaf> leaves;
    for (std::uint32_t i = 0; i < _vars.size(); ++i) {
      leaves.push_back({_vars[i], true, i});
    }
    for (std::uint32_t f = 0; f < _sig.size(); ++f) {
      if (_sig[f].arity == 0) {
        leaves.push_back({_sig[f].name, false, f});
      }
    }
    std::sort(leaves.begin(), leaves.end(), [](Leaf const& a, Leaf const& b) {
      if (a.name != b.name) {
        return a.name < b.name;
      }
      return a.is_var && !b.is_var;
    });
    for (auto const& l : leaves) {
      auto id = static_cast<TermId>(_terms.size());
      _terms.push_back(l.is_var ? Term::variable(l.name) : Term::apply(l.name, {}));
      std::uint64_t mask = l.is_var ? (std::uint64_t{1} << l.head) : 0;
      _nodes.push_back({l.is_var, l.head, 0, 0, 0, mask});
      _index.emplace(key(l.is_var ? (l.head | var_tag) : l.head, {}), id);
    }
    if (_terms.size() > cap) {
      throw BoundExceeded("term window exceeds " + std::to_string(cap) + " terms");
    }

    std::size_t prev_end   = 0;  // terms of depth <= k-2 are [0, prev_end)
    std::size_t level_end  = _terms.size();
    for (std::size_t k = 1; k <= depth; ++k) {
      // Count new terms first so the cap is enforced before allocating.
      long double count = 0;
      for (std::uint32_t f = 0; f < _sig.size(); ++f) {
        std::size_t a = _sig[f].arity;
        if (a == 0) {
          continue;
        }
        long double all = 1, old = 1;
        for (std::size_t i = 0; i < a; ++i) {
          all *= static_cast<long double>(level_end);
          old *= static_cast<long double>(prev_end);
        }
        count += all - old;
      }
      if (count + static_cast<long double>(_terms.size()) > static_cast<long double>(cap)) {
        throw BoundExceeded("term window of depth " + std::to_string(depth) + " over "
                            + std::to_string(_vars.size()) + " variable(s) exceeds "
                            + std::to_string(cap) + " terms");
      }
      std::size_t const new_start = _terms.size();
      for (std::uint32_t f = 0; f < _sig.size(); ++f) {
        std::size_t a = _sig[f].arity;
        if (a == 0) {
          continue;
        }
        std::vector<TermId> t(a, 0);
        while (true) {
          bool fresh = std::any_of(t.begin(), t.end(), [&](TermId c) { return c >= prev_end; });
          if (fresh) {
            auto              id = static_cast<TermId>(_terms.size());
            std::vector<Term> args;
            std::uint64_t     mask = 0;
            for (TermId c : t) {
              args.push_back(_terms[c]);
              mask |= _nodes[c].var_mask;
            }
            _terms.push_back(Term::apply(_sig[f].name, std::move(args)));
            _nodes.push_back({false,
                              f,
                              static_cast<std::uint32_t>(a),
                              static_cast<std::uint32_t>(_child_pool.size()),
                              static_cast<std::uint32_t>(k),
                              mask});
            _child_pool.insert(_child_pool.end(), t.begin(), t.end());
            _index.emplace(key(f, t), id);
          }
          std::size_t i = a;
          bool        done = true;
          while (i > 0) {
            --i;
            if (++t[i] < level_end) {
              done = false;
              break;
            }
            t[i] = 0;
          }
          if (done) {
            break;
          }
        }
      }
      prev_end  = level_end;
      level_end = _terms.size();
      if (new_start == level_end) {
        break;  // no symbols of positive arity
      }
    }
  }

  std::optional<TermId> TermWindow::find_node(std::uint32_t head,
                                              std::span<TermId const> children) const {
    auto it = _index.find(key(head, children));
    if (it == _index.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<TermId> TermWindow::find_variable(std::string_view name) const {
    auto it = std::lower_bound(_vars.begin(), _vars.end(), name);
    if (it == _vars.end() || *it != name) {
      return std::nullopt;
    }
    return find_node(static_cast<std::uint32_t>(it - _vars.begin()) | var_tag, {});
  }

  std::optional<TermId> TermWindow::find(Term const& t) const {
    if (t.is_variable()) {
      return find_variable(t.name());
    }
    auto f = _sig.find(t.name());
    if (!f || _sig[*f].arity != t.args().size()) {
      return std::nullopt;
    }
    std::vector<TermId> ch;
    ch.reserve(t.args().size());
    for (auto const& a : t.args()) {
      auto c = find(a);
      if (!c) {
        return std::nullopt;
      }
      ch.push_back(*c);
    }
    return find_node(static_cast<std::uint32_t>(*f), ch);
  }

  std::uint64_t TermWindow::mask_of(std::span<std::string const> vars) const {
    std::uint64_t m = 0;
    for (auto const& v : vars) {
      auto it = std::lower_bound(_vars.begin(), _vars.end(), v);
      if (it != _vars.end() && *it == v) {
        m |= std::uint64_t{1} << (it - _vars.begin());
      }
    }
    return m;
  }

  std::vector<TermId> TermWindow::restricted_to(std::uint64_t mask) const {
    std::vector<TermId> out;
    for (TermId i = 0; i < _nodes.size(); ++i) {
      if ((_nodes[i].var_mask & ~mask) == 0) {
        out.push_back(i);
      }
    }
    return out;
  }

  TermWindow enumerate_terms(Signature const&                sig,
                             std::vector<std::string> const& vars,
                             std::size_t                     depth,
                             std::size_t                     cap) {
    if (vars.empty()) {
      throw InvariantError("enumerate_terms: variable set must be non-empty");
    }
    return TermWindow(sig, vars, depth, cap);
  }

}  // namespace fpw
