#include "fpw/eqlogic.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "fpw/error.hpp"
#include "fpw/filterpair.hpp"

namespace fpw {

  std::string_view to_string(Rule r) noexcept {
    switch (r) {
      case Rule::Reflexivity:
        return "Reflexivity";
      case Rule::Hypothesis:
        return "Hypothesis";
      case Rule::AxiomInstance:
        return "AxiomInstance";
      case Rule::QuasiDetachment:
        return "QuasiDetachment";
      case Rule::Symmetry:
        return "Symmetry";
      case Rule::Transitivity:
        return "Transitivity";
      case Rule::CongruenceRule:
        return "CongruenceRule";
    }
    return "?";
  }

  ////////////////////////////////////////////////////////////////////////
  // Derivations
  ////////////////////////////////////////////////////////////////////////

  bool Derivation::uses_quasi_detachment() const {
    return std::any_of(steps.begin(), steps.end(), [](DerivationStep const& s) {
      return s.rule == Rule::QuasiDetachment;
    });
  }

  namespace {
    DerivationStep make_step(Equation e, Rule r) {
      return {std::move(e), r, 0, {}, {}, {}};
    }

    std::string describe_rule(DerivationStep const& s) {
      std::string out(to_string(s.rule));
      switch (s.rule) {
        case Rule::Hypothesis:
        case Rule::AxiomInstance:
        case Rule::QuasiDetachment:
          out += " " + std::to_string(s.index + 1);
          break;
        case Rule::CongruenceRule:
          out += " " + s.symbol;
          break;
        default:
          break;
      }
      if (!s.substitution.empty()) {
        out += " {";
        bool first = true;
        for (auto const& [v, t] : s.substitution) {
          out += (first ? "" : ", ") + v + " := " + t.to_string();
          first = false;
        }
        out += "}";
      }
      if (!s.refs.empty()) {
        out += " from";
        for (auto r : s.refs) {
          out += " " + std::to_string(r + 1);
        }
      }
      return out;
    }
  }  // namespace

  std::string Derivation::to_text() const {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      out += std::to_string(i + 1) + ". " + steps[i].equation.to_string() + "    ["
             + describe_rule(steps[i]) + "]\n";
    }
    return out;
  }

  json Derivation::to_json() const {
    json j;
    json hs = json::array();
    for (auto const& h : hypotheses) {
      hs.push_back(h.to_string());
    }
    j["hypotheses"] = hs;
    j["goal"]       = goal.to_string();
    json st         = json::array();
    for (std::size_t i = 0; i < steps.size(); ++i) {
      auto const& s = steps[i];
      json        js;
      js["n"]        = i + 1;
      js["equation"] = s.equation.to_string();
      js["rule"]     = std::string(to_string(s.rule));
      if (s.rule == Rule::Hypothesis || s.rule == Rule::AxiomInstance
          || s.rule == Rule::QuasiDetachment) {
        js["index"] = s.index + 1;
      }
      if (s.rule == Rule::CongruenceRule) {
        js["symbol"] = s.symbol;
      }
      if (!s.substitution.empty()) {
        json sub = json::object();
        for (auto const& [v, t] : s.substitution) {
          sub[v] = t.to_string();
        }
        js["substitution"] = sub;
      }
      if (!s.refs.empty()) {
        json refs = json::array();
        for (auto r : s.refs) {
          refs.push_back(r + 1);
        }
        js["refs"] = refs;
      }
      st.push_back(js);
    }
    j["steps"] = st;
    return j;
  }

  void replay(Derivation const& d, QuasivarietySpec const& k) {
    auto fail = [](std::size_t i, std::string const& why) {
      throw InvariantError("derivation step " + std::to_string(i + 1) + ": " + why);
    };
    if (d.steps.empty()) {
      throw InvariantError("derivation has no steps");
    }
    for (auto const& h : d.hypotheses) {
      check_term(h.lhs, k.signature);
      check_term(h.rhs, k.signature);
    }
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
      auto const& s  = d.steps[i];
      auto const& eq = s.equation;
      try {
        check_term(eq.lhs, k.signature);
        check_term(eq.rhs, k.signature);
      } catch (Error const& e) {
        fail(i, e.what());
      }
      for (auto r : s.refs) {
        if (r >= i) {
          fail(i, "refers to a later step");
        }
      }
      auto ref = [&](std::size_t j) -> Equation const& { return d.steps[s.refs.at(j)].equation; };
      switch (s.rule) {
        case Rule::Reflexivity:
          if (eq.lhs != eq.rhs) {
            fail(i, "reflexivity with different sides");
          }
          break;
        case Rule::Hypothesis:
          if (s.index >= d.hypotheses.size() || d.hypotheses[s.index] != eq) {
            fail(i, "not the cited hypothesis");
          }
          break;
        case Rule::AxiomInstance: {
          if (s.index >= k.identities.size()) {
            fail(i, "no such identity");
          }
          auto const& ax = k.identities[s.index];
          if (substitute(ax.lhs, s.substitution) != eq.lhs
              || substitute(ax.rhs, s.substitution) != eq.rhs) {
            fail(i, "not an instance of identity " + std::to_string(s.index + 1));
          }
          break;
        }
        case Rule::QuasiDetachment: {
          if (s.index >= k.quasi_identities.size()) {
            fail(i, "no such quasi-identity");
          }
          auto const& q = k.quasi_identities[s.index];
          if (s.refs.size() != q.premises.size()) {
            fail(i, "wrong number of premise steps");
          }
          for (std::size_t p = 0; p < q.premises.size(); ++p) {
            Equation inst{substitute(q.premises[p].lhs, s.substitution),
                          substitute(q.premises[p].rhs, s.substitution)};
            if (ref(p) != inst) {
              fail(i, "premise " + std::to_string(p + 1) + " does not match its step");
            }
          }
          if (substitute(q.conclusion.lhs, s.substitution) != eq.lhs
              || substitute(q.conclusion.rhs, s.substitution) != eq.rhs) {
            fail(i, "conclusion does not match");
          }
          break;
        }
        case Rule::Symmetry:
          if (s.refs.size() != 1 || ref(0).lhs != eq.rhs || ref(0).rhs != eq.lhs) {
            fail(i, "bad symmetry");
          }
          break;
        case Rule::Transitivity:
          if (s.refs.size() != 2 || ref(0).rhs != ref(1).lhs || ref(0).lhs != eq.lhs
              || ref(1).rhs != eq.rhs) {
            fail(i, "bad transitivity");
          }
          break;
        case Rule::CongruenceRule: {
          if (eq.lhs.is_variable() || eq.rhs.is_variable() || eq.lhs.name() != s.symbol
              || eq.rhs.name() != s.symbol || eq.lhs.args().size() != s.refs.size()
              || eq.rhs.args().size() != s.refs.size()) {
            fail(i, "bad congruence shape");
          }
          for (std::size_t a = 0; a < s.refs.size(); ++a) {
            if (ref(a).lhs != eq.lhs.args()[a] || ref(a).rhs != eq.rhs.args()[a]) {
              fail(i, "argument " + std::to_string(a + 1) + " does not match its step");
            }
          }
          break;
        }
      }
    }
    if (d.steps.back().equation != d.goal) {
      throw InvariantError("derivation does not end with its goal");
    }
  }

  bool replays(Derivation const& d, QuasivarietySpec const& k) noexcept {
    try {
      replay(d, k);
      return true;
    } catch (...) {
      return false;
    }
  }

  std::size_t WindowRelation::num_classes() const noexcept {
    std::size_t c = 0;
    for (TermId t = 0; t < _labels.size(); ++t) {
      c += (_labels[t] == t);
    }
    return c;
  }

  ////////////////////////////////////////////////////////////////////////
  // Saturation
  ////////////////////////////////////////////////////////////////////////

  namespace {
    constexpr TermId      no_term   = std::numeric_limits<TermId>::max();
    constexpr std::size_t no_reason = std::numeric_limits<std::size_t>::max();

    // A term with variables replaced by slot numbers.
    struct Pattern {
      bool                 is_var = false;
      std::uint32_t        index  = 0;  // slot or symbol
      std::vector<Pattern> children;
    };

    Pattern compile_pattern(Term const& t, Signature const& sig, std::vector<std::string> const& slots) {
      Pattern p;
      if (t.is_variable()) {
        p.is_var = true;
        p.index  = static_cast<std::uint32_t>(
            std::find(slots.begin(), slots.end(), t.name()) - slots.begin());
        return p;
      }
      p.index = static_cast<std::uint32_t>(sig.index(t.name()));
      for (auto const& c : t.args()) {
        p.children.push_back(compile_pattern(c, sig, slots));
      }
      return p;
    }

    bool match(Pattern const& p, TermWindow const& w, TermId t, std::vector<TermId>& binding) {
      if (p.is_var) {
        if (binding[p.index] == no_term) {
          binding[p.index] = t;
          return true;
        }
        return binding[p.index] == t;
      }
      if (w.is_variable(t) || w.head(t) != p.index) {
        return false;
      }
      auto ch = w.children(t);
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (!match(p.children[i], w, ch[i], binding)) {
          return false;
        }
      }
      return true;
    }

    TermId instantiate(Pattern const& p, TermWindow const& w, std::vector<TermId> const& binding) {
      if (p.is_var) {
        return binding[p.index];
      }
      std::vector<TermId> ch;
      ch.reserve(p.children.size());
      for (auto const& c : p.children) {
        TermId id = instantiate(c, w, binding);
        if (id == no_term) {
          return no_term;
        }
        ch.push_back(id);
      }
      auto found = w.find_node(p.index, ch);
      return found ? *found : no_term;
    }

    std::uint32_t max_slot(Pattern const& p) {
      if (p.is_var) {
        return p.index;
      }
      std::uint32_t m = 0;
      for (auto const& c : p.children) {
        m = std::max(m, max_slot(c));
      }
      return m;
    }

    struct QuasiPattern {
      std::vector<std::string>                slots;
      std::vector<std::pair<Pattern, Pattern>> premises;
      std::vector<std::uint32_t>              premise_slot;  // last slot a premise needs
      Pattern                                 lhs, rhs;
    };

    struct KeyHash {
      std::size_t operator()(std::vector<std::uint32_t> const& k) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto v : k) {
          h ^= v;
          h *= 0x100000001b3ULL;
        }
        return h;
      }
    };
  }  // namespace

  struct WindowSaturator::Impl {
    struct Reason {
      enum class Kind { Hypothesis, Axiom, Congruence, Quasi } kind;
      std::size_t         index;
      TermId              a, b;
      std::vector<TermId> binding;
    };

    QuasivarietySpec const&                                          k;
    TermWindow const&                                                w;
    std::size_t                                                      cap;
    std::vector<std::vector<std::string>>                            id_slots;
    std::vector<QuasiPattern>                                        quasis;
    std::vector<Equation>                                            hyps;
    std::vector<TermId>                                              parent;
    std::vector<std::uint32_t>                                       rank;
    std::vector<std::vector<TermId>>                                 uses;
    std::unordered_map<std::vector<std::uint32_t>, TermId, KeyHash>  table;
    std::vector<TermId>                                              pf_parent;
    std::vector<std::size_t>                                         pf_reason;
    std::vector<Reason>                                              reasons;
    std::deque<std::size_t>                                          pending;  // reason ids

    Impl(QuasivarietySpec const& k_, TermWindow const& w_, std::size_t cap_) : k(k_), w(w_), cap(cap_) {
      if (w.signature() != k.signature) {
        throw MismatchError("window signature " + w.signature().to_string()
                            + " differs from the class signature " + k.signature.to_string());
      }
      std::size_t const n = w.size();
      parent.resize(n);
      for (TermId t = 0; t < n; ++t) {
        parent[t] = t;
      }
      rank.assign(n, 0);
      uses.resize(n);
      pf_parent.assign(n, no_term);
      pf_reason.assign(n, no_reason);
      for (TermId t = 0; t < n; ++t) {
        auto ch = w.children(t);
        if (w.is_variable(t) || ch.empty()) {
          continue;
        }
        table.emplace(key(t), t);
        for (TermId c : ch) {
          if (uses[c].empty() || uses[c].back() != t) {
            uses[c].push_back(t);
          }
        }
      }
      add_axiom_instances();
      for (auto const& q : k.quasi_identities) {
        QuasiPattern qp;
        auto         vs = q.variables();
        qp.slots.assign(vs.begin(), vs.end());
        for (auto const& p : q.premises) {
          qp.premises.emplace_back(compile_pattern(p.lhs, k.signature, qp.slots),
                                   compile_pattern(p.rhs, k.signature, qp.slots));
          qp.premise_slot.push_back(
              std::max(max_slot(qp.premises.back().first), max_slot(qp.premises.back().second)));
        }
        qp.lhs = compile_pattern(q.conclusion.lhs, k.signature, qp.slots);
        qp.rhs = compile_pattern(q.conclusion.rhs, k.signature, qp.slots);
        quasis.push_back(std::move(qp));
      }
    }

    std::vector<std::uint32_t> key(TermId t) {
      std::vector<std::uint32_t> kk;
      kk.push_back(w.head(t));
      for (TermId c : w.children(t)) {
        kk.push_back(find(c));
      }
      return kk;
    }

    TermId find(TermId t) {
      while (parent[t] != t) {
        parent[t] = parent[parent[t]];
        t         = parent[t];
      }
      return t;
    }

    void push(Reason r) {
      reasons.push_back(std::move(r));
      pending.push_back(reasons.size() - 1);
    }

    void add_axiom_instances() {
      std::size_t const n     = w.size();
      std::size_t       count = 0;
      for (std::size_t ax = 0; ax < k.identities.size(); ++ax) {
        auto const&              e  = k.identities[ax];
        auto                     vs = e.variables();
        std::vector<std::string> slots(vs.begin(), vs.end());
        auto                     lp = compile_pattern(e.lhs, k.signature, slots);
        auto                     rp = compile_pattern(e.rhs, k.signature, slots);
        auto                     lvars = e.lhs.variables();
        std::vector<std::uint32_t> extra;  // slots only in the rhs
        for (std::uint32_t i = 0; i < slots.size(); ++i) {
          if (!lvars.count(slots[i])) {
            extra.push_back(i);
          }
        }
        for (TermId t = 0; t < n; ++t) {
          std::vector<TermId> binding(slots.size(), no_term);
          if (!match(lp, w, t, binding)) {
            continue;
          }
          // Enumerate the rhs-only variables over the whole window.
          std::vector<TermId> choice(extra.size(), 0);
          while (true) {
            for (std::size_t i = 0; i < extra.size(); ++i) {
              binding[extra[i]] = choice[i];
            }
            TermId r = instantiate(rp, w, binding);
            if (r != no_term && r != t) {
              if (++count > cap) {
                throw BoundExceeded("more than " + std::to_string(cap)
                                    + " axiom instances in the window");
              }
              push({Reason::Kind::Axiom, ax, t, r, binding});
            }
            std::size_t i    = extra.size();
            bool        done = true;
            while (i > 0) {
              --i;
              if (++choice[i] < n) {
                done = false;
                break;
              }
              choice[i] = 0;
            }
            if (done) {
              break;
            }
          }
        }
      }
    }

    void add_proof_edge(TermId a, TermId b, std::size_t rid) {
      TermId      prev   = no_term;
      std::size_t prev_r = no_reason;
      TermId      cur    = a;
      while (cur != no_term) {
        TermId      next = pf_parent[cur];
        std::size_t r    = pf_reason[cur];
        pf_parent[cur]   = prev;
        pf_reason[cur]   = prev_r;
        prev             = cur;
        prev_r           = r;
        cur              = next;
      }
      pf_parent[a] = b;
      pf_reason[a] = rid;
    }

    bool process() {
      bool changed = false;
      while (!pending.empty()) {
        std::size_t rid = pending.front();
        pending.pop_front();
        TermId a = reasons[rid].a, b = reasons[rid].b;
        TermId ra = find(a), rb = find(b);
        if (ra == rb) {
          continue;
        }
        changed = true;
        add_proof_edge(a, b, rid);
        if (rank[ra] > rank[rb] || (rank[ra] == rank[rb] && uses[ra].size() > uses[rb].size())) {
          std::swap(ra, rb);
        }
        parent[ra] = rb;
        if (rank[ra] == rank[rb]) {
          ++rank[rb];
        }
        auto moved = std::move(uses[ra]);
        uses[ra].clear();
        for (TermId p : moved) {
          auto kk = key(p);
          auto it = table.find(kk);
          if (it == table.end()) {
            table.emplace(std::move(kk), p);
          } else if (find(it->second) != find(p)) {
            push({Reason::Kind::Congruence, 0, p, it->second, {}});
          }
        }
        uses[rb].insert(uses[rb].end(), moved.begin(), moved.end());
      }
      return changed;
    }

    // One detachment pass over every quasi-identity.
    void quasi_pass() {
      std::size_t const n = w.size();
      for (std::size_t qi = 0; qi < quasis.size(); ++qi) {
        auto const&         q = quasis[qi];
        std::size_t const   m = q.slots.size();
        std::vector<TermId> binding(m, no_term);
        std::size_t         tried = 0;
        // Depth-first over slot assignments, checking each premise as soon
        // as its last slot is bound.
        auto premises_ok = [&](std::uint32_t slot) {
          for (std::size_t p = 0; p < q.premises.size(); ++p) {
            if (q.premise_slot[p] != slot) {
              continue;
            }
            TermId l = instantiate(q.premises[p].first, w, binding);
            TermId r = instantiate(q.premises[p].second, w, binding);
            if (l == no_term || r == no_term || find(l) != find(r)) {
              return false;
            }
          }
          return true;
        };
        auto conclude = [&] {
          TermId l = instantiate(q.lhs, w, binding);
          TermId r = instantiate(q.rhs, w, binding);
          if (l != no_term && r != no_term && find(l) != find(r)) {
            push({Reason::Kind::Quasi, qi, l, r, binding});
          }
        };
        if (m == 0) {
          conclude();
          continue;
        }
        std::size_t level = 0;
        binding[0]        = 0;
        while (true) {
          if (++tried > cap) {
            throw BoundExceeded("quasi-identity detachment exceeded " + std::to_string(cap)
                                + " substitutions");
          }
          bool ok = premises_ok(static_cast<std::uint32_t>(level));
          if (ok && level + 1 == m) {
            conclude();
          }
          if (ok && level + 1 < m) {
            ++level;
            binding[level] = 0;
            continue;
          }
          // Advance to the next candidate, backtracking as needed.
          while (true) {
            if (++binding[level] < n) {
              break;
            }
            binding[level] = no_term;
            if (level == 0) {
              goto next_quasi;
            }
            --level;
          }
        }
      next_quasi:;
      }
    }

    void saturate() {
      while (true) {
        process();
        quasi_pass();
        if (pending.empty()) {
          break;
        }
      }
    }

    WindowRelation relation() {
      std::vector<TermId> labels(w.size());
      std::vector<TermId> least(w.size(), no_term);
      for (TermId t = 0; t < w.size(); ++t) {
        TermId r = find(t);
        if (least[r] == no_term) {
          least[r] = t;
        }
        labels[t] = least[r];
      }
      return WindowRelation(std::move(labels));
    }

    // Builds derivation steps from the proof forest.
    class Explainer {
     public:
      explicit Explainer(Impl& s) : _s(s), _reason_step(s.reasons.size(), no_reason) {}

      std::size_t prove(TermId a, TermId b) {
        auto key = std::make_pair(a, b);
        if (auto it = _memo.find(key); it != _memo.end()) {
          return it->second;
        }
        std::size_t out;
        if (a == b) {
          out = add(make_step(eq(a, a), Rule::Reflexivity));
        } else if (auto it2 = _memo.find({b, a}); it2 != _memo.end()) {
          out = symmetry(it2->second);
        } else {
          out = prove_path(a, b);
        }
        _memo[key] = out;
        return out;
      }

      std::vector<DerivationStep> take() {
        return std::move(_steps);
      }

     private:
      Equation eq(TermId a, TermId b) const {
        return {_s.w.term(a), _s.w.term(b)};
      }

      std::size_t add(DerivationStep st) {
        _steps.push_back(std::move(st));
        return _steps.size() - 1;
      }

      std::size_t symmetry(std::size_t ref) {
        auto const& e = _steps[ref].equation;
        auto st = make_step({e.rhs, e.lhs}, Rule::Symmetry);
        st.refs = {ref};
        return add(std::move(st));
      }

      std::size_t prove_path(TermId a, TermId b) {
        std::vector<TermId> up_a;
        for (TermId t = a; t != no_term; t = _s.pf_parent[t]) {
          up_a.push_back(t);
        }
        std::vector<TermId> up_b;
        TermId              lca = no_term;
        for (TermId t = b; t != no_term; t = _s.pf_parent[t]) {
          if (std::find(up_a.begin(), up_a.end(), t) != up_a.end()) {
            lca = t;
            break;
          }
          up_b.push_back(t);
        }
        if (lca == no_term) {
          throw InternalError("explain: terms are not connected in the proof forest");
        }
        // Oriented edges along a -> lca -> b.
        std::vector<std::tuple<TermId, TermId, std::size_t>> edges;
        for (TermId t : up_a) {
          if (t == lca) {
            break;
          }
          edges.emplace_back(t, _s.pf_parent[t], _s.pf_reason[t]);
        }
        for (auto it = up_b.rbegin(); it != up_b.rend(); ++it) {
          edges.emplace_back(_s.pf_parent[*it], *it, _s.pf_reason[*it]);
        }
        std::size_t acc    = no_reason;
        TermId      acc_lo = a;
        for (auto [from, to, rid] : edges) {
          std::size_t st = reason_step(rid);
          if (_s.reasons[rid].a != from) {
            st = symmetry(st);
          }
          if (acc == no_reason) {
            acc = st;
          } else {
            auto tr = make_step(eq(acc_lo, to), Rule::Transitivity);
            tr.refs = {acc, st};
            acc     = add(std::move(tr));
          }
        }
        return acc;
      }

      Substitution substitution(std::vector<std::string> const& slots, std::vector<TermId> const& binding) {
        Substitution sub;
        for (std::size_t i = 0; i < slots.size(); ++i) {
          sub.emplace(slots[i], _s.w.term(binding[i]));
        }
        return sub;
      }

      std::size_t reason_step(std::size_t rid) {
        if (_reason_step[rid] != no_reason) {
          return _reason_step[rid];
        }
        Reason const   r = _s.reasons[rid];
        auto st = make_step(eq(r.a, r.b), Rule::Reflexivity);
        switch (r.kind) {
          case Reason::Kind::Hypothesis:
            st.rule  = Rule::Hypothesis;
            st.index = r.index;
            break;
          case Reason::Kind::Axiom: {
            st.rule  = Rule::AxiomInstance;
            st.index = r.index;
            auto vs  = _s.k.identities[r.index].variables();
            st.substitution = substitution({vs.begin(), vs.end()}, r.binding);
            break;
          }
          case Reason::Kind::Congruence: {
            st.rule   = Rule::CongruenceRule;
            st.symbol = _s.k.signature[_s.w.head(r.a)].name;
            auto ca   = _s.w.children(r.a);
            auto cb   = _s.w.children(r.b);
            for (std::size_t i = 0; i < ca.size(); ++i) {
              st.refs.push_back(prove(ca[i], cb[i]));
            }
            break;
          }
          case Reason::Kind::Quasi: {
            st.rule         = Rule::QuasiDetachment;
            st.index        = r.index;
            auto const& q   = _s.quasis[r.index];
            st.substitution = substitution(q.slots, r.binding);
            for (auto const& [pl, pr] : q.premises) {
              st.refs.push_back(prove(instantiate(pl, _s.w, r.binding), instantiate(pr, _s.w, r.binding)));
            }
            break;
          }
        }
        std::size_t id    = add(std::move(st));
        _reason_step[rid] = id;
        return id;
      }

      Impl&                                               _s;
      std::vector<std::size_t>                            _reason_step;
      std::map<std::pair<TermId, TermId>, std::size_t>    _memo;
      std::vector<DerivationStep>                         _steps;
    };
  };

  WindowSaturator::WindowSaturator(QuasivarietySpec const& k, TermWindow const& window, std::size_t instance_cap)
      : _impl(std::make_unique<Impl>(k, window, instance_cap)) {}

  WindowSaturator::~WindowSaturator()                          = default;
  WindowSaturator::WindowSaturator(WindowSaturator&&) noexcept = default;

  TermWindow const& WindowSaturator::window() const noexcept {
    return _impl->w;
  }

  void WindowSaturator::add_hypotheses(std::span<Equation const> hyps) {
    for (auto const& h : hyps) {
      auto l = _impl->w.find(h.lhs);
      auto r = _impl->w.find(h.rhs);
      if (!l || !r) {
        throw BoundExceeded("hypothesis " + h.to_string() + " lies outside the depth-"
                            + std::to_string(_impl->w.depth()) + " window");
      }
      _impl->hyps.push_back(h);
      _impl->push({Impl::Reason::Kind::Hypothesis, _impl->hyps.size() - 1, *l, *r, {}});
    }
  }

  void WindowSaturator::saturate() {
    _impl->saturate();
  }

  bool WindowSaturator::equal(TermId a, TermId b) {
    return _impl->find(a) == _impl->find(b);
  }

  WindowRelation WindowSaturator::relation() {
    return _impl->relation();
  }

  Derivation WindowSaturator::explain(TermId lhs, TermId rhs) {
    if (!equal(lhs, rhs)) {
      throw InvariantError("explain: " + _impl->w.term(lhs).to_string() + " and "
                           + _impl->w.term(rhs).to_string() + " are not related");
    }
    Impl::Explainer ex(*_impl);
    ex.prove(lhs, rhs);
    return {_impl->hyps, ex.take(), {_impl->w.term(lhs), _impl->w.term(rhs)}};
  }

  WindowRelation cn_window(QuasivarietySpec const& k, std::span<Equation const> gamma, TermWindow const& window) {
    WindowSaturator s(k, window);
    s.add_hypotheses(gamma);
    s.saturate();
    return s.relation();
  }

  DeriveResult derive(QuasivarietySpec const&  k,
                      std::span<Equation const> hypotheses,
                      Equation const&          goal,
                      DerivationBudget const&  budget) {
    for (auto const& h : hypotheses) {
      check_term(h.lhs, k.signature);
      check_term(h.rhs, k.signature);
    }
    check_term(goal.lhs, k.signature);
    check_term(goal.rhs, k.signature);
    std::vector<Equation> hyps(hypotheses.begin(), hypotheses.end());
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      if (hyps[i] == goal) {
        auto st = make_step(goal, Rule::Hypothesis);
        st.index = i;
        return Derivation{hyps, {st}, goal};
      }
    }
    if (goal.lhs == goal.rhs) {
      return Derivation{hyps, {make_step(goal, Rule::Reflexivity)}, goal};
    }

    std::set<std::string> vars = goal.variables();
    std::size_t           d0   = std::max(goal.lhs.depth(), goal.rhs.depth());
    for (auto const& h : hyps) {
      h.lhs.collect_variables(vars);
      h.rhs.collect_variables(vars);
      d0 = std::max({d0, h.lhs.depth(), h.rhs.depth()});
    }
    if (vars.empty() && !k.signature.has_constants()) {
      vars.insert("x");
    }
    std::size_t reached = 0;
    for (std::size_t d = d0; d <= std::max(d0, budget.max_depth); ++d) {
      try {
        TermWindow      w(k.signature, {vars.begin(), vars.end()}, d, budget.window_cap);
        WindowSaturator s(k, w);
        s.add_hypotheses(hyps);
        s.saturate();
        TermId l = *w.find(goal.lhs);
        TermId r = *w.find(goal.rhs);
        if (s.equal(l, r)) {
          auto proof = s.explain(l, r);
          if (proof.steps.size() > budget.max_steps) {
            return Exhausted{d, "derivation exceeds the step budget of " + std::to_string(budget.max_steps)};
          }
          replay(proof, k);
          return proof;
        }
        reached = d;
      } catch (BoundExceeded const& e) {
        return Exhausted{reached, e.what()};
      }
      if (d >= budget.max_depth) {
        break;
      }
    }
    return Exhausted{reached, "no derivation within depth " + std::to_string(std::max(d0, budget.max_depth))};
  }

  ////////////////////////////////////////////////////////////////////////
  // Regularity
  ////////////////////////////////////////////////////////////////////////

  bool is_regular_equation(Equation const& e) {
    return e.lhs.variables() == e.rhs.variables();
  }

  json RegularityReport::to_json() const {
    json items = json::array();
    for (auto const& it : axioms) {
      items.push_back({{"axiom", it.axiom}, {"regular", it.regular}});
    }
    return {{"axioms", items}, {"regular", regular}};
  }

  RegularityReport presentation_regularity(QuasivarietySpec const& k) {
    RegularityReport r;
    for (auto const& e : k.identities) {
      bool reg = is_regular_equation(e);
      r.axioms.push_back({e.to_string(), reg});
      r.regular = r.regular && reg;
    }
    for (auto const& q : k.quasi_identities) {
      r.axioms.push_back({q.to_string(), false});
      r.regular = false;
    }
    return r;
  }

  Certificate derivation_regularity_check(Derivation const& d, QuasivarietySpec const& k) {
    replay(d, k);
    std::string bounds = std::to_string(d.steps.size()) + " step(s)";
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
      if (!is_regular_equation(d.steps[i].equation)) {
        json w;
        w["step"]     = i + 1;
        w["equation"] = d.steps[i].equation.to_string();
        w["rule"]     = std::string(to_string(d.steps[i].rule));
        return Certificate::refuted("derivation-regularity", w, bounds);
      }
    }
    return Certificate::holds("derivation-regularity", bounds);
  }

  ////////////////////////////////////////////////////////////////////////
  // Window theories and conservativity
  ////////////////////////////////////////////////////////////////////////

  namespace {
    struct TauPatterns {
      std::vector<std::pair<Pattern, Pattern>> eqs;
    };

    TauPatterns tau_patterns(FilterPairInstance const& fp) {
      TauPatterns              tp;
      std::vector<std::string> slots{std::string(tau_variable)};
      for (auto const& e : fp.tau.equations) {
        tp.eqs.emplace_back(compile_pattern(e.lhs, fp.k.signature, slots),
                            compile_pattern(e.rhs, fp.k.signature, slots));
      }
      return tp;
    }

    // Ids of the τ-instance sides of t, or nothing if one falls outside.
    std::optional<std::vector<std::pair<TermId, TermId>>> tau_ids(TauPatterns const& tp,
                                                                  TermWindow const&  w,
                                                                  TermId             t) {
      std::vector<TermId>                    binding{t};
      std::vector<std::pair<TermId, TermId>> out;
      for (auto const& [l, r] : tp.eqs) {
        TermId li = instantiate(l, w, binding);
        TermId ri = instantiate(r, w, binding);
        if (li == no_term || ri == no_term) {
          return std::nullopt;
        }
        out.emplace_back(li, ri);
      }
      return out;
    }
  }  // namespace

  std::vector<Equation> tau_instances(FilterPairInstance const& fp,
                                      TermWindow const&         window,
                                      std::span<TermId const>   terms) {
    auto                  tp = tau_patterns(fp);
    std::vector<Equation> out;
    for (TermId t : terms) {
      if (auto ids = tau_ids(tp, window, t)) {
        for (auto [l, r] : *ids) {
          out.push_back({window.term(l), window.term(r)});
        }
      }
    }
    return out;
  }

  WindowTheory window_theory(FilterPairInstance const& fp,
                             TermWindow const&         window,
                             std::span<Term const>     generators) {
    auto                tp = tau_patterns(fp);
    std::vector<TermId> gen_ids;
    for (auto const& g : generators) {
      auto id = window.find(g);
      if (!id || !tau_ids(tp, window, *id)) {
        throw BoundExceeded("generator " + g.to_string() + " does not fit with its tau-instances in the depth-"
                            + std::to_string(window.depth()) + " window");
      }
      gen_ids.push_back(*id);
    }
    auto         hyps = tau_instances(fp, window, gen_ids);
    WindowTheory out{cn_window(fp.k, hyps, window), {}};
    for (TermId t = 0; t < window.size(); ++t) {
      auto ids = tau_ids(tp, window, t);
      if (!ids) {
        continue;
      }
      bool in = std::all_of(ids->begin(), ids->end(), [&](auto const& p) {
        return out.theta.related(p.first, p.second);
      });
      if (in) {
        out.members.push_back(t);
      }
    }
    return out;
  }

  namespace {
    // Least-member labels of a relation restricted to `ids` (re-indexed).
    std::vector<TermId> restrict_labels(WindowRelation const& rel, std::vector<TermId> const& ids) {
      std::vector<TermId>             out(ids.size());
      std::unordered_map<TermId, TermId> first;
      for (TermId i = 0; i < ids.size(); ++i) {
        auto [it, fresh] = first.emplace(rel.class_of(ids[i]), i);
        out[i]           = it->second;
      }
      return out;
    }

    // First pair related in exactly one of two labellings.
    std::optional<std::pair<TermId, TermId>> first_difference(std::vector<TermId> const& x,
                                                              std::vector<TermId> const& y) {
      for (TermId a = 0; a < x.size(); ++a) {
        if (x[a] != y[a]) {
          return std::make_pair(x[a] < a ? x[a] : y[a], a);
        }
      }
      return std::nullopt;
    }
  }  // namespace

  Certificate conservativity_probe(FilterPairInstance const&       fp,
                                   std::vector<std::string> const& x,
                                   std::vector<std::string> const& z,
                                   std::span<Term const>           generators,
                                   std::size_t                     depth) {
    std::set<std::string> xs(x.begin(), x.end()), zs(z.begin(), z.end());
    std::string           check = "conservativity";
    if (!std::includes(xs.begin(), xs.end(), zs.begin(), zs.end())) {
      throw InvariantError("conservativity probe: Z is not a subset of X");
    }
    for (auto const& g : generators) {
      for (auto const& v : g.variables()) {
        if (!xs.count(v)) {
          throw InvariantError("conservativity probe: generator " + g.to_string()
                               + " uses a variable outside X");
        }
      }
    }
    auto join = [](std::set<std::string> const& s) {
      std::string out = "{";
      for (auto const& v : s) {
        out += (out.size() > 1 ? "," : "") + v;
      }
      return out + "}";
    };
    std::string bounds = "window depth " + std::to_string(depth) + ", X=" + join(xs) + ", Z=" + join(zs);
    if (zs.empty() && !fp.k.signature.has_constants()) {
      auto c = Certificate::holds(check, bounds);
      c.notes.push_back("Fm(Z) is empty");
      return c;
    }

    TermWindow wx(fp.k.signature, {xs.begin(), xs.end()}, depth);
    TermWindow wz(fp.k.signature, {zs.begin(), zs.end()}, depth);
    auto       tx = window_theory(fp, wx, generators);
    // Left side: X-closure of the τ-instances of all of T.
    auto lhs_rel = cn_window(fp.k, tau_instances(fp, wx, tx.members), wx);
    // Right side: Z-closure of the τ-instances of T ∩ Fm(Z).
    std::uint64_t const zmask = wx.mask_of(std::vector<std::string>(zs.begin(), zs.end()));
    std::vector<TermId> tz;
    for (TermId t : tx.members) {
      if ((wx.variable_mask(t) & ~zmask) == 0) {
        tz.push_back(*wz.find(wx.term(t)));
      }
    }
    auto rhs_rel = cn_window(fp.k, tau_instances(fp, wz, tz), wz);

    std::vector<TermId> z_in_x(wz.size());
    for (TermId t = 0; t < wz.size(); ++t) {
      z_in_x[t] = *wx.find(wz.term(t));
    }
    auto lhs = restrict_labels(lhs_rel, z_in_x);
    auto rhs = rhs_rel.labels();

    auto refute = [&](std::pair<TermId, TermId> p, std::string const& side, std::string const& other) {
      json w;
      w["pair"]        = {wz.term(p.first).to_string(), wz.term(p.second).to_string()};
      w["related_in"]  = side;
      w["missing_in"]  = other;
      w["window_depth"] = depth;
      auto c = Certificate::refuted(check, w, bounds);
      c.notes.push_back("refutation is relative to the window: the missing side is a window closure");
      return c;
    };

    if (auto d = first_difference(lhs, rhs)) {
      bool in_lhs = lhs_rel.related(z_in_x[d->first], z_in_x[d->second]);
      return in_lhs ? refute(*d, "X-closure", "Z-closure") : refute(*d, "Z-closure", "X-closure");
    }
    if (zs == xs) {
      return Certificate::holds(check, bounds);
    }
    if (fp.oracle == ExactOracle::SuccessorFixedPoint) {
      SuccessorOracle     oracle(generators);
      std::vector<TermId> exact(wz.size());
      for (TermId a = 0; a < wz.size(); ++a) {
        exact[a] = a;
        for (TermId b = 0; b < a; ++b) {
          if (oracle.related(wz.term(b), wz.term(a))) {
            exact[a] = b;
            break;
          }
        }
      }
      if (auto d = first_difference(exact, rhs)) {
        throw InternalError("conservativity probe: window closure disagrees with the exact oracle on "
                            + wz.term(d->first).to_string() + ", " + wz.term(d->second).to_string());
      }
      auto c = Certificate::holds(check, bounds);
      c.notes.push_back("both closures agree with the exact successor-fixed-point oracle on the window");
      return c;
    }
    auto c = Certificate::undetermined(check, bounds);
    c.notes.push_back("both closures agree on the window; no exact oracle for deeper terms");
    return c;
  }

}  // namespace fpw
