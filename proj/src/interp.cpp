#include "fpw/interp.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "fpw/compiled_term.hpp"
#include "fpw/eqlogic.hpp"
#include "fpw/error.hpp"
#include "fpw/models.hpp"
#include "fpw/term_window.hpp"

namespace fpw {

  namespace {
    constexpr Elem none = std::numeric_limits<Elem>::max();

    bool same_algebra(FiniteAlgebra const& x, FiniteAlgebra const& y) {
      return x.signature() == y.signature() && x.element_names() == y.element_names() && x.same_tables(y);
    }

    std::vector<Elem> identity_map(std::size_t n) {
      std::vector<Elem> m(n);
      std::iota(m.begin(), m.end(), Elem{0});
      return m;
    }

    std::string fresh_name(std::string name, std::set<std::string>& used) {
      while (used.count(name)) {
        name += "'";
      }
      used.insert(name);
      return name;
    }

    std::string set_string(std::set<std::string> const& s) {
      std::string out = "{";
      for (auto const& v : s) {
        out += (out.size() > 1 ? "," : "") + v;
      }
      return out + "}";
    }
  }  // namespace

  ////////////////////////////////////////////////////////////////////////
  // Spans and amalgams
  ////////////////////////////////////////////////////////////////////////

  Span::Span(Homomorphism ib, Homomorphism ic) : _ib(std::move(ib)), _ic(std::move(ic)) {
    if (!same_algebra(_ib.source(), _ic.source())) {
      throw InvariantError("span legs have different sources");
    }
    if (!_ib.is_injective() || !_ic.is_injective()) {
      throw InvariantError("span legs must be injective");
    }
  }

  std::optional<std::string> amalgam_failure(Span const& span, Amalgam const& m, QuasivarietySpec const* k) {
    if (!same_algebra(m.eb.source(), span.b()) || !same_algebra(m.ec.source(), span.c())) {
      return "legs do not start at B and C";
    }
    if (!same_algebra(m.eb.target(), m.ec.target())) {
      return "legs have different targets";
    }
    if (auto f = Homomorphism::check(span.b(), m.d(), m.eb.map())) {
      return "eB: " + *f;
    }
    if (auto f = Homomorphism::check(span.c(), m.d(), m.ec.map())) {
      return "eC: " + *f;
    }
    if (!m.eb.is_injective()) {
      return "eB is not injective";
    }
    if (!m.ec.is_injective()) {
      return "eC is not injective";
    }
    for (Elem a = 0; a < span.a().size(); ++a) {
      if (m.eb(span.ib()(a)) != m.ec(span.ic()(a))) {
        return "square does not commute at " + span.a().element_name(a);
      }
    }
    if (k && !member_of_K(m.d(), *k)) {
      return "D is not in " + k->name;
    }
    return std::nullopt;
  }

  json to_json(Span const& span, Amalgam const& m) {
    auto leg = [](Homomorphism const& h) {
      json j = json::object();
      for (Elem a = 0; a < h.source().size(); ++a) {
        j[h.source().element_name(a)] = h.target().element_name(h(a));
      }
      return j;
    };
    json j;
    j["A"]  = to_json(span.a());
    j["B"]  = to_json(span.b());
    j["C"]  = to_json(span.c());
    j["iB"] = leg(span.ib());
    j["iC"] = leg(span.ic());
    j["D"]  = to_json(m.d());
    j["eB"] = leg(m.eb);
    j["eC"] = leg(m.ec);
    return j;
  }

  Amalgam pushout_unary(Span const& span) {
    auto const& sig = span.a().signature();
    for (auto const& s : sig.symbols()) {
      if (s.arity >= 2) {
        throw InvariantError("pushout_unary: symbol " + s.name + " has arity " + std::to_string(s.arity));
      }
    }
    auto const& b = span.b();
    auto const& c = span.c();

    std::vector<Elem> ec(c.size(), none);
    for (Elem a = 0; a < span.a().size(); ++a) {
      ec[span.ic()(a)] = span.ib()(a);
    }
    std::vector<std::string> names = b.element_names();
    std::set<std::string>    used(names.begin(), names.end());
    for (Elem x = 0; x < c.size(); ++x) {
      if (ec[x] == none) {
        ec[x] = static_cast<Elem>(names.size());
        names.push_back(fresh_name(c.element_name(x), used));
      }
    }
    std::size_t const              n = names.size();
    std::vector<std::vector<Elem>> tables(sig.size());
    for (std::size_t f = 0; f < sig.size(); ++f) {
      if (sig[f].arity == 0) {
        tables[f] = b.table(f);
        continue;
      }
      tables[f].resize(n);
      for (Elem x = 0; x < b.size(); ++x) {
        tables[f][x] = b.table(f)[x];
      }
      for (Elem x = 0; x < c.size(); ++x) {
        if (ec[x] >= b.size()) {
          tables[f][ec[x]] = ec[c.table(f)[x]];
        }
      }
    }
    FiniteAlgebra d(b.name() + "+" + c.name(), sig, names, tables);
    return {Homomorphism(b, d, identity_map(b.size())), Homomorphism(c, d, ec)};
  }

  AmalgamResult amalgamate_search(Span const&             span,
                                  QuasivarietySpec const& k,
                                  std::size_t             size_bound,
                                  std::size_t             node_budget) {
    for (auto const* alg : {&span.a(), &span.b(), &span.c()}) {
      if (!member_of_K(*alg, k)) {
        throw InvariantError("amalgamate_search: " + alg->name() + " is not in " + k.name);
      }
    }
    auto const&       sig = k.signature;
    auto const&       b   = span.b();
    auto const&       c   = span.c();
    std::size_t const nb = b.size(), nc = c.size();

    std::vector<Elem> base(nc, none);
    std::vector<bool> base_used(nb, false);
    for (Elem a = 0; a < span.a().size(); ++a) {
      base[span.ic()(a)]       = span.ib()(a);
      base_used[span.ib()(a)] = true;
    }
    std::vector<Elem> free_c;
    for (Elem x = 0; x < nc; ++x) {
      if (base[x] == none) {
        free_c.push_back(x);
      }
    }

    for (std::size_t n = std::max(nb, nc); n <= size_bound; ++n) {
      std::vector<std::vector<Elem>> b_cells(sig.size());
      for (std::size_t f = 0; f < sig.size(); ++f) {
        std::size_t cells = 1;
        for (std::size_t i = 0; i < sig[f].arity; ++i) {
          cells *= n;
        }
        b_cells[f].assign(cells, undefined_elem);
        for_each_tuple(nb, sig[f].arity, [&](std::span<Elem const> t, std::size_t idx) {
          b_cells[f][tuple_index(n, t)] = b.table(f)[idx];
        });
      }

      std::vector<Elem> ec = base;
      std::vector<bool> used(n, false);
      std::copy(base_used.begin(), base_used.end(), used.begin());
      std::vector<std::vector<Elem>> cells;
      std::vector<Elem>              mapped;

      // Prefill with B and every C cell whose arguments and value are mapped.
      auto fill = [&]() {
        cells = b_cells;
        for (std::size_t f = 0; f < sig.size(); ++f) {
          bool ok = true;
          for_each_tuple(nc, sig[f].arity, [&](std::span<Elem const> t, std::size_t idx) {
            if (!ok) {
              return;
            }
            Elem v = ec[c.table(f)[idx]];
            if (v == none) {
              return;
            }
            mapped.resize(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) {
              if (ec[t[i]] == none) {
                return;
              }
              mapped[i] = ec[t[i]];
            }
            Elem& cell = cells[f][tuple_index(n, mapped)];
            if (cell == undefined_elem) {
              cell = v;
            } else if (cell != v) {
              ok = false;
            }
          });
          if (!ok) {
            return false;
          }
        }
        return true;
      };

      std::optional<Amalgam>                     found;
      std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t i, std::size_t fresh) {
        if (found || !fill()) {
          return;
        }
        if (i == free_c.size()) {
          ModelSearchOptions opts;
          opts.size              = n;
          opts.prefilled         = cells;
          opts.dedupe_isomorphic = false;
          opts.node_budget       = node_budget;
          auto model             = find_model(k, opts, [](FiniteAlgebra const&) { return true; });
          if (!model) {
            return;
          }
          std::vector<std::string> names = b.element_names();
          std::set<std::string>    taken(names.begin(), names.end());
          names.resize(n);
          for (Elem x = 0; x < nc; ++x) {
            if (ec[x] >= nb) {
              names[ec[x]] = fresh_name(c.element_name(x), taken);
            }
          }
          for (std::size_t j = nb; j < n; ++j) {
            if (names[j].empty()) {
              names[j] = fresh_name("d" + std::to_string(j), taken);
            }
          }
          FiniteAlgebra d(b.name() + "+" + c.name(), sig, names, model->tables());
          found = Amalgam{Homomorphism(b, d, identity_map(nb)), Homomorphism(c, d, ec)};
          return;
        }
        Elem x = free_c[i];
        for (Elem target = 0; target < nb; ++target) {
          if (used[target]) {
            continue;
          }
          used[target] = true;
          ec[x]        = target;
          dfs(i + 1, fresh);
          ec[x]        = none;
          used[target] = false;
          if (found) {
            return;
          }
        }
        if (nb + fresh < n) {
          ec[x] = static_cast<Elem>(nb + fresh);
          dfs(i + 1, fresh + 1);
          ec[x] = none;
        }
      };
      dfs(0, 0);
      if (found) {
        if (auto failure = amalgam_failure(span, *found, &k)) {
          throw InternalError("amalgamate_search produced an invalid amalgam: " + *failure);
        }
        return *found;
      }
    }
    return AmalgamExhausted{size_bound, "no amalgam in " + k.name + " with at most " + std::to_string(size_bound)
                                            + " elements"};
  }

  ////////////////////////////////////////////////////////////////////////
  // Window-level probes
  ////////////////////////////////////////////////////////////////////////

  namespace {
    struct Sides {
      std::set<std::string> x, y, z;
      std::string           bounds;
    };

    Sides sides(FilterPairInstance const&       fp,
                std::vector<std::string> const& x,
                std::vector<std::string> const& y,
                std::vector<Term> const&        generators,
                std::size_t                     depth,
                std::string const&              what) {
      Sides s;
      s.x = {x.begin(), x.end()};
      s.y = {y.begin(), y.end()};
      std::set_intersection(s.x.begin(), s.x.end(), s.y.begin(), s.y.end(), std::inserter(s.z, s.z.end()));
      if (s.z.empty() && !fp.k.signature.has_constants()) {
        throw InvariantError(what + ": Z = X ∩ Y is empty");
      }
      for (auto const& g : generators) {
        check_term(g, fp.k.signature);
        for (auto const& v : g.variables()) {
          if (!s.x.count(v)) {
            throw InvariantError(what + ": generator " + g.to_string() + " uses a variable outside X");
          }
        }
      }
      s.bounds = "window depth " + std::to_string(depth) + ", X=" + set_string(s.x) + ", Y=" + set_string(s.y);
      return s;
    }

    std::vector<std::string> vec(std::set<std::string> const& s) {
      return {s.begin(), s.end()};
    }

    // Members of `t` (a theory on `from`) whose variables lie in `vars`.
    std::vector<Term> members_over(TermWindow const& from, WindowTheory const& t, std::set<std::string> const& vars) {
      std::uint64_t const mask = from.mask_of(vec(vars));
      std::vector<Term>   out;
      for (TermId m : t.members) {
        if ((from.variable_mask(m) & ~mask) == 0) {
          out.push_back(from.term(m));
        }
      }
      return out;
    }

    // The successor oracle's classes on a window, as least-member labels.
    std::vector<TermId> oracle_labels(TermWindow const& w, std::span<Term const> generators) {
      SuccessorOracle     oracle(generators);
      std::vector<TermId> out(w.size());
      for (TermId a = 0; a < w.size(); ++a) {
        out[a] = a;
        for (TermId b = 0; b < a; ++b) {
          if (oracle.related(w.term(b), w.term(a))) {
            out[a] = b;
            break;
          }
        }
      }
      return out;
    }

    // Labels of `rel` (on `big`) restricted to the terms of `small`.
    std::vector<TermId> restricted_labels(WindowRelation const& rel, TermWindow const& big, TermWindow const& small) {
      std::vector<TermId>                out(small.size());
      std::unordered_map<TermId, TermId> first;
      for (TermId i = 0; i < small.size(); ++i) {
        auto [it, fresh] = first.emplace(rel.class_of(*big.find(small.term(i))), i);
        out[i]           = it->second;
      }
      return out;
    }

    std::optional<std::pair<TermId, TermId>> first_difference(std::vector<TermId> const& p,
                                                              std::vector<TermId> const& q) {
      for (TermId a = 0; a < p.size(); ++a) {
        if (p[a] != q[a]) {
          return std::make_pair(std::min(p[a], q[a]), a);
        }
      }
      return std::nullopt;
    }

    std::vector<std::string> term_strings(std::vector<Term> const& ts) {
      std::vector<std::string> out;
      for (auto const& t : ts) {
        out.push_back(t.to_string());
      }
      return out;
    }

    // Window terms modulo a window congruence, plus a sink for operations
    // whose results leave the window.
    struct WindowQuotient {
      std::optional<FiniteAlgebra> algebra;
      std::vector<Elem>            elem_of;  // per window term
      std::optional<Elem>          sink;
    };

    WindowQuotient window_quotient(TermWindow const& w, WindowRelation const& rel, std::string name) {
      auto const&                        sig = w.signature();
      WindowQuotient                     q;
      std::unordered_map<TermId, Elem>   elem_of_class;
      std::vector<std::string>           names;
      q.elem_of.resize(w.size());
      for (TermId t = 0; t < w.size(); ++t) {
        auto [it, fresh] = elem_of_class.emplace(rel.class_of(t), static_cast<Elem>(names.size()));
        if (fresh) {
          names.push_back("[" + w.term(t).to_string() + "]");
        }
        q.elem_of[t] = it->second;
      }
      std::size_t                    n = names.size();
      std::vector<std::vector<Elem>> tables(sig.size());
      std::vector<Elem>              args;
      auto                           fill = [&](std::size_t size) {
        for (std::size_t f = 0; f < sig.size(); ++f) {
          std::size_t cells = 1;
          for (std::size_t i = 0; i < sig[f].arity; ++i) {
            cells *= size;
          }
          tables[f].assign(cells, undefined_elem);
        }
        for (TermId t = 0; t < w.size(); ++t) {
          if (w.is_variable(t)) {
            continue;
          }
          auto ch = w.children(t);
          args.resize(ch.size());
          for (std::size_t i = 0; i < ch.size(); ++i) {
            args[i] = q.elem_of[ch[i]];
          }
          Elem& cell = tables[w.head(t)][tuple_index(size, args)];
          if (cell != undefined_elem && cell != q.elem_of[t]) {
            throw InternalError("window relation is not a congruence at " + w.term(t).to_string());
          }
          cell = q.elem_of[t];
        }
      };
      fill(n);
      bool needs_sink = std::any_of(tables.begin(), tables.end(), [](auto const& tab) {
        return std::find(tab.begin(), tab.end(), undefined_elem) != tab.end();
      });
      if (needs_sink) {
        q.sink = static_cast<Elem>(n);
        names.push_back("⊥");
        ++n;
        fill(n);
        for (auto& tab : tables) {
          std::replace(tab.begin(), tab.end(), undefined_elem, *q.sink);
        }
      }
      q.algebra.emplace(std::move(name), sig, names, tables);
      return q;
    }

    // Map of Z-window quotient elements into an X-window quotient.
    std::vector<Elem> quotient_map(WindowQuotient const& from,
                                   TermWindow const&     wfrom,
                                   WindowQuotient const& to,
                                   TermWindow const&     wto) {
      std::vector<Elem> m(from.algebra->size(), none);
      for (TermId t = 0; t < wfrom.size(); ++t) {
        m[from.elem_of[t]] = to.elem_of[*wto.find(wfrom.term(t))];
      }
      if (from.sink) {
        m[*from.sink] = to.sink ? *to.sink : none;
      }
      return m;
    }

    bool tau_fits(FilterPairInstance const& fp, Term const& t, std::size_t depth) {
      for (auto const& e : tau_instances(fp, t)) {
        if (e.lhs.depth() > depth || e.rhs.depth() > depth) {
          return false;
        }
      }
      return true;
    }
  }  // namespace

  Certificate theory_lifting_probe(FilterPairInstance const&       fp,
                                   std::vector<std::string> const& x,
                                   std::vector<std::string> const& y,
                                   std::vector<Term> const&        generators,
                                   std::size_t                     depth) {
    std::string const check = "theory_lifting";
    auto              s     = sides(fp, x, y, generators, depth, check);
    if (s.x == s.y) {
      auto c = Certificate::holds(check, s.bounds);
      c.notes.push_back("X = Y, so T, T' and T'' coincide");
      return c;
    }
    auto const& sig = fp.k.signature;
    TermWindow  wx(sig, vec(s.x), depth), wy(sig, vec(s.y), depth), wz(sig, vec(s.z), depth);
    auto        tx  = window_theory(fp, wx, generators);
    auto        t2  = members_over(wx, tx, s.z);
    auto        tz  = window_theory(fp, wz, t2);
    auto        ty  = window_theory(fp, wy, t2);

    auto lx = restricted_labels(tx.theta, wx, wz);
    auto ly = restricted_labels(ty.theta, wy, wz);
    auto lz = tz.theta.labels();

    auto refute = [&](std::pair<TermId, TermId> p, std::string const& side) {
      json w;
      w["pair"]         = {wz.term(p.first).to_string(), wz.term(p.second).to_string()};
      w["condition"]    = side;
      w["window_depth"] = depth;
      w["t_double_prime"] = term_strings(t2);
      auto c = Certificate::refuted(check, w, s.bounds);
      c.notes.push_back("refutation is relative to the window");
      return c;
    };
    if (auto d = first_difference(lx, lz)) {
      return refute(*d, "theta_T ∩ Fm(Z) = theta_T''");
    }
    if (auto d = first_difference(ly, lz)) {
      return refute(*d, "theta_T' ∩ Fm(Z) = theta_T''");
    }
    if (fp.oracle == ExactOracle::SuccessorFixedPoint) {
      if (first_difference(oracle_labels(wz, generators), lz)) {
        throw InternalError("theory_lifting_probe: window closure disagrees with the exact oracle");
      }
      auto c = Certificate::holds(check, s.bounds);
      c.notes.push_back("all three closures agree with the exact successor-fixed-point oracle on the Z-window");
      return c;
    }
    auto c = Certificate::undetermined(check, s.bounds);
    c.notes.push_back("the three closures agree on the window; no exact oracle for deeper terms");
    return c;
  }

  Certificate flat_amalgamation_probe(FilterPairInstance const&       fp,
                                      std::vector<std::string> const& x,
                                      std::vector<std::string> const& y,
                                      std::vector<Term> const&        generators,
                                      std::size_t                     depth,
                                      FlatAmalgamationOptions const&  options) {
    std::string const check = "flat_amalgamation";
    auto              s     = sides(fp, x, y, generators, depth, check);
    auto const&       sig   = fp.k.signature;
    TermWindow        wx(sig, vec(s.x), depth), wy(sig, vec(s.y), depth), wz(sig, vec(s.z), depth);
    auto              tx = window_theory(fp, wx, generators);
    auto              t2 = members_over(wx, tx, s.z);
    auto              tz = window_theory(fp, wz, t2);
    auto              ty = window_theory(fp, wy, t2);

    auto undetermined = [&](std::string note) {
      auto c = Certificate::undetermined(check, s.bounds);
      c.notes.push_back(std::move(note));
      return c;
    };

    auto qx = window_quotient(wx, tx.theta, "Fm(X)/T");
    auto qy = window_quotient(wy, ty.theta, "Fm(Y)/T'");
    auto qz = window_quotient(wz, tz.theta, "Fm(Z)/T''");
    for (auto const* q : {&qx, &qy, &qz}) {
      if (!member_of_K(*q->algebra, fp.k)) {
        return undetermined("window quotient " + q->algebra->name() + " is not in " + fp.k.name);
      }
    }
    auto mx = quotient_map(qz, wz, qx, wx);
    auto my = quotient_map(qz, wz, qy, wy);
    for (auto const* m : {&mx, &my}) {
      if (std::find(m->begin(), m->end(), none) != m->end()
          || Homomorphism::check(*qz.algebra, m == &mx ? *qx.algebra : *qy.algebra, *m)) {
        return undetermined("the Z-window quotient does not map homomorphically at this depth");
      }
    }
    Homomorphism hx(*qz.algebra, *qx.algebra, mx), hy(*qz.algebra, *qy.algebra, my);
    for (auto const* h : {&hx, &hy}) {
      if (!h->is_injective()) {
        std::vector<TermId> labels(wz.size());
        for (TermId t = 0; t < wz.size(); ++t) {
          labels[t] = static_cast<TermId>((*h)(qz.elem_of[t]));
        }
        // First two Z-terms identified over the larger variable set only.
        for (TermId b = 0; b < wz.size(); ++b) {
          for (TermId a = 0; a < b; ++a) {
            if (labels[a] == labels[b] && qz.elem_of[a] != qz.elem_of[b]) {
              json w;
              w["pair"]         = {wz.term(a).to_string(), wz.term(b).to_string()};
              w["side"]         = h == &hx ? "X" : "Y";
              w["window_depth"] = depth;
              auto c            = Certificate::refuted(check, w, s.bounds);
              c.notes.push_back("the Z-quotient does not embed: T is not conservative over Z in the window");
              return c;
            }
          }
        }
      }
    }
    Span                   span(hx, hy);
    std::optional<Amalgam> amalgam;
    std::string            how;
    if (sig.max_arity() <= 1) {
      amalgam = pushout_unary(span);
      how     = "pushout";
      if (!member_of_K(amalgam->d(), fp.k)) {
        amalgam.reset();
      }
    }
    if (!amalgam) {
      try {
        auto r = amalgamate_search(span, fp.k, options.size_bound, options.node_budget);
        if (auto* e = std::get_if<AmalgamExhausted>(&r)) {
          return undetermined("amalgam not found: " + e->reason);
        }
        amalgam = std::get<Amalgam>(std::move(r));
        how     = "search";
      } catch (BoundExceeded const& e) {
        return undetermined(std::string("amalgam search stopped: ") + e.what());
      }
    }
    if (auto failure = amalgam_failure(span, *amalgam, &fp.k)) {
      throw InternalError("flat_amalgamation_probe: invalid amalgam: " + *failure);
    }
    auto const& d = amalgam->d();

    // h : Fm(X ∪ Y) → D on the joint window, R = i(ker h).
    std::set<std::string> xy = s.x;
    xy.insert(s.y.begin(), s.y.end());
    TermWindow        w(sig, vec(xy), depth);
    std::vector<Elem> value(w.size());
    std::vector<Elem> args;
    for (TermId t = 0; t < w.size(); ++t) {
      if (w.is_variable(t)) {
        auto const& v = w.term(t).name();
        value[t]      = s.x.count(v) ? amalgam->eb(qx.elem_of[*wx.find_variable(v)])
                                     : amalgam->ec(qy.elem_of[*wy.find_variable(v)]);
        continue;
      }
      auto ch = w.children(t);
      args.resize(ch.size());
      for (std::size_t i = 0; i < ch.size(); ++i) {
        args[i] = value[ch[i]];
      }
      value[t] = d.apply(w.head(t), args);
    }
    auto in_r = [&](TermId t) {
      for (auto const& e : fp.tau.equations) {
        Assignment as{{std::string(tau_variable), value[t]}};
        if (evaluate(e.lhs, d, as) != evaluate(e.rhs, d, as)) {
          return false;
        }
      }
      return true;
    };
    auto compare = [&](TermWindow const& side_w, WindowTheory const& expected, std::string const& side)
        -> std::optional<Certificate> {
      std::set<TermId> members(expected.members.begin(), expected.members.end());
      for (TermId t = 0; t < side_w.size(); ++t) {
        if (!tau_fits(fp, side_w.term(t), depth)) {
          continue;
        }
        bool want = members.count(t) > 0;
        bool got  = in_r(*w.find(side_w.term(t)));
        if (want != got) {
          json wit;
          wit["term"]         = side_w.term(t).to_string();
          wit["side"]         = side;
          wit["in_theory"]    = want;
          wit["in_pullback"]  = got;
          wit["window_depth"] = depth;
          auto c              = Certificate::refuted(check, wit, s.bounds);
          c.notes.push_back("refutation is relative to the window");
          return c;
        }
      }
      return std::nullopt;
    };
    if (auto c = compare(wx, tx, "R ∩ Fm(X) = T")) {
      return *c;
    }
    if (auto c = compare(wy, ty, "R ∩ Fm(Y) = T'")) {
      return *c;
    }
    auto c = Certificate::holds(check, s.bounds);
    c.notes.push_back("amalgam by " + how + " with |D| = " + std::to_string(d.size()) + "; R verified on the window");
    if (fp.oracle != ExactOracle::SuccessorFixedPoint) {
      c.verdict = Verdict::UndeterminedUpTo;
      c.notes.push_back("verified within the window only; no exact oracle for deeper terms");
    }
    return c;
  }

  ////////////////////////////////////////////////////////////////////////
  // Craig interpolation
  ////////////////////////////////////////////////////////////////////////

  std::string_view to_string(InterpolationStatus s) noexcept {
    switch (s) {
      case InterpolationStatus::Interpolated:
        return "Interpolated";
      case InterpolationStatus::NotEntailed:
        return "NotEntailed";
      case InterpolationStatus::Undetermined:
        return "Undetermined";
      case InterpolationStatus::Failed:
        return "Failed";
    }
    return "?";
  }

  json InterpolationResult::to_json() const {
    json j;
    j["status"]           = std::string(fpw::to_string(status));
    j["shared_variables"] = shared_variables;
    j["interpolant"]      = term_strings(interpolant);
    j["certificate"]      = certificate.to_json();
    return j;
  }

  InterpolationResult craig_interpolate(FilterPairInstance const& fp,
                                        std::vector<Term> const&  gamma,
                                        Term const&               phi,
                                        CraigConfig const&        config) {
    std::string const     check = "craig_interpolate";
    std::set<std::string> vg, vp = phi.variables();
    for (auto const& g : gamma) {
      g.collect_variables(vg);
    }
    InterpolationResult out;
    std::set_intersection(vg.begin(), vg.end(), vp.begin(), vp.end(), std::back_inserter(out.shared_variables));
    std::string const bounds = "window depth " + std::to_string(config.window_depth);

    auto premise = entails(fp, gamma, phi, config.entails);
    if (premise.certificate.is_refuted()) {
      out.status      = InterpolationStatus::NotEntailed;
      out.certificate = Certificate::refuted(check, {{"reason", "premise not entailed"},
                                                     {"premise", premise.certificate.to_json()}}, bounds);
      return out;
    }
    if (premise.certificate.verdict == Verdict::UndeterminedUpTo) {
      out.status      = InterpolationStatus::Undetermined;
      out.certificate = Certificate::undetermined(check, bounds);
      out.certificate.notes.push_back("premise entailment undetermined");
      return out;
    }

    if (std::find(gamma.begin(), gamma.end(), phi) != gamma.end()) {
      out.interpolant = {phi};
    } else if (!vg.empty() || fp.k.signature.has_constants()) {
      TermWindow   wx(fp.k.signature, vec(vg), config.window_depth);
      WindowTheory theory;
      try {
        theory = window_theory(fp, wx, gamma);
      } catch (BoundExceeded const& e) {
        out.status      = InterpolationStatus::Undetermined;
        out.certificate = Certificate::undetermined(check, bounds);
        out.certificate.notes.push_back(e.what());
        return out;
      }
      std::set<std::string> shared(out.shared_variables.begin(), out.shared_variables.end());
      if (!shared.empty() || fp.k.signature.has_constants()) {
        out.interpolant = members_over(wx, theory, shared);
      }
    }

    auto right = [&](std::vector<Term> const& g) { return entails(fp, g, phi, config.entails); };
    if (config.minimize) {
      for (std::size_t i = out.interpolant.size(); i-- > 0;) {
        auto trial = out.interpolant;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (right(trial).certificate.verdict == Verdict::Holds) {
          out.interpolant = std::move(trial);
        }
      }
    }

    bool undetermined = false;
    for (auto const& g : out.interpolant) {
      auto r = entails(fp, gamma, g, config.entails);
      if (r.certificate.is_refuted()) {
        throw InternalError("craig_interpolate: a window-theory member " + g.to_string() + " is not entailed");
      }
      undetermined = undetermined || r.certificate.verdict != Verdict::Holds;
    }
    auto r = right(out.interpolant);
    json w{{"interpolant", term_strings(out.interpolant)}, {"shared_variables", out.shared_variables}};
    if (r.certificate.is_refuted()) {
      out.status = InterpolationStatus::Failed;
      w["reason"] = "interpolant does not entail phi";
      w["countermodel"] = r.certificate.witness;
      out.certificate = Certificate::refuted(check, w, bounds);
      out.certificate.notes.push_back("refutation is relative to the window theory of gamma");
      return out;
    }
    undetermined = undetermined || r.certificate.verdict != Verdict::Holds;
    if (undetermined) {
      out.status      = InterpolationStatus::Undetermined;
      out.certificate = Certificate::undetermined(check, bounds);
      out.certificate.witness = w;
      out.certificate.notes.push_back("a flanking entailment is undetermined");
      return out;
    }
    out.status      = InterpolationStatus::Interpolated;
    out.certificate = Certificate::holds(check, bounds);
    out.certificate.witness = w;
    return out;
  }

}  // namespace fpw
