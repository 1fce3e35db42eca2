#include "fpw/filterpair.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "fpw/error.hpp"
#include "fpw/leibniz.hpp"
#include "fpw/models.hpp"

namespace fpw {

  ////////////////////////////////////////////////////////////////////////
  // τ and instances
  ////////////////////////////////////////////////////////////////////////

  void EquationSetTau::validate(Signature const& sig) const {
    if (equations.empty()) {
      throw InvariantError("tau must contain at least one equation");
    }
    for (auto const& e : equations) {
      check_term(e.lhs, sig);
      check_term(e.rhs, sig);
      for (auto const& v : e.variables()) {
        if (v != tau_variable) {
          throw InvariantError("tau equation " + e.to_string() + " uses variable " + v
                               + "; only " + std::string(tau_variable) + " is allowed");
        }
      }
    }
  }

  std::string EquationSetTau::to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < equations.size(); ++i) {
      out += (i ? ", " : "") + equations[i].to_string();
    }
    return out + "}";
  }

  std::size_t EquationSetTau::depth() const {
    std::size_t d = 0;
    for (auto const& e : equations) {
      d = std::max({d, e.lhs.depth(), e.rhs.depth()});
    }
    return d;
  }

  std::string_view to_string(ExactOracle o) noexcept {
    switch (o) {
      case ExactOracle::SuccessorFixedPoint:
        return "ls-successor-fixed-point";
    }
    return "?";
  }

  std::optional<ExactOracle> parse_oracle_tag(std::string_view tag) noexcept {
    if (tag == "ls-successor-fixed-point") {
      return ExactOracle::SuccessorFixedPoint;
    }
    return std::nullopt;
  }

  void FilterPairInstance::validate() const {
    k.validate();
    tau.validate(k.signature);
    if (oracle == ExactOracle::SuccessorFixedPoint && !has_successor_shape(*this)) {
      throw InvariantError("the successor oracle needs signature {s/1}, no axioms and tau = {x = s(x)}");
    }
  }

  std::optional<std::size_t> FilterPairInstance::assertional_constant() const {
    if (!k.point || tau.equations.size() != 1) {
      return std::nullopt;
    }
    auto const& e = tau.equations.front();
    Term        x = Term::variable(std::string(tau_variable));
    Term        c = Term::apply(*k.point, {});
    if ((e.lhs == x && e.rhs == c) || (e.lhs == c && e.rhs == x)) {
      return k.signature.index(*k.point);
    }
    return std::nullopt;
  }

  bool has_successor_shape(FilterPairInstance const& fp) {
    if (fp.k.signature != Signature({{"s", 1}}) || fp.k.axiom_count() != 0
        || fp.tau.equations.size() != 1) {
      return false;
    }
    Term        x  = Term::variable(std::string(tau_variable));
    Term        sx = Term::apply("s", {x});
    auto const& e  = fp.tau.equations.front();
    return (e.lhs == x && e.rhs == sx) || (e.lhs == sx && e.rhs == x);
  }

  FilterPairInstance register_exact_oracle(FilterPairInstance fp, std::string_view tag) {
    auto o = parse_oracle_tag(tag);
    if (!o) {
      throw InvariantError("unknown oracle tag '" + std::string(tag) + "'");
    }
    fp.oracle = *o;
    fp.validate();
    return fp;
  }

  std::vector<Equation> tau_instances(FilterPairInstance const& fp, Term const& phi) {
    Substitution          sub{{std::string(tau_variable), phi}};
    std::vector<Equation> out;
    for (auto const& e : fp.tau.equations) {
      out.push_back({substitute(e.lhs, sub), substitute(e.rhs, sub)});
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Successor oracle
  ////////////////////////////////////////////////////////////////////////

  std::pair<std::string, std::size_t> SuccessorOracle::tower(Term const& t) {
    std::size_t n   = 0;
    Term const* cur = &t;
    while (!cur->is_variable()) {
      if (cur->name() != "s" || cur->args().size() != 1) {
        throw InvariantError("term " + t.to_string() + " is not an iterate s^n(v)");
      }
      cur = &cur->args()[0];
      ++n;
    }
    return {cur->name(), n};
  }

  SuccessorOracle::SuccessorOracle(std::span<Term const> generators) {
    for (auto const& g : generators) {
      auto [v, n] = tower(g);
      auto [it, fresh] = _thresholds.emplace(v, n);
      if (!fresh) {
        it->second = std::min(it->second, n);
      }
    }
  }

  SuccessorOracle SuccessorOracle::from_thresholds(std::map<std::string, std::size_t> thresholds) {
    SuccessorOracle o;
    o._thresholds = std::move(thresholds);
    return o;
  }

  std::optional<std::size_t> SuccessorOracle::threshold(std::string const& v) const {
    auto it = _thresholds.find(v);
    if (it == _thresholds.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  bool SuccessorOracle::in_theory(Term const& phi) const {
    auto [v, n] = tower(phi);
    auto t      = threshold(v);
    return t && n >= *t;
  }

  bool SuccessorOracle::related(Term const& a, Term const& b) const {
    auto [v, m] = tower(a);
    auto [w, n] = tower(b);
    if (v == w && m == n) {
      return true;
    }
    auto t = threshold(v);
    return v == w && t && m >= *t && n >= *t;
  }

  ////////////////////////////////////////////////////////////////////////
  // i, Ξ and the closure operator
  ////////////////////////////////////////////////////////////////////////

  ElemPair tau_value(FiniteAlgebra const& a, Equation const& e, Elem elem) {
    Assignment as{{std::string(tau_variable), elem}};
    return {evaluate(e.lhs, a, as), evaluate(e.rhs, a, as)};
  }

  std::vector<ElemPair> tau_pairs(FiniteAlgebra const& a, ElemSet const& s, FilterPairInstance const& fp) {
    std::vector<ElemPair> out;
    for (Elem m : s.elements()) {
      for (auto const& e : fp.tau.equations) {
        out.push_back(tau_value(a, e, m));
      }
    }
    return out;
  }

  ElemSet i_tau_unchecked(FiniteAlgebra const& a, Congruence const& theta, FilterPairInstance const& fp) {
    if (theta.universe() != a.size()) {
      throw MismatchError("congruence and algebra have different carriers");
    }
    ElemSet out(a.size());
    for (Elem m = 0; m < a.size(); ++m) {
      bool in = std::all_of(fp.tau.equations.begin(), fp.tau.equations.end(), [&](Equation const& e) {
        auto [l, r] = tau_value(a, e, m);
        return theta.related(l, r);
      });
      if (in) {
        out.insert(m);
      }
    }
    return out;
  }

  ElemSet i_tau(FiniteAlgebra const& a, Congruence const& theta, FilterPairInstance const& fp) {
    if (!is_relative_congruence(a, theta, fp.k)) {
      throw InvariantError("i: " + theta.to_string() + " is not a " + fp.k.name + "-congruence of "
                           + a.name());
    }
    return i_tau_unchecked(a, theta, fp);
  }

  Congruence xi(FiniteAlgebra const& a, ElemSet const& s, FilterPairInstance const& fp) {
    if (s.universe() != a.size()) {
      throw MismatchError("subset and algebra have different carriers");
    }
    auto pairs = tau_pairs(a, s, fp);
    return k_congruence_generated(a, pairs, fp.k);
  }

  ElemSet closure_c(FiniteAlgebra const& a, ElemSet const& s, FilterPairInstance const& fp) {
    return i_tau_unchecked(a, xi(a, s, fp), fp);
  }

  IFilterTable i_filters(FiniteAlgebra const& a, FilterPairInstance const& fp, std::size_t max_size) {
    IFilterTable t;
    t.congruences = relative_congruences(a, fp.k, max_size);
    std::vector<ElemSet> images;
    for (auto const& c : t.congruences) {
      images.push_back(i_tau_unchecked(a, c, fp));
    }
    t.filters = images;
    std::sort(t.filters.begin(), t.filters.end());
    t.filters.erase(std::unique(t.filters.begin(), t.filters.end()), t.filters.end());
    t.multiplicity.assign(t.filters.size(), 0);
    for (auto const& img : images) {
      auto idx = static_cast<std::size_t>(std::lower_bound(t.filters.begin(), t.filters.end(), img)
                                          - t.filters.begin());
      t.filter_of.push_back(idx);
      ++t.multiplicity[idx];
    }
    return t;
  }

  ////////////////////////////////////////////////////////////////////////
  // Naturality and adjunction
  ////////////////////////////////////////////////////////////////////////

  Certificate naturality_check(Homomorphism const& f, FilterPairInstance const& fp) {
    auto const& src = f.source();
    auto const& tgt = f.target();
    auto        co  = relative_congruences(tgt, fp.k);
    std::string bounds = "exhaustive over " + std::to_string(co.size()) + " congruence(s) of " + tgt.name();
    for (auto const& theta : co) {
      auto lhs = f.preimage(i_tau_unchecked(tgt, theta, fp));
      auto rhs = i_tau_unchecked(src, pullback(f, theta), fp);
      if (lhs != rhs) {
        json w;
        w["theta"]                 = to_json(tgt, theta);
        w["preimage_of_filter"]    = to_json(src, lhs);
        w["filter_of_preimage"]    = to_json(src, rhs);
        return Certificate::refuted("naturality", w, bounds);
      }
    }
    return Certificate::holds("naturality", bounds);
  }

  Certificate adjunction_check(FiniteAlgebra const& a, FilterPairInstance const& fp, AdjunctionOptions const& opts) {
    auto                 co = relative_congruences(a, fp.k);
    std::size_t const    n  = a.size();
    std::vector<ElemSet> subsets;
    std::string          bounds;
    if (n <= opts.exhaustive_limit) {
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        ElemSet s(n);
        for (Elem m = 0; m < n; ++m) {
          if (code >> m & 1) {
            s.insert(m);
          }
        }
        subsets.push_back(std::move(s));
      }
      bounds = "all " + std::to_string(subsets.size()) + " subsets";
    } else {
      std::mt19937_64 rng(opts.seed);
      subsets.push_back(ElemSet(n));
      subsets.push_back(ElemSet::full(n));
      for (std::size_t i = 0; i < opts.samples; ++i) {
        ElemSet s(n);
        for (Elem m = 0; m < n; ++m) {
          if (rng() & 1) {
            s.insert(m);
          }
        }
        subsets.push_back(std::move(s));
      }
      bounds = std::to_string(subsets.size()) + " sampled subsets (seed " + std::to_string(opts.seed) + ")";
    }
    bounds += " x " + std::to_string(co.size()) + " congruence(s)";
    std::vector<ElemSet> filters;
    for (auto const& theta : co) {
      filters.push_back(i_tau_unchecked(a, theta, fp));
    }
    for (auto const& s : subsets) {
      auto generated = xi(a, s, fp);
      for (std::size_t j = 0; j < co.size(); ++j) {
        bool left  = generated.is_subset_of(co[j]);
        bool right = s.is_subset_of(filters[j]);
        if (left != right) {
          json w;
          w["subset"]      = to_json(a, s);
          w["theta"]       = to_json(a, co[j]);
          w["xi_below"]    = left;
          w["below_i"]     = right;
          return Certificate::refuted("adjunction", w, bounds);
        }
      }
    }
    return n <= opts.exhaustive_limit ? Certificate::holds("adjunction", bounds)
                                      : Certificate::consistent("adjunction", bounds);
  }

  ////////////////////////////////////////////////////////////////////////
  // Entailment
  ////////////////////////////////////////////////////////////////////////

  namespace {
    struct Countermodel {
      FiniteAlgebra algebra;
      Assignment    valuation;
    };

    constexpr std::size_t valuation_cap = 1'000'000;

    // A valuation satisfying every hypothesis and failing some goal.
    std::optional<Assignment> refuting_valuation(FiniteAlgebra const&            a,
                                                 std::vector<std::string> const& vars,
                                                 std::vector<Equation> const&    hyps,
                                                 std::vector<Equation> const&    goals) {
      std::size_t total = 1;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        total *= a.size();
        if (total > valuation_cap) {
          return std::nullopt;
        }
      }
      for (std::size_t code = 0; code < total; ++code) {
        Assignment  as;
        std::size_t c = code;
        for (auto const& v : vars) {
          as[v] = static_cast<Elem>(c % a.size());
          c /= a.size();
        }
        auto holds = [&](Equation const& e) { return evaluate(e.lhs, a, as) == evaluate(e.rhs, a, as); };
        if (std::all_of(hyps.begin(), hyps.end(), holds) && !std::all_of(goals.begin(), goals.end(), holds)) {
          return as;
        }
      }
      return std::nullopt;
    }

    std::optional<Countermodel> search_countermodel(FilterPairInstance const&    fp,
                                                    std::vector<Equation> const& hyps,
                                                    std::vector<Equation> const& goals,
                                                    std::size_t                  max_size) {
      std::set<std::string> vs;
      for (auto const& e : hyps) {
        e.lhs.collect_variables(vs);
        e.rhs.collect_variables(vs);
      }
      for (auto const& e : goals) {
        e.lhs.collect_variables(vs);
        e.rhs.collect_variables(vs);
      }
      std::vector<std::string> vars(vs.begin(), vs.end());
      for (auto const& g : fp.k.generators) {
        if (auto v = refuting_valuation(g, vars, hyps, goals)) {
          return Countermodel{g, *v};
        }
      }
      std::optional<Countermodel> found;
      for (std::size_t n = 1; n <= max_size && !found; ++n) {
        ModelSearchOptions opts;
        opts.size = n;
        enumerate_models(fp.k, opts, [&](FiniteAlgebra const& a) {
          if (auto v = refuting_valuation(a, vars, hyps, goals)) {
            found = Countermodel{a, *v};
            return false;
          }
          return true;
        });
      }
      return found;
    }

    json countermodel_witness(Countermodel const& cm) {
      json w;
      w["countermodel"] = to_json(cm.algebra);
      w["valuation"]    = to_json(cm.algebra, cm.valuation);
      return w;
    }
  }  // namespace

  EntailmentResult entails(FilterPairInstance const& fp,
                           std::span<Term const>     gamma,
                           Term const&               phi,
                           EntailsConfig const&      config) {
    for (auto const& g : gamma) {
      check_term(g, fp.k.signature);
    }
    check_term(phi, fp.k.signature);
    std::string const     check = "entails";
    std::vector<Equation> hyps;
    for (auto const& g : gamma) {
      auto inst = tau_instances(fp, g);
      hyps.insert(hyps.end(), inst.begin(), inst.end());
    }
    auto        goals  = tau_instances(fp, phi);
    std::string bounds = "derivation depth <= " + std::to_string(config.budget.max_depth)
                         + ", countermodels up to size " + std::to_string(config.countermodel_size);

    EntailmentResult result{Certificate::undetermined(check, bounds), "", {}, {}, {}};

    std::optional<bool> exact;
    if (fp.oracle == ExactOracle::SuccessorFixedPoint) {
      exact = SuccessorOracle(gamma).in_theory(phi);
    }

    // Derivation prong.
    bool              derived = false;
    std::vector<std::string> exhausted;
    if (!exact || config.cross_check || *exact) {
      derived = true;
      for (auto const& goal : goals) {
        auto r = derive(fp.k, hyps, goal, config.budget);
        if (auto* d = std::get_if<Derivation>(&r)) {
          result.derivations.push_back(std::move(*d));
        } else {
          auto const& ex = std::get<Exhausted>(r);
          exhausted.push_back(goal.to_string() + ": " + ex.reason);
          derived = false;
        }
      }
      if (!derived) {
        result.derivations.clear();
      }
    }

    // Countermodel prong.
    std::optional<Countermodel> cm;
    if (!derived || config.cross_check) {
      cm = search_countermodel(fp, hyps, goals, config.countermodel_size);
    }

    if (derived && cm) {
      throw InternalError("entailment: a derivation and a countermodel were both found\nderivation:\n"
                          + result.derivations.front().to_text() + "countermodel:\n"
                          + countermodel_witness(*cm).dump(2));
    }
    if (exact && ((*exact && cm) || (!*exact && derived))) {
      throw InternalError("entailment: the exact oracle disagrees with the " + std::string(derived ? "derivation" : "countermodel"));
    }

    auto holds_with_proof = [&] {
      json w = json::array();
      for (auto const& d : result.derivations) {
        w.push_back(d.to_json());
      }
      auto c    = Certificate::holds(check, bounds);
      c.witness = json{{"derivations", w}};
      return c;
    };

    if (exact) {
      result.decided_by = "oracle";
      if (*exact) {
        result.certificate = derived ? holds_with_proof() : Certificate::holds(check, "exact oracle");
      } else {
        json w = cm ? countermodel_witness(*cm) : json::object();
        w["oracle"] = std::string(to_string(*fp.oracle));
        result.certificate = Certificate::refuted(check, w, "exact oracle");
      }
    } else if (derived) {
      result.decided_by  = "derivation";
      result.certificate = holds_with_proof();
    } else if (cm) {
      result.decided_by  = "countermodel";
      result.certificate = Certificate::refuted(check, countermodel_witness(*cm), bounds);
    } else {
      for (auto const& e : exhausted) {
        result.certificate.notes.push_back(e);
      }
    }
    if (cm) {
      result.countermodel = cm->algebra;
      result.valuation    = cm->valuation;
    }
    return result;
  }

}  // namespace fpw
