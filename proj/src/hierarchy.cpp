#include "fpw/hierarchy.hpp"

#include <algorithm>

#include "fpw/error.hpp"
#include "fpw/leibniz.hpp"

namespace fpw {

  namespace {
    std::string corpus_bounds(std::span<FiniteAlgebra const> corpus) {
      std::string out = "corpus of " + std::to_string(corpus.size()) + " algebra(s)";
      if (corpus.empty()) {
        return out + " (vacuous)";
      }
      out += ":";
      for (auto const& a : corpus) {
        out += " " + a.name();
      }
      return out;
    }

    // i-filters of `a` with their Leibniz congruences, in filter order.
    struct FilterData {
      IFilterTable            table;
      std::vector<Congruence> omega;
    };

    FilterData filter_data(FiniteAlgebra const& a, FilterPairInstance const& fp) {
      FilterData d{i_filters(a, fp), {}};
      for (auto const& f : d.table.filters) {
        d.omega.push_back(leibniz_omega(a, f));
      }
      return d;
    }

    void require_pointed(FilterPairInstance const& fp, std::string_view what) {
      if (!fp.is_pointed_assertional()) {
        throw InvariantError(std::string(what) + " needs tau = {x = c} with c the pointed constant; got "
                             + fp.tau.to_string());
      }
    }
  }  // namespace

  ////////////////////////////////////////////////////////////////////////
  // Sandwich
  ////////////////////////////////////////////////////////////////////////

  bool SandwichReport::equal_everywhere() const {
    return std::all_of(rows.begin(), rows.end(), [](SandwichRow const& r) { return r.lower_equal && r.upper_equal; });
  }

  json SandwichReport::to_json(std::span<FiniteAlgebra const> corpus) const {
    json rs = json::array();
    for (auto const& r : rows) {
      auto it = std::find_if(corpus.begin(), corpus.end(), [&](FiniteAlgebra const& a) { return a.name() == r.algebra; });
      json j;
      j["algebra"] = r.algebra;
      if (it != corpus.end()) {
        j["theta"]        = fpw::to_json(*it, r.theta);
        j["xi_of_i"]      = fpw::to_json(*it, r.lower);
        j["omega_of_i"]   = fpw::to_json(*it, r.upper);
      }
      j["lower_equal"] = r.lower_equal;
      j["upper_equal"] = r.upper_equal;
      rs.push_back(j);
    }
    json out;
    out["inclusions"]       = "hold";
    out["equal_everywhere"] = equal_everywhere();
    out["rows"]             = rs;
    return out;
  }

  SandwichReport sandwich_battery(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    SandwichReport rep;
    for (auto const& a : corpus) {
      ++rep.algebras;
      for (auto const& th : relative_congruences(a, fp.k)) {
        auto f     = i_tau_unchecked(a, th, fp);
        auto lower = xi(a, f, fp);
        auto upper = leibniz_omega(a, f);
        if (!lower.is_subset_of(th) || !th.is_subset_of(upper)) {
          throw InternalError("sandwich inclusion failed on " + a.name() + " at theta = " + th.to_string()
                              + ": xi(i) = " + lower.to_string() + ", omega(i) = " + upper.to_string());
        }
        rep.rows.push_back({a.name(), th, lower, upper, lower == th, upper == th});
      }
    }
    return rep;
  }

  ////////////////////////////////////////////////////////////////////////
  // Refuters
  ////////////////////////////////////////////////////////////////////////

  Certificate algebraizability_refute(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    std::string const check  = "algebraizable";
    auto const        bounds = corpus_bounds(corpus);
    for (auto const& a : corpus) {
      auto        d  = filter_data(a, fp);
      auto const& fs = d.table.filters;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = 0; j < fs.size(); ++j) {
          if (i == j) {
            continue;
          }
          std::string problem;
          if (i < j && d.omega[i] == d.omega[j]) {
            problem = "two i-filters share one Leibniz congruence";
          } else if (fs[i].is_subset_of(fs[j]) && !d.omega[i].is_subset_of(d.omega[j])) {
            problem = "omega is not monotone";
          } else if (d.omega[i].is_subset_of(d.omega[j]) && !fs[i].is_subset_of(fs[j])) {
            problem = "omega does not reflect the order";
          }
          if (!problem.empty()) {
            json w;
            w["algebra"]  = a.name();
            w["reason"]   = problem;
            w["filter_1"] = to_json(a, fs[i]);
            w["filter_2"] = to_json(a, fs[j]);
            w["omega_1"]  = to_json(a, d.omega[i]);
            w["omega_2"]  = to_json(a, d.omega[j]);
            return Certificate::refuted(check, w, bounds);
          }
        }
      }
    }
    return Certificate::consistent(check, bounds);
  }

  Certificate truth_equational_refute(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    std::string const check  = "truth-equational";
    auto const        bounds = corpus_bounds(corpus);
    for (auto const& a : corpus) {
      auto d = filter_data(a, fp);
      for (std::size_t i = 0; i < d.table.filters.size(); ++i) {
        auto const& f   = d.table.filters[i];
        auto        rhs = i_tau_unchecked(a, d.omega[i], fp);
        if (rhs != f) {
          json w;
          w["algebra"]        = a.name();
          w["filter"]         = to_json(a, f);
          w["omega"]          = to_json(a, d.omega[i]);
          w["tau_solutions"]  = to_json(a, rhs);
          return Certificate::refuted(check, w, bounds);
        }
      }
    }
    return Certificate::consistent(check, bounds);
  }

  Certificate protoalgebraic_refute(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    std::string const check  = "protoalgebraic";
    auto const        bounds = corpus_bounds(corpus);
    for (auto const& a : corpus) {
      auto        d  = filter_data(a, fp);
      auto const& fs = d.table.filters;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = 0; j < fs.size(); ++j) {
          if (i == j) {
            continue;
          }
          json w;
          w["algebra"]  = a.name();
          w["filter_1"] = to_json(a, fs[i]);
          w["filter_2"] = to_json(a, fs[j]);
          if (fs[i].is_subset_of(fs[j]) && !d.omega[i].is_subset_of(d.omega[j])) {
            w["reason"]  = "omega is not monotone";
            w["omega_1"] = to_json(a, d.omega[i]);
            w["omega_2"] = to_json(a, d.omega[j]);
            return Certificate::refuted(check, w, bounds);
          }
          if (i < j) {
            auto both  = fs[i].intersect(fs[j]);
            auto lhs   = leibniz_omega(a, both);
            auto rhs   = meet(a, d.omega[i], d.omega[j]);
            if (lhs != rhs) {
              w["reason"]             = "omega does not preserve the meet";
              w["omega_of_meet"]      = to_json(a, lhs);
              w["meet_of_omegas"]     = to_json(a, rhs);
              return Certificate::refuted(check, w, bounds);
            }
          }
        }
      }
    }
    return Certificate::consistent(check, bounds);
  }

  ////////////////////////////////////////////////////////////////////////
  // Assertional pairs
  ////////////////////////////////////////////////////////////////////////

  json AssertionalReport::to_json() const {
    json j = json::array();
    j.push_back(right_inverse.to_json());
    j.push_back(reduced_point.to_json());
    j.push_back(solution_set.to_json());
    return j;
  }

  AssertionalReport assertional_checks(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    require_pointed(fp, "assertional checks");
    std::size_t const c      = *fp.assertional_constant();
    auto const        bounds = corpus_bounds(corpus);
    AssertionalReport rep{Certificate::consistent("omega-right-inverse", bounds),
                          Certificate::consistent("reduced-designates-constant", bounds),
                          Certificate::consistent("reduced-designates-tau-solutions", bounds)};
    for (auto const& a : corpus) {
      auto d = filter_data(a, fp);
      for (std::size_t i = 0; i < d.table.filters.size(); ++i) {
        auto const& f    = d.table.filters[i];
        auto        back = i_tau_unchecked(a, d.omega[i], fp);
        if (back != f && !rep.right_inverse.is_refuted()) {
          json w{{"algebra", a.name()}, {"filter", to_json(a, f)}, {"i_of_omega", to_json(a, back)}};
          rep.right_inverse = Certificate::refuted("omega-right-inverse", w, bounds);
        }
        auto        red   = reduce_matrix({a, f});
        Elem const  point = red.algebra.apply(c, std::span<Elem const>{});
        ElemSet     expected(red.algebra.size(), {point});
        if (red.designated != expected && !rep.reduced_point.is_refuted()) {
          json w{{"algebra", a.name()},
                 {"filter", to_json(a, f)},
                 {"reduced_designated", to_json(red.algebra, red.designated)}};
          rep.reduced_point = Certificate::refuted("reduced-designates-constant", w, bounds);
        }
        auto solutions = i_tau_unchecked(red.algebra, diagonal(red.algebra), fp);
        if (red.designated != solutions && !rep.solution_set.is_refuted()) {
          json w{{"algebra", a.name()},
                 {"filter", to_json(a, f)},
                 {"reduced_designated", to_json(red.algebra, red.designated)},
                 {"tau_solutions", to_json(red.algebra, solutions)}};
          rep.solution_set = Certificate::refuted("reduced-designates-tau-solutions", w, bounds);
        }
      }
    }
    return rep;
  }

  ////////////////////////////////////////////////////////////////////////
  // Iteration of Ω ∘ i
  ////////////////////////////////////////////////////////////////////////

  json IterationResult::to_json(FiniteAlgebra const& a) const {
    json seq = json::array();
    for (std::size_t k = 0; k < sequence.size(); ++k) {
      seq.push_back({{"step", k}, {"theta", fpw::to_json(a, sequence[k])}, {"quotient_size", quotient_sizes[k]}});
    }
    json j;
    j["sequence"] = seq;
    if (stabilized_at) {
      j["stabilized_at"] = *stabilized_at;
    } else {
      j["stabilized_at"] = "DidNotStabilize";
    }
    return j;
  }

  IterationResult omega_i_iterate(FiniteAlgebra const&      a,
                                  Congruence const&         theta0,
                                  FilterPairInstance const& fp,
                                  std::size_t               max_steps) {
    if (!is_relative_congruence(a, theta0, fp.k)) {
      throw InvariantError("iteration start " + theta0.to_string() + " is not a " + fp.k.name + "-congruence");
    }
    IterationResult r;
    r.sequence.push_back(theta0);
    r.quotient_sizes.push_back(theta0.num_blocks());
    for (std::size_t k = 0; k < max_steps; ++k) {
      auto next = leibniz_omega(a, i_tau_unchecked(a, r.sequence.back(), fp));
      if (next == r.sequence.back()) {
        r.stabilized_at = k;
        return r;
      }
      r.quotient_sizes.push_back(next.num_blocks());
      r.sequence.push_back(std::move(next));
    }
    return r;
  }

  ////////////////////////////////////////////////////////////////////////
  // rwa probe
  ////////////////////////////////////////////////////////////////////////

  Certificate rwa_probe(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    require_pointed(fp, "rwa probe");
    std::string const check  = "rwa";
    auto const        bounds = corpus_bounds(corpus);
    bool const        proto  = !protoalgebraic_refute(fp, corpus).is_refuted();
    for (auto const& a : corpus) {
      auto d = filter_data(a, fp);
      for (std::size_t i = 0; i < d.table.filters.size(); ++i) {
        auto const& f = d.table.filters[i];
        for (auto const& th : d.table.congruences) {
          auto it    = i_tau_unchecked(a, th, fp);
          bool left  = d.omega[i].is_subset_of(th);
          bool right = f.is_subset_of(it);
          if (left != right) {
            json w{{"algebra", a.name()},
                   {"filter", to_json(a, f)},
                   {"theta", to_json(a, th)},
                   {"omega_below_theta", left},
                   {"filter_below_i", right}};
            return Certificate::refuted(check, w, bounds);
          }
        }
      }
      if (proto) {
        for (auto const& th : d.table.congruences) {
          auto l  = left_adjoint_L(a, th, d.table.filters);
          auto it = i_tau_unchecked(a, th, fp);
          if (l != it) {
            json w{{"algebra", a.name()},
                   {"reason", "left adjoint L differs from i"},
                   {"theta", to_json(a, th)},
                   {"L", to_json(a, l)},
                   {"i", to_json(a, it)}};
            return Certificate::refuted(check, w, bounds);
          }
        }
      }
    }
    auto c = Certificate::consistent(check, bounds);
    if (proto) {
      c.notes.push_back("L = i verified on every corpus algebra");
    }
    return c;
  }

  ////////////////////////////////////////////////////////////////////////
  // Combined report
  ////////////////////////////////////////////////////////////////////////

  Verdict HierarchyReport::verdict() const {
    std::vector<Certificate> parts{algebraizable, truth_equational, protoalgebraic};
    if (assertional) {
      parts.push_back(assertional->right_inverse);
      parts.push_back(assertional->reduced_point);
      parts.push_back(assertional->solution_set);
    }
    if (rwa) {
      parts.push_back(*rwa);
    }
    return combine(parts);
  }

  int HierarchyReport::exit_code() const {
    Certificate c;
    c.verdict = verdict();
    return c.exit_code();
  }

  json HierarchyReport::to_json(std::span<FiniteAlgebra const> corpus) const {
    json j;
    j["verdict"]          = std::string(fpw::to_string(verdict()));
    j["sandwich"]         = sandwich.to_json(corpus);
    j["algebraizable"]    = algebraizable.to_json();
    j["truth_equational"] = truth_equational.to_json();
    j["protoalgebraic"]   = protoalgebraic.to_json();
    if (assertional) {
      j["assertional"] = assertional->to_json();
    }
    if (rwa) {
      j["rwa"] = rwa->to_json();
    }
    if (!notes.empty()) {
      j["notes"] = notes;
    }
    return j;
  }

  HierarchyReport hierarchy_report(FilterPairInstance const& fp, std::span<FiniteAlgebra const> corpus) {
    HierarchyReport rep{sandwich_battery(fp, corpus),
                        algebraizability_refute(fp, corpus),
                        truth_equational_refute(fp, corpus),
                        protoalgebraic_refute(fp, corpus),
                        std::nullopt,
                        std::nullopt,
                        {}};
    if (fp.is_pointed_assertional()) {
      rep.assertional = assertional_checks(fp, corpus);
      rep.rwa         = rwa_probe(fp, corpus);
    }
    if (!rep.protoalgebraic.is_refuted() && !corpus.empty()) {
      bool all_reduced = true;
      for (auto const& a : corpus) {
        if (!member_of_K(a, fp.k)) {
          continue;
        }
        auto d   = filter_data(a, fp);
        all_reduced = all_reduced && std::any_of(d.omega.begin(), d.omega.end(),
                                                 [](Congruence const& o) { return o.is_diagonal(); });
      }
      if (all_reduced) {
        rep.notes.push_back("every corpus member of K carries a reduced i-matrix: evidence that the reduced "
                            "algebras coincide with K (not a proof)");
      }
    }
    if (rep.sandwich.equal_everywhere()) {
      rep.notes.push_back("sandwich inclusions are equalities on the whole corpus: consistent with "
                          "algebraizability, not a proof");
    }
    return rep;
  }

}  // namespace fpw
