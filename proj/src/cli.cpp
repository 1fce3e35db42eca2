#include "fpw/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <algorithm>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "fpw/congruence.hpp"
#include "fpw/eqlogic.hpp"
#include "fpw/error.hpp"
#include "fpw/filterpair.hpp"
#include "fpw/hierarchy.hpp"
#include "fpw/interp.hpp"
#include "fpw/io.hpp"
#include "fpw/leibniz.hpp"

namespace fpw {

  void WorkbenchConfig::validate() const {
    if (max_algebra_size == 0 || countermodel_size == 0 || window_depth == 0 || derivation_budget == 0) {
      throw InvariantError("configuration bounds must be positive");
    }
  }

  json WorkbenchConfig::to_json() const {
    json j;
    j["max_algebra_size"]  = max_algebra_size;
    j["countermodel_size"] = countermodel_size;
    j["window_depth"]      = window_depth;
    j["derivation_budget"] = derivation_budget;
    j["seed"]              = seed;
    return j;
  }

  std::vector<std::string> const& subcommands() {
    static std::vector<std::string> const names{"congruences", "leibniz", "ifilters",    "sandwich",
                                                "hierarchy",   "entails", "derive",      "interpolate",
                                                "amalgamate",  "lifting", "regularity", "iterate"};
    return names;
  }

  namespace {
    int exit_of(Verdict v) {
      Certificate c;
      c.verdict = v;
      return c.exit_code();
    }

    std::vector<std::string> split_list(std::string const& s) {
      std::vector<std::string> out;
      std::string              cur;
      for (char ch : s) {
        if (ch == ',' || ch == ' ') {
          if (!cur.empty()) {
            out.push_back(cur);
          }
          cur.clear();
        } else {
          cur += ch;
        }
      }
      if (!cur.empty()) {
        out.push_back(cur);
      }
      return out;
    }

    ElemSet parse_subset(FiniteAlgebra const& a, std::string const& text) {
      ElemSet s(a.size());
      for (auto const& name : split_list(text)) {
        auto e = a.find_element(name);
        if (!e) {
          throw ParseError("unknown element '" + name + "' of " + a.name(), 0, 0);
        }
        s.insert(*e);
      }
      return s;
    }

    // "b0,b1,..." images of the elements of `src` in carrier order.
    std::vector<Elem> parse_map(FiniteAlgebra const& src, FiniteAlgebra const& tgt, std::string const& text) {
      auto              names = split_list(text);
      std::vector<Elem> m;
      if (names.size() != src.size()) {
        throw ParseError("map lists " + std::to_string(names.size()) + " images for " + std::to_string(src.size())
                             + " elements of " + src.name(),
                         0, 0);
      }
      for (auto const& n : names) {
        auto e = tgt.find_element(n);
        if (!e) {
          throw ParseError("unknown element '" + n + "' of " + tgt.name(), 0, 0);
        }
        m.push_back(*e);
      }
      return m;
    }

    std::vector<std::string> strings(std::vector<Term> const& ts) {
      std::vector<std::string> out;
      for (auto const& t : ts) {
        out.push_back(t.to_string());
      }
      return out;
    }

    struct Context {
      WorkbenchConfig config;

      FiniteAlgebra algebra(std::string const& path) const {
        auto a = load_algebra(path);
        if (a.size() > config.max_algebra_size) {
          throw InvariantError(a.name() + " has " + std::to_string(a.size()) + " elements; max_algebra_size is "
                               + std::to_string(config.max_algebra_size));
        }
        return a;
      }
      std::vector<FiniteAlgebra> corpus(std::vector<std::string> const& paths) const {
        std::vector<FiniteAlgebra> out;
        for (auto const& p : paths) {
          out.push_back(algebra(p));
        }
        return out;
      }
      static void check_signature(FiniteAlgebra const& a, Signature const& sig) {
        if (a.signature() != sig) {
          throw MismatchError(a.name() + " has signature " + a.signature().to_string() + ", expected "
                              + sig.to_string());
        }
      }
      EntailsConfig entails_config() const {
        EntailsConfig e;
        e.countermodel_size = config.countermodel_size;
        e.budget.max_depth  = config.window_depth;
        e.budget.max_steps  = config.derivation_budget;
        return e;
      }
    };

    // The class named by --k (quasivariety file) or --fp (filter pair file).
    QuasivarietySpec class_of(std::string const& k_path, std::string const& fp_path) {
      if (!k_path.empty() && !fp_path.empty()) {
        throw InvariantError("give either --k or --fp, not both");
      }
      if (!k_path.empty()) {
        return load_quasivariety(k_path);
      }
      if (!fp_path.empty()) {
        return load_filterpair(fp_path).k;
      }
      throw InvariantError("a class is required (--k or --fp)");
    }

    using Handler = std::function<RunResult()>;

    void add_config_options(CLI::App& app, WorkbenchConfig& c) {
      app.add_option("--max-size", c.max_algebra_size, "Largest carrier accepted");
      app.add_option("--countermodel-size", c.countermodel_size, "Largest countermodel searched");
      app.add_option("--depth", c.window_depth, "Term window depth");
      app.add_option("--budget", c.derivation_budget, "Derivation step budget");
      app.add_option("--seed", c.seed, "Seed for sampled checks");
      app.add_flag("--timing", c.timing, "Add wall-clock timing to the report");
      app.add_flag("--emit-proof", c.emit_proof, "Add numbered proof text to the report");
    }

    Handler build(std::string_view sub, CLI::App& app, Context& ctx) {
      // Option storage shared by the handlers; lives as long as the app.
      struct Opts {
        std::string              alg, fp, k, filter, theta, phi, goal, a, b, c, ib, ic, x, y;
        std::vector<std::string> corpus, gamma, hyps, gens;
        std::size_t              bound = 0;
        bool                     pushout = false, flat = false, minimize = false;
      };
      auto o = std::make_shared<Opts>();

      if (sub == "congruences") {
        app.add_option("--alg", o->alg, "Algebra file")->required();
        app.add_option("--k", o->k, "Quasivariety file (default: all congruences)");
        app.add_option("--fp", o->fp, "Filter pair file (uses its class)");
        return [o, &ctx] {
          auto                    a = ctx.algebra(o->alg);
          std::vector<Congruence> cs;
          json                    r;
          if (o->k.empty() && o->fp.empty()) {
            cs         = all_congruences(a, ctx.config.max_algebra_size);
            r["class"] = "all";
          } else {
            auto k = class_of(o->k, o->fp);
            Context::check_signature(a, k.signature);
            cs         = relative_congruences(a, k, ctx.config.max_algebra_size);
            r["class"] = k.name;
          }
          r["algebra"] = a.name();
          json list    = json::array();
          for (auto const& c : cs) {
            list.push_back(to_json(a, c));
          }
          r["count"]       = cs.size();
          r["congruences"] = list;
          return RunResult{0, r, std::to_string(cs.size()) + " congruences on " + a.name()};
        };
      }
      if (sub == "leibniz") {
        app.add_option("--alg", o->alg, "Algebra file")->required();
        app.add_option("--filter", o->filter, "Designated elements, comma separated")->required();
        return [o, &ctx] {
          auto    a = ctx.algebra(o->alg);
          ElemSet f = parse_subset(a, o->filter);
          auto    w = leibniz_omega(a, f);
          auto    m = reduce_matrix({a, f});
          json    r;
          r["algebra"]            = a.name();
          r["filter"]             = to_json(a, f);
          r["omega"]              = to_json(a, w);
          r["reduced"]            = is_reduced({a, f});
          r["reduced_algebra"]    = to_json(m.algebra);
          r["reduced_designated"] = to_json(m.algebra, m.designated);
          return RunResult{0, r, "Omega has " + std::to_string(w.num_blocks()) + " blocks"};
        };
      }
      if (sub == "ifilters") {
        app.add_option("--fp", o->fp, "Filter pair file")->required();
        app.add_option("--alg", o->alg, "Algebra file")->required();
        return [o, &ctx] {
          auto fp = load_filterpair(o->fp);
          auto a  = ctx.algebra(o->alg);
          Context::check_signature(a, fp.k.signature);
          auto t = i_filters(a, fp, ctx.config.max_algebra_size);
          json rows = json::array();
          for (std::size_t i = 0; i < t.congruences.size(); ++i) {
            rows.push_back({{"theta", to_json(a, t.congruences[i])}, {"i", to_json(a, t.filters[t.filter_of[i]])}});
          }
          json fs = json::array();
          for (std::size_t i = 0; i < t.filters.size(); ++i) {
            fs.push_back({{"filter", to_json(a, t.filters[i])},
                          {"multiplicity", t.multiplicity[i]},
                          {"omega", to_json(a, leibniz_omega(a, t.filters[i]))},
                          {"xi", to_json(a, xi(a, t.filters[i], fp))}});
          }
          json r;
          r["algebra"]     = a.name();
          r["filterpair"]  = fp.name;
          r["i_injective"] = t.i_injective();
          r["congruences"] = rows;
          r["filters"]     = fs;
          return RunResult{0, r, std::to_string(t.filters.size()) + " i-filters on " + a.name()};
        };
      }
      if (sub == "sandwich" || sub == "hierarchy") {
        app.add_option("--fp", o->fp, "Filter pair file")->required();
        app.add_option("--corpus", o->corpus, "Algebra files")->expected(0, -1);
        bool const hierarchy = sub == "hierarchy";
        return [o, &ctx, hierarchy] {
          auto fp     = load_filterpair(o->fp);
          auto corpus = ctx.corpus(o->corpus);
          for (auto const& a : corpus) {
            Context::check_signature(a, fp.k.signature);
          }
          if (!hierarchy) {
            auto rep = sandwich_battery(fp, corpus);
            return RunResult{0, rep.to_json(corpus),
                             std::string("sandwich inclusions hold; equal everywhere: ")
                                 + (rep.equal_everywhere() ? "yes" : "no")};
          }
          auto rep = hierarchy_report(fp, corpus);
          auto r   = rep.to_json(corpus);
          r["filterpair"] = fp.name;
          return RunResult{rep.exit_code(), r, "hierarchy: " + std::string(to_string(rep.verdict()))};
        };
      }
      if (sub == "entails") {
        app.add_option("--fp", o->fp, "Filter pair file")->required();
        app.add_option("--gamma", o->gamma, "Premise formula (repeatable)")->expected(0, -1);
        app.add_option("--phi", o->phi, "Conclusion formula")->required();
        return [o, &ctx] {
          auto              fp = load_filterpair(o->fp);
          std::vector<Term> gamma;
          for (auto const& g : o->gamma) {
            gamma.push_back(parse_term(g, fp.k.signature));
          }
          Term phi = parse_term(o->phi, fp.k.signature);
          auto res = entails(fp, gamma, phi, ctx.entails_config());
          json r;
          r["gamma"]       = strings(gamma);
          r["phi"]         = phi.to_string();
          r["decided_by"]  = res.decided_by;
          r["certificate"] = res.certificate.to_json();
          if (ctx.config.emit_proof && !res.derivations.empty()) {
            json text = json::array();
            for (auto const& d : res.derivations) {
              text.push_back(d.to_text());
            }
            r["proof_text"] = text;
          }
          return RunResult{res.certificate.exit_code(), r,
                           "entails: " + std::string(to_string(res.certificate.verdict))
                               + (res.decided_by.empty() ? "" : " by " + res.decided_by)};
        };
      }
      if (sub == "derive") {
        app.add_option("--k", o->k, "Quasivariety file");
        app.add_option("--fp", o->fp, "Filter pair file (uses its class)");
        app.add_option("--hyp", o->hyps, "Hypothesis equation (repeatable)")->expected(0, -1);
        app.add_option("--goal", o->goal, "Goal equation")->required();
        return [o, &ctx] {
          auto                  k = class_of(o->k, o->fp);
          std::vector<Equation> hyps;
          for (auto const& h : o->hyps) {
            hyps.push_back(parse_equation(h, k.signature));
          }
          auto             goal = parse_equation(o->goal, k.signature);
          DerivationBudget budget;
          budget.max_depth = ctx.config.window_depth;
          budget.max_steps = ctx.config.derivation_budget;
          auto res         = derive(k, hyps, goal, budget);
          json r;
          r["goal"] = goal.to_string();
          if (auto* d = std::get_if<Derivation>(&res)) {
            r["status"]     = "Derived";
            r["derivation"] = d->to_json();
            if (ctx.config.emit_proof) {
              r["proof_text"] = d->to_text();
            }
            return RunResult{0, r, "derived in " + std::to_string(d->steps.size()) + " steps"};
          }
          auto const& e      = std::get<Exhausted>(res);
          r["status"]        = "Exhausted";
          r["depth_reached"] = e.depth_reached;
          r["reason"]        = e.reason;
          return RunResult{2, r, "exhausted: " + e.reason};
        };
      }
      if (sub == "interpolate") {
        app.add_option("--fp", o->fp, "Filter pair file")->required();
        app.add_option("--gamma", o->gamma, "Premise formula (repeatable)")->expected(0, -1);
        app.add_option("--phi", o->phi, "Conclusion formula")->required();
        app.add_flag("--minimize", o->minimize, "Greedily shrink the interpolant");
        return [o, &ctx] {
          auto              fp = load_filterpair(o->fp);
          std::vector<Term> gamma;
          for (auto const& g : o->gamma) {
            gamma.push_back(parse_term(g, fp.k.signature));
          }
          CraigConfig cc;
          cc.window_depth = ctx.config.window_depth;
          cc.entails      = ctx.entails_config();
          cc.minimize     = o->minimize;
          auto res        = craig_interpolate(fp, gamma, parse_term(o->phi, fp.k.signature), cc);
          int  code       = res.status == InterpolationStatus::Interpolated   ? 0
                            : res.status == InterpolationStatus::Undetermined ? 2
                                                                              : 1;
          return RunResult{code, res.to_json(), "interpolate: " + std::string(to_string(res.status))};
        };
      }
      if (sub == "amalgamate") {
        app.add_option("--a", o->a, "Algebra file A")->required();
        app.add_option("--b", o->b, "Algebra file B")->required();
        app.add_option("--c", o->c, "Algebra file C")->required();
        app.add_option("--ib", o->ib, "Images of A's elements in B, comma separated")->required();
        app.add_option("--ic", o->ic, "Images of A's elements in C, comma separated")->required();
        app.add_option("--k", o->k, "Quasivariety file");
        app.add_option("--fp", o->fp, "Filter pair file (uses its class)");
        app.add_option("--bound", o->bound, "Largest amalgam searched (default |B|+|C|-|A|)");
        app.add_flag("--pushout", o->pushout, "Use the unary pushout");
        return [o, &ctx] {
          auto a = ctx.algebra(o->a), b = ctx.algebra(o->b), c = ctx.algebra(o->c);
          Span span(Homomorphism(a, b, parse_map(a, b, o->ib)), Homomorphism(a, c, parse_map(a, c, o->ic)));
          json r;
          if (o->pushout || (o->k.empty() && o->fp.empty())) {
            auto m = pushout_unary(span);
            if (auto f = amalgam_failure(span, m)) {
              throw InternalError("pushout failed verification: " + *f);
            }
            r["method"]  = "pushout";
            r["amalgam"] = to_json(span, m);
            return RunResult{0, r, "pushout with " + std::to_string(m.d().size()) + " elements"};
          }
          auto        k     = class_of(o->k, o->fp);
          std::size_t bound = o->bound ? o->bound : b.size() + c.size() - a.size();
          auto        res   = amalgamate_search(span, k, bound);
          r["method"]       = "search";
          r["size_bound"]   = bound;
          if (auto* m = std::get_if<Amalgam>(&res)) {
            r["status"]  = "Found";
            r["amalgam"] = to_json(span, *m);
            return RunResult{0, r, "amalgam with " + std::to_string(m->d().size()) + " elements"};
          }
          r["status"] = "Exhausted";
          r["reason"] = std::get<AmalgamExhausted>(res).reason;
          return RunResult{2, r, "no amalgam within " + std::to_string(bound) + " elements"};
        };
      }
      if (sub == "lifting") {
        app.add_option("--fp", o->fp, "Filter pair file")->required();
        app.add_option("--x", o->x, "Variables of X, comma separated")->required();
        app.add_option("--y", o->y, "Variables of Y, comma separated")->required();
        app.add_option("--gen", o->gens, "Generator of T over X (repeatable)")->expected(0, -1);
        app.add_flag("--flat", o->flat, "Also run the flat amalgamation probe");
        return [o, &ctx] {
          auto              fp = load_filterpair(o->fp);
          std::vector<Term> gens;
          for (auto const& g : o->gens) {
            gens.push_back(parse_term(g, fp.k.signature));
          }
          auto x = split_list(o->x), y = split_list(o->y);
          auto lift = theory_lifting_probe(fp, x, y, gens, ctx.config.window_depth);
          json r;
          r["generators"] = strings(gens);
          r["lifting"]    = lift.to_json();
          std::vector<Certificate> parts{lift};
          if (o->flat) {
            auto flat   = flat_amalgamation_probe(fp, x, y, gens, ctx.config.window_depth);
            r["flat"]   = flat.to_json();
            parts.push_back(flat);
          }
          auto v       = combine(parts);
          r["verdict"] = std::string(to_string(v));
          return RunResult{exit_of(v), r, "lifting: " + std::string(to_string(v))};
        };
      }
      if (sub == "regularity") {
        app.add_option("--k", o->k, "Quasivariety file");
        app.add_option("--fp", o->fp, "Filter pair file (uses its class)");
        return [o] {
          auto k   = class_of(o->k, o->fp);
          auto rep = presentation_regularity(k);
          auto r   = rep.to_json();
          r["class"] = k.name;
          return RunResult{rep.regular ? 0 : 1, r, std::string("regular: ") + (rep.regular ? "yes" : "no")};
        };
      }
      if (sub == "iterate") {
        app.add_option("--fp", o->fp, "Filter pair file")->required();
        app.add_option("--alg", o->alg, "Algebra file")->required();
        app.add_option("--theta", o->theta, "Start congruence, e.g. [[0,1],[2]] (default: least K-congruence)");
        return [o, &ctx] {
          auto fp = load_filterpair(o->fp);
          auto a  = ctx.algebra(o->alg);
          Context::check_signature(a, fp.k.signature);
          Congruence th0 = o->theta.empty() ? min_k_congruence(a, fp.k) : Congruence::parse(a, o->theta);
          auto       it  = omega_i_iterate(a, th0, fp);
          auto       r   = it.to_json(a);
          r["algebra"]   = a.name();
          return RunResult{it.stabilized_at ? 0 : 2, r,
                           it.stabilized_at ? "stabilized at step " + std::to_string(*it.stabilized_at)
                                            : std::string("did not stabilize")};
        };
      }
      return {};
    }

    RunResult error_result(std::string_view sub, std::string const& kind, std::string const& message, int code) {
      json r;
      r["schema"]  = 1;
      r["command"] = std::string(sub);
      r["error"]   = {{"kind", kind}, {"message", message}};
      return RunResult{code, r, kind + ": " + message};
    }
  }  // namespace

  RunResult run(std::string_view subcommand, std::vector<std::string> const& args, WorkbenchConfig config) {
    Context  ctx{config};
    CLI::App app{"fpw " + std::string(subcommand), "fpw " + std::string(subcommand)};
    add_config_options(app, ctx.config);
    Handler handler = build(subcommand, app, ctx);
    if (!handler) {
      return error_result(subcommand, "usage", "unknown subcommand '" + std::string(subcommand) + "'",
                          exit_input_error);
    }
    try {
      std::vector<std::string> rev(args.rbegin(), args.rend());
      app.parse(rev);
    } catch (CLI::ParseError const& e) {
      return error_result(subcommand, "usage", e.what(), exit_input_error);
    }
    auto start = std::chrono::steady_clock::now();
    RunResult res;
    try {
      ctx.config.validate();
      res = handler();
    } catch (InternalError const& e) {
      return error_result(subcommand, "internal", e.what(), exit_internal_error);
    } catch (BoundExceeded const& e) {
      return error_result(subcommand, "bound", e.what(), 2);
    } catch (Error const& e) {
      return error_result(subcommand, "input", e.what(), exit_input_error);
    }
    json report;
    report["schema"]    = 1;
    report["command"]   = std::string(subcommand);
    report["config"]    = ctx.config.to_json();
    report["result"]    = std::move(res.report);
    report["exit_code"] = res.exit_code;
    if (ctx.config.timing) {
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      report["timing"] = {{"elapsed_ms", ms}};
    }
    res.report = std::move(report);
    return res;
  }

  int cli_main(std::vector<std::string> const& argv, std::ostream& out, std::ostream& err) {
    auto usage = [&] {
      err << "usage: fpw <subcommand> [options]\n\nsubcommands:";
      for (auto const& s : subcommands()) {
        err << " " << s;
      }
      err << "\n\nRun 'fpw <subcommand> --help' for its options.\n";
    };
    if (argv.empty() || argv[0] == "--help" || argv[0] == "-h") {
      usage();
      return argv.empty() ? exit_input_error : 0;
    }
    std::vector<std::string> rest(argv.begin() + 1, argv.end());
    if (std::find(rest.begin(), rest.end(), "--help") != rest.end()
        || std::find(rest.begin(), rest.end(), "-h") != rest.end()) {
      Context  ctx;
      CLI::App app{"fpw " + argv[0], "fpw " + argv[0]};
      add_config_options(app, ctx.config);
      if (!build(argv[0], app, ctx)) {
        usage();
        return exit_input_error;
      }
      err << app.help();
      return 0;
    }
    auto res = run(argv[0], rest);
    out << res.report.dump(2) << "\n";
    err << res.summary << "\n";
    return res.exit_code;
  }

}  // namespace fpw
