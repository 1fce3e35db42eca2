#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "fpw/eqlogic.hpp"
#include "fpw/error.hpp"
#include "fpw/filterpair.hpp"

using namespace fpw;
using namespace fpw::fixtures;

namespace {
  Equation eq(std::string_view s, Signature const& sig) {
    return parse_equation(s, sig);
  }

  // s^n(v) as (v, n), computed without the library's oracle.
  std::pair<std::string, std::size_t> iterate_of(Term const& t) {
    std::size_t n = 0;
    Term        c = t;
    while (!c.is_variable()) {
      c = c.args()[0];
      ++n;
    }
    return {c.name(), n};
  }

  QuasivarietySpec lattices() {
    QuasivarietySpec k;
    k.name      = "lattices";
    k.signature = Signature({{"meet", 2}, {"join", 2}});
    for (auto const* ax : {"meet(x,y) = meet(y,x)", "join(x,y) = join(y,x)", "meet(x,join(y,x)) = x",
                           "join(x,meet(y,x)) = x"}) {
      k.identities.push_back(eq(ax, k.signature));
    }
    return k;
  }

  QuasivarietySpec injective_unary() {
    auto k = unary_all();
    k.name = "injective";
    k.quasi_identities.push_back(parse_quasi_identity("s(x) = s(y) -> x = y", k.signature));
    return k;
  }

  bool has_rule(Derivation const& d, Rule r) {
    return std::any_of(d.steps.begin(), d.steps.end(), [&](DerivationStep const& s) { return s.rule == r; });
  }
}  // namespace

TEST_CASE("window closure with no hypotheses is the identity") {
  auto       k = unary_all();
  TermWindow w(k.signature, {"x", "y"}, 3);
  auto       rel = cn_window(k, {}, w);
  CHECK(rel.num_classes() == w.size());
}

TEST_CASE("successor closure on a window matches the fixed-point description") {
  auto                  k = unary_all();
  TermWindow            w(k.signature, {"x", "y"}, 4);
  std::vector<Equation> gamma{eq("x = s(x)", k.signature)};
  auto                  rel = cn_window(k, gamma, w);
  for (TermId a = 0; a < w.size(); ++a) {
    for (TermId b = 0; b < w.size(); ++b) {
      auto [va, na] = iterate_of(w.term(a));
      auto [vb, nb] = iterate_of(w.term(b));
      bool expected = a == b || (va == "x" && vb == "x");
      CHECK(rel.related(a, b) == expected);
    }
  }
}

TEST_CASE("window closure is monotone in the hypotheses") {
  auto                  k = bounded_semilattices();
  TermWindow            w(k.signature, {"x", "y"}, 2);
  std::vector<Equation> small{eq("meet(x,y) = x", k.signature)};
  std::vector<Equation> big{eq("meet(x,y) = x", k.signature), eq("y = top", k.signature)};
  auto                  r1 = cn_window(k, small, w);
  auto                  r2 = cn_window(k, big, w);
  for (TermId a = 0; a < w.size(); ++a) {
    CHECK(r2.related(a, r1.class_of(a)));
  }
  CHECK(r2.num_classes() < r1.num_classes());
  std::vector<Equation> outside{eq("x = meet(x,meet(x,meet(x,x)))", k.signature)};
  CHECK_THROWS_AS(cn_window(k, outside, w), BoundExceeded);
}

TEST_CASE("free bounded semilattice on two generators at window depth 2") {
  // The free bounded semilattice over {x,y} is the four-element powerset
  // lattice with x = {1}, y = {0}: two terms are equal in every bounded
  // semilattice iff they evaluate equally there.
  auto       k = bounded_semilattices();
  auto       p = powerset_semilattice(2);
  TermWindow w(k.signature, {"x", "y"}, 2);
  auto       rel = cn_window(k, {}, w);
  Assignment v{{"x", 2}, {"y", 1}};
  std::vector<Elem> value(w.size());
  for (TermId t = 0; t < w.size(); ++t) {
    value[t] = evaluate(w.term(t), p, v);
  }
  for (TermId a = 0; a < w.size(); ++a) {
    for (TermId b = 0; b < w.size(); ++b) {
      CHECK(rel.related(a, b) == (value[a] == value[b]));
    }
  }
  CHECK(rel.num_classes() == 4);
}

TEST_CASE("derivations") {
  auto sl  = bounded_semilattices();
  auto one = derive(sl, {}, eq("meet(x,meet(x,x)) = x", sl.signature));
  REQUIRE(std::holds_alternative<Derivation>(one));
  auto const& d = std::get<Derivation>(one);
  CHECK(replays(d, sl));
  CHECK(has_rule(d, Rule::AxiomInstance));
  CHECK(has_rule(d, Rule::CongruenceRule));
  CHECK(has_rule(d, Rule::Transitivity));
  CHECK(d.goal == eq("meet(x,meet(x,x)) = x", sl.signature));
  CHECK(d.to_text().find("AxiomInstance") != std::string::npos);
  CHECK(d.to_json()["steps"].size() == d.steps.size());

  auto                  k = unary_all();
  std::vector<Equation> h{eq("x = s(x)", k.signature)};
  auto                  two = derive(k, h, eq("s(x) = s(s(x))", k.signature));
  REQUIRE(std::holds_alternative<Derivation>(two));
  auto const& d2 = std::get<Derivation>(two);
  CHECK(replays(d2, k));
  CHECK(d2.steps.back().rule == Rule::CongruenceRule);
  CHECK(d2.steps.back().symbol == "s");

  auto same = derive(k, h, h.front());
  REQUIRE(std::holds_alternative<Derivation>(same));
  CHECK(std::get<Derivation>(same).steps.size() == 1);

  auto none = derive(k, {}, eq("x = s(x)", k.signature));
  CHECK(std::holds_alternative<Exhausted>(none));

  DerivationBudget tight;
  tight.max_steps = 2;
  CHECK(std::holds_alternative<Exhausted>(derive(sl, {}, eq("meet(x,meet(x,x)) = x", sl.signature), tight)));

  auto inj = injective_unary();
  std::vector<Equation> hs{eq("s(x) = s(y)", inj.signature)};
  auto three = derive(inj, hs, eq("x = y", inj.signature));
  REQUIRE(std::holds_alternative<Derivation>(three));
  CHECK(std::get<Derivation>(three).uses_quasi_detachment());
  CHECK(replays(std::get<Derivation>(three), inj));
}

TEST_CASE("replay rejects tampered derivations") {
  auto sl = bounded_semilattices();
  auto d  = std::get<Derivation>(derive(sl, {}, eq("meet(x,meet(x,x)) = x", sl.signature)));
  REQUIRE(replays(d, sl));
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    auto bad = d;
    std::swap(bad.steps[i].equation.lhs, bad.steps[i].equation.rhs);
    if (bad.steps[i].equation != d.steps[i].equation) {
      CHECK_FALSE(replays(bad, sl));
    }
    if (!d.steps[i].refs.empty()) {
      auto later = d;
      later.steps[i].refs[0] = i;
      CHECK_FALSE(replays(later, sl));
    }
    if (d.steps[i].rule == Rule::AxiomInstance) {
      auto wrong = d;
      wrong.steps[i].index = (wrong.steps[i].index + 1) % sl.identities.size();
      CHECK_FALSE(replays(wrong, sl));
    }
  }
  auto wrong_goal = d;
  wrong_goal.goal = eq("x = top", sl.signature);
  CHECK_FALSE(replays(wrong_goal, sl));
  CHECK_THROWS_AS(replay(wrong_goal, sl), InvariantError);
}

TEST_CASE("every related window pair has a replayable explanation") {
  auto                  k = bounded_semilattices();
  TermWindow            w(k.signature, {"x", "y"}, 2);
  std::vector<Equation> h{eq("meet(x,y) = x", k.signature)};
  WindowSaturator       s(k, w);
  s.add_hypotheses(h);
  s.saturate();
  std::mt19937 rng(3);
  std::size_t  checked = 0;
  for (TermId a = 0; a < w.size(); ++a) {
    for (TermId b = 0; b < w.size(); ++b) {
      if (!s.equal(a, b) || rng() % 8 != 0) {
        continue;
      }
      auto d = s.explain(a, b);
      CHECK(replays(d, k));
      ++checked;
    }
  }
  CHECK(checked > 0);
  for (TermId b = 1; b < w.size(); ++b) {
    if (!s.equal(0, b)) {
      CHECK_THROWS_AS(s.explain(0, b), InvariantError);
      break;
    }
  }
}

TEST_CASE("window closure commutes with substitution") {
  // (σ x σ) of the closure of Γ lies in the closure of σΓ wherever both
  // sides fit in the window.
  auto                  k = bounded_semilattices();
  TermWindow            w(k.signature, {"x", "y"}, 2);
  std::vector<Equation> gamma{eq("meet(x,y) = y", k.signature)};
  Substitution          sigma{{"x", parse_term("meet(x,y)", k.signature)}, {"y", parse_term("x", k.signature)}};
  std::vector<Equation> sgamma;
  for (auto const& e : gamma) {
    sgamma.push_back({substitute(e.lhs, sigma), substitute(e.rhs, sigma)});
  }
  auto r  = cn_window(k, gamma, w);
  auto rs = cn_window(k, sgamma, w);
  for (TermId a = 0; a < w.size(); ++a) {
    auto sa = w.find(substitute(w.term(a), sigma));
    auto sb = w.find(substitute(w.term(r.class_of(a)), sigma));
    if (sa && sb) {
      CHECK(rs.related(*sa, *sb));
    }
  }
}

TEST_CASE("extra variables do not change the window closure") {
  for (auto const& k : {bounded_semilattices(), unary_all()}) {
    std::vector<Equation> gamma;
    if (k.name == "unary") {
      gamma.push_back(eq("s(s(x)) = x", k.signature));
    } else {
      gamma.push_back(eq("meet(x,top) = top", k.signature));
    }
    TermWindow wz(k.signature, {"x"}, 2);
    TermWindow wx(k.signature, {"x", "y"}, 2);
    auto       rz = cn_window(k, gamma, wz);
    auto       rx = cn_window(k, gamma, wx);
    for (TermId a = 0; a < wz.size(); ++a) {
      for (TermId b = 0; b < wz.size(); ++b) {
        CHECK(rz.related(a, b) == rx.related(*wx.find(wz.term(a)), *wx.find(wz.term(b))));
      }
    }
  }
}

TEST_CASE("regularity") {
  auto sl = bounded_semilattices();
  CHECK(is_regular_equation(eq("meet(x,y) = meet(y,x)", sl.signature)));
  CHECK(is_regular_equation(eq("x = x", sl.signature)));
  auto lat = lattices();
  CHECK_FALSE(is_regular_equation(eq("meet(x,join(y,x)) = x", lat.signature)));
  CHECK(presentation_regularity(sl).regular);
  auto lr = presentation_regularity(lat);
  CHECK_FALSE(lr.regular);
  CHECK(lr.axioms.size() == 4);
  CHECK(lr.axioms[0].regular);
  CHECK_FALSE(lr.axioms[2].regular);
  CHECK_FALSE(presentation_regularity(injective_unary()).regular);
  CHECK(lr.to_json()["regular"] == false);

  auto d = std::get<Derivation>(derive(sl, {}, eq("meet(x,meet(x,x)) = x", sl.signature)));
  CHECK(derivation_regularity_check(d, sl).verdict == Verdict::Holds);
  auto hyp = std::get<Derivation>(derive(sl, std::vector{eq("meet(x,y) = meet(y,x)", sl.signature)},
                                         eq("meet(x,y) = meet(y,x)", sl.signature)));
  CHECK(derivation_regularity_check(hyp, sl).verdict == Verdict::Holds);

  auto ld = derive(lat, {}, eq("x = meet(x,join(y,x))", lat.signature));
  REQUIRE(std::holds_alternative<Derivation>(ld));
  auto c = derivation_regularity_check(std::get<Derivation>(ld), lat);
  CHECK(c.verdict == Verdict::RefutedBy);
  CHECK(c.witness.contains("step"));
}

TEST_CASE("regular presentations give regular derivations") {
  auto         sl = bounded_semilattices();
  std::mt19937 rng(9);
  TermWindow   w(sl.signature, {"x", "y"}, 2);
  std::vector<Equation> h{eq("meet(x,y) = meet(y,x)", sl.signature)};
  WindowSaturator s(sl, w);
  s.add_hypotheses(h);
  s.saturate();
  for (int trial = 0; trial < 200; ++trial) {
    TermId a = rng() % w.size(), b = rng() % w.size();
    if (s.equal(a, b)) {
      CHECK(derivation_regularity_check(s.explain(a, b), sl).verdict == Verdict::Holds);
    }
  }
}

TEST_CASE("conservativity probe") {
  FilterPairInstance ls;
  ls.name = "ls";
  ls.k    = unary_all();
  ls.tau.equations.push_back(eq("x = s(x)", ls.k.signature));
  auto sig = ls.k.signature;
  std::vector<Term> gens{parse_term("s(z)", sig), parse_term("u", sig)};

  auto same = conservativity_probe(ls, {"z", "u"}, {"z", "u"}, gens, 4);
  CHECK(same.verdict == Verdict::Holds);

  auto exact = register_exact_oracle(ls, "ls-successor-fixed-point");
  auto c     = conservativity_probe(exact, {"z", "u"}, {"z"}, gens, 8);
  CHECK(c.verdict == Verdict::Holds);
  auto plain = conservativity_probe(ls, {"z", "u"}, {"z"}, gens, 6);
  CHECK(plain.verdict == Verdict::UndeterminedUpTo);

  // Non-regular detour: u = s(u) fires s(y) = y -> g(x) = x with x := z.
  FilterPairInstance detour;
  detour.name = "detour";
  detour.k    = all_algebras(Signature({{"s", 1}, {"g", 1}}), "detour");
  detour.k.quasi_identities.push_back(parse_quasi_identity("s(y) = y -> g(x) = x", detour.k.signature));
  detour.tau.equations.push_back(eq("x = s(x)", detour.k.signature));
  std::vector<Term> ug{parse_term("u", detour.k.signature)};
  auto r = conservativity_probe(detour, {"z", "u"}, {"z"}, ug, 2);
  REQUIRE(r.verdict == Verdict::RefutedBy);
  CHECK(r.witness["pair"][0] == "z");
  CHECK(r.witness["pair"][1] == "g(z)");
  CHECK(r.witness["related_in"] == "X-closure");

  CHECK_THROWS_AS(conservativity_probe(ls, {"z"}, {"z", "u"}, gens, 4), InvariantError);
  CHECK_THROWS_AS(conservativity_probe(ls, {"z", "u"}, {"z"}, std::vector{parse_term("s(s(s(z)))", sig)}, 3),
                  BoundExceeded);
}

TEST_CASE("window theory") {
  FilterPairInstance ls;
  ls.k = unary_all();
  ls.tau.equations.push_back(eq("x = s(x)", ls.k.signature));
  TermWindow        w(ls.k.signature, {"x", "y"}, 5);
  std::vector<Term> gens{parse_term("s(s(x))", ls.k.signature)};
  auto              th = window_theory(ls, w, gens);
  // Members are s^n(x) with 2 <= n <= 4 (s^5(x) has no room for its successor).
  CHECK(th.members.size() == 3);
  for (TermId m : th.members) {
    auto [v, n] = iterate_of(w.term(m));
    CHECK(v == "x");
    CHECK(n >= 2);
  }
}
