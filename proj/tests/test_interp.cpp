#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "fpw/error.hpp"
#include "fpw/filterpair.hpp"
#include "fpw/interp.hpp"

using namespace fpw;
using namespace fpw::fixtures;

namespace {
  FilterPairInstance successor_pair() {
    FilterPairInstance fp;
    fp.name = "ls";
    fp.k    = unary_all();
    fp.tau.equations.push_back(parse_equation("x = s(x)", fp.k.signature));
    return register_exact_oracle(std::move(fp), "ls-successor-fixed-point");
  }

  FilterPairInstance semilattice_pair() {
    FilterPairInstance fp;
    fp.name = "semilattices";
    fp.k    = bounded_semilattices();
    fp.tau.equations.push_back(parse_equation("x = top", fp.k.signature));
    return fp;
  }

  Span make_span(UnarySpanData const& d) {
    return Span(Homomorphism(d.a, d.b, d.ib), Homomorphism(d.a, d.c, d.ic));
  }

  // Amalgam conditions straight from the definition.
  void check_amalgam(Span const& s, Amalgam const& m) {
    auto const& d = m.d();
    auto        hom = [&](FiniteAlgebra const& src, Homomorphism const& h) {
      auto const& sig = src.signature();
      for (std::size_t f = 0; f < sig.size(); ++f) {
        for_each_tuple(src.size(), sig[f].arity, [&](std::span<Elem const> t, std::size_t idx) {
          std::vector<Elem> img;
          for (Elem x : t) {
            img.push_back(h(x));
          }
          CHECK(d.apply(f, img) == h(src.table(f)[idx]));
        });
      }
      std::set<Elem> image;
      for (Elem x = 0; x < src.size(); ++x) {
        image.insert(h(x));
      }
      CHECK(image.size() == src.size());
    };
    hom(s.b(), m.eb);
    hom(s.c(), m.ec);
    for (Elem a = 0; a < s.a().size(); ++a) {
      CHECK(m.eb(s.ib()(a)) == m.ec(s.ic()(a)));
    }
  }

  std::vector<Term> terms(std::initializer_list<char const*> ts, Signature const& sig) {
    std::vector<Term> out;
    for (auto const* t : ts) {
      out.push_back(parse_term(t, sig));
    }
    return out;
  }

  Term tower(std::string const& v, std::size_t n) {
    Term t = Term::variable(v);
    for (std::size_t i = 0; i < n; ++i) {
      t = Term::apply("s", {t});
    }
    return t;
  }
}  // namespace

TEST_CASE("pushout of unary spans") {
  SUBCASE("fixed point glued into two copies of cyc3z") {
    auto a = unary("A", {0}, {"z"});
    auto b = cyc3z();
    Span s(Homomorphism(a, b, {3}), Homomorphism(a, b, {3}));
    auto m = pushout_unary(s);
    CHECK(m.d().size() == 7);
    check_amalgam(s, m);
    CHECK(!amalgam_failure(s, m));
    // The two 3-cycles stay disjoint.
    std::set<Elem> cycles;
    for (Elem x = 0; x < 3; ++x) {
      cycles.insert(m.eb(x));
      cycles.insert(m.ec(x));
    }
    CHECK(cycles.size() == 6);
  }
  SUBCASE("identity legs") {
    auto b = cyc3z();
    Span s(identity_homomorphism(b), identity_homomorphism(b));
    auto m = pushout_unary(s);
    CHECK(isomorphic(m.d(), b));
  }
  SUBCASE("random spans") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      auto data = random_unary_span(rng);
      auto s    = make_span(data);
      auto m    = pushout_unary(s);
      CHECK(m.d().size() == data.b.size() + data.c.size() - data.a.size());
      check_amalgam(s, m);
      // Jointly surjective, meeting exactly in the image of A.
      std::set<Elem> from_b, from_c;
      for (Elem x = 0; x < data.b.size(); ++x) {
        from_b.insert(m.eb(x));
      }
      for (Elem x = 0; x < data.c.size(); ++x) {
        from_c.insert(m.ec(x));
      }
      std::set<Elem> both;
      std::set_intersection(from_b.begin(), from_b.end(), from_c.begin(), from_c.end(),
                            std::inserter(both, both.end()));
      CHECK(both.size() == data.a.size());
      from_b.insert(from_c.begin(), from_c.end());
      CHECK(from_b.size() == m.d().size());
    }
  }
  SUBCASE("binary symbols are rejected") {
    auto z2 = cyclic_group(2);
    Span s(identity_homomorphism(z2), identity_homomorphism(z2));
    CHECK_THROWS_AS(pushout_unary(s), InvariantError);
  }
  SUBCASE("legs must be injective") {
    auto a = unary("A", {1, 0});
    auto b = unary("B", {0});
    CHECK_THROWS_AS(Span(Homomorphism(a, b, {0, 0}), identity_homomorphism(a)), InvariantError);
  }
}

TEST_CASE("amalgam search") {
  SUBCASE("trivial amalgam") {
    auto z4 = cyclic_group(4);
    Span s(identity_homomorphism(z4), identity_homomorphism(z4));
    auto r = amalgamate_search(s, groups(), 4);
    REQUIRE(std::holds_alternative<Amalgam>(r));
    CHECK(std::get<Amalgam>(r).d().size() == 4);
  }
  SUBCASE("groups: Z2 inside Z4 twice") {
    auto z2 = cyclic_group(2), z4 = cyclic_group(4);
    Span s(Homomorphism(z2, z4, {0, 2}), Homomorphism(z2, z4, {0, 2}));
    auto r = amalgamate_search(s, groups(), 4);
    REQUIRE(std::holds_alternative<Amalgam>(r));
    check_amalgam(s, std::get<Amalgam>(r));
  }
  SUBCASE("random unary spans within the pushout size") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      auto data  = random_unary_span(rng);
      auto s     = make_span(data);
      auto bound = data.b.size() + data.c.size() - data.a.size();
      auto r     = amalgamate_search(s, unary_all(), bound);
      REQUIRE(std::holds_alternative<Amalgam>(r));
      auto const& m = std::get<Amalgam>(r);
      CHECK(m.d().size() <= bound);
      check_amalgam(s, m);
    }
  }
  SUBCASE("a class without amalgams") {
    // An f-fixed point and a g-fixed point must coincide, which the legs
    // cannot allow here.
    Signature        sig({{"f", 1}, {"g", 1}});
    QuasivarietySpec k = all_algebras(sig, "one-fixed");
    k.quasi_identities.push_back(parse_quasi_identity("f(x) = x & g(y) = y -> x = y", sig));
    auto mk = [&](std::string name, std::vector<Elem> f, std::vector<Elem> g) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < f.size(); ++i) {
        names.push_back(std::to_string(i));
      }
      std::vector<std::vector<Elem>> t(2);
      t[sig.index("f")] = std::move(f);
      t[sig.index("g")] = std::move(g);
      return FiniteAlgebra(std::move(name), sig, names, t);
    };
    auto a = mk("A", {1, 0}, {1, 0});
    auto b = mk("B", {1, 0, 2}, {1, 0, 0});
    auto c = mk("C", {1, 0, 0}, {1, 0, 2});
    REQUIRE(member_of_K(b, k));
    REQUIRE(member_of_K(c, k));
    Span s(Homomorphism(a, b, {0, 1}), Homomorphism(a, c, {0, 1}));
    auto r = amalgamate_search(s, k, 6);
    REQUIRE(std::holds_alternative<AmalgamExhausted>(r));
    CHECK(std::get<AmalgamExhausted>(r).size_bound == 6);
    // The plain pushout exists but leaves the class.
    auto m = pushout_unary(s);
    CHECK(amalgam_failure(s, m, &k) == "D is not in one-fixed");
  }
  SUBCASE("members of K are required") {
    auto u = unary("U", {1, 0});
    Span s(identity_homomorphism(u), identity_homomorphism(u));
    QuasivarietySpec fixed = all_algebras(unary_s(), "fixed");
    fixed.identities.push_back(parse_equation("s(x) = x", fixed.signature));
    CHECK_THROWS_AS(amalgamate_search(s, fixed, 4), InvariantError);
  }
}

TEST_CASE("theory lifting") {
  auto        ls  = successor_pair();
  auto const& sig = ls.k.signature;
  CHECK(theory_lifting_probe(ls, {"x", "u"}, {"x", "u"}, terms({"x"}, sig), 4).verdict == Verdict::Holds);
  auto c = theory_lifting_probe(ls, {"x", "u"}, {"x", "v"}, terms({"x"}, sig), 8);
  CHECK(c.verdict == Verdict::Holds);
  CHECK(theory_lifting_probe(ls, {"x", "u"}, {"x", "v"}, terms({"s(u)", "s(s(x))"}, sig), 6).verdict
        == Verdict::Holds);

  // The non-regular detour: u = s(u) forces g(z) = z over {z, u} only.
  FilterPairInstance detour;
  detour.name = "detour";
  detour.k    = all_algebras(Signature({{"s", 1}, {"g", 1}}), "detour");
  detour.k.quasi_identities.push_back(parse_quasi_identity("s(y) = y -> g(x) = x", detour.k.signature));
  detour.tau.equations.push_back(parse_equation("x = s(x)", detour.k.signature));
  auto r = theory_lifting_probe(detour, {"z", "u"}, {"z", "v"}, terms({"u"}, detour.k.signature), 2);
  REQUIRE(r.verdict == Verdict::RefutedBy);
  CHECK(r.witness["pair"] == json::array({"z", "g(z)"}));

  CHECK_THROWS_AS(theory_lifting_probe(ls, {"x"}, {"y"}, terms({"x"}, sig), 4), InvariantError);
  CHECK_THROWS_AS(theory_lifting_probe(ls, {"x"}, {"x", "y"}, terms({"y"}, sig), 4), InvariantError);
}

TEST_CASE("flat amalgamation") {
  auto        ls  = successor_pair();
  auto const& sig = ls.k.signature;
  auto        c   = flat_amalgamation_probe(ls, {"x", "u"}, {"x", "v"}, terms({"x"}, sig), 8);
  CHECK(c.verdict == Verdict::Holds);
  REQUIRE(!c.notes.empty());
  CHECK(c.notes[0].find("pushout") != std::string::npos);

  // The top theory: every variable is a fixed point.
  auto top = flat_amalgamation_probe(ls, {"x", "u"}, {"x", "v"}, terms({"x", "u"}, sig), 5);
  CHECK(top.verdict == Verdict::Holds);

  CHECK(flat_amalgamation_probe(ls, {"x", "u"}, {"x", "v"}, terms({"s(s(u))"}, sig), 6).verdict == Verdict::Holds);

  // Semilattices: the window amalgam needs four elements.
  auto sl   = semilattice_pair();
  auto gens = terms({"u"}, sl.k.signature);
  auto ok   = flat_amalgamation_probe(sl, {"x", "u"}, {"x", "v"}, gens, 2);
  CHECK(ok.verdict == Verdict::UndeterminedUpTo);
  CHECK(ok.notes[0].find("|D| = 4") != std::string::npos);
  auto failed = flat_amalgamation_probe(sl, {"x", "u"}, {"x", "v"}, gens, 2, {3, 1'000'000});
  CHECK(failed.verdict == Verdict::UndeterminedUpTo);
  CHECK(failed.notes[0].find("amalgam not found") != std::string::npos);
}

TEST_CASE("craig interpolation") {
  auto        ls  = successor_pair();
  auto const& sig = ls.k.signature;

  SUBCASE("phi in gamma") {
    auto r = craig_interpolate(ls, terms({"x", "s(y)"}, sig), parse_term("s(y)", sig));
    CHECK(r.status == InterpolationStatus::Interpolated);
    REQUIRE(r.interpolant.size() == 1);
    CHECK(r.interpolant[0].to_string() == "s(y)");
  }
  SUBCASE("irrelevant premise") {
    auto r = craig_interpolate(ls, terms({"x", "y"}, sig), parse_term("s(y)", sig));
    CHECK(r.status == InterpolationStatus::Interpolated);
    CHECK(r.certificate.verdict == Verdict::Holds);
    CHECK(r.shared_variables == std::vector<std::string>{"y"});
    for (auto const& t : r.interpolant) {
      CHECK(t.variables() == std::set<std::string>{"y"});
    }
    CraigConfig small;
    small.minimize = true;
    auto m         = craig_interpolate(ls, terms({"x", "y"}, sig), parse_term("s(y)", sig), small);
    REQUIRE(m.interpolant.size() == 1);
    CHECK(m.interpolant[0].to_string() == "y");
  }
  SUBCASE("deeper goal") {
    auto r = craig_interpolate(ls, terms({"x"}, sig), parse_term("s(s(x))", sig));
    CHECK(r.status == InterpolationStatus::Interpolated);
    CHECK(r.shared_variables == std::vector<std::string>{"x"});
  }
  SUBCASE("not entailed") {
    auto r = craig_interpolate(ls, terms({"s(x)"}, sig), parse_term("x", sig));
    CHECK(r.status == InterpolationStatus::NotEntailed);
    CHECK(r.certificate.is_refuted());
  }
  SUBCASE("random valid entailments against the oracle") {
    std::mt19937_64                 rng(3);
    std::vector<std::string> const  vars{"x", "y", "z"};
    int                             done = 0;
    while (done < 40) {
      std::vector<Term> gamma;
      std::size_t       ng = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      for (std::size_t i = 0; i < ng; ++i) {
        gamma.push_back(tower(vars[rng() % 3], rng() % 4));
      }
      Term phi = tower(vars[rng() % 3], rng() % 6);
      if (!SuccessorOracle(gamma).in_theory(phi)) {
        continue;
      }
      ++done;
      auto r = craig_interpolate(ls, gamma, phi);
      REQUIRE(r.status == InterpolationStatus::Interpolated);
      SuccessorOracle from_gamma(gamma), from_interp(r.interpolant);
      std::set<std::string> vg, shared(r.shared_variables.begin(), r.shared_variables.end());
      for (auto const& g : gamma) {
        g.collect_variables(vg);
      }
      for (auto const& v : shared) {
        CHECK(vg.count(v));
        CHECK(phi.variables().count(v));
      }
      for (auto const& t : r.interpolant) {
        for (auto const& v : t.variables()) {
          CHECK(shared.count(v));
        }
        CHECK(from_gamma.in_theory(t));
      }
      CHECK(from_interp.in_theory(phi));
    }
  }
}

TEST_CASE("injective renaming preserves entailment verdicts") {
  auto            ls  = successor_pair();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Term> gamma, renamed;
    std::size_t       ng = 1 + rng() % 2;
    for (std::size_t i = 0; i < ng; ++i) {
      auto v = std::string(1, "xy"[rng() % 2]);
      auto n = rng() % 4;
      gamma.push_back(tower(v, n));
      renamed.push_back(tower(v == "x" ? "a" : "b", n));
    }
    auto v   = std::string(1, "xy"[rng() % 2]);
    auto n   = rng() % 5;
    auto lhs = entails(ls, gamma, tower(v, n));
    auto rhs = entails(ls, renamed, tower(v == "x" ? "a" : "b", n));
    CHECK(lhs.certificate.verdict == rhs.certificate.verdict);
  }
}
