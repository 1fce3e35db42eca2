#include <doctest.h>

#include "fixtures.hpp"
#include "fpw/congruence.hpp"
#include "fpw/error.hpp"
#include "fpw/hierarchy.hpp"
#include "fpw/leibniz.hpp"
#include "oracles.hpp"

using namespace fpw;
using namespace fpw::fixtures;

namespace {
  FilterPairInstance successor_pair() {
    FilterPairInstance fp;
    fp.name = "ls";
    fp.k    = unary_all();
    fp.tau.equations.push_back(parse_equation("x = s(x)", fp.k.signature));
    return fp;
  }

  FilterPairInstance group_pair() {
    FilterPairInstance fp;
    fp.name = "groups";
    fp.k    = groups();
    fp.tau.equations.push_back(parse_equation("x = e", fp.k.signature));
    return fp;
  }

  Signature pointed_unary_sig() {
    return Signature({{"e", 0}, {"s", 1}});
  }

  // All algebras of {e, s} with τ = {x = e}: pointed assertional.
  FilterPairInstance pointed_unary_pair() {
    FilterPairInstance fp;
    fp.name  = "pointed";
    fp.k     = all_algebras(pointed_unary_sig(), "pointed unary");
    fp.k.point = "e";
    fp.tau.equations.push_back(parse_equation("x = e", fp.k.signature));
    return fp;
  }

  FiniteAlgebra pointed_unary(std::string name, Elem e, std::vector<Elem> succ) {
    auto                           sig = pointed_unary_sig();
    std::vector<std::string>       names;
    for (std::size_t i = 0; i < succ.size(); ++i) {
      names.push_back(std::to_string(i));
    }
    std::vector<std::vector<Elem>> t(sig.size());
    t[sig.index("e")] = {e};
    t[sig.index("s")] = std::move(succ);
    return FiniteAlgebra(std::move(name), sig, names, t);
  }

  oracle::Relation relation(Congruence const& c) {
    oracle::Relation r;
    for (Elem a = 0; a < c.universe(); ++a) {
      for (Elem b = 0; b < c.universe(); ++b) {
        if (c.related(a, b)) {
          r.emplace(a, b);
        }
      }
    }
    return r;
  }

  bool subset(oracle::Relation const& a, oracle::Relation const& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  }

  // Brute-force sandwich for a variety: i from the definition, Ξ as the least
  // congruence containing the τ-instances, Ω as the greatest compatible one.
  void check_sandwich_by_brute_force(FilterPairInstance const& fp, FiniteAlgebra const& a) {
    auto const& eq = fp.tau.equations.at(0);
    for (auto const& labels : oracle::congruences(a)) {
      std::vector<bool>                  f(a.size());
      std::vector<std::pair<Elem, Elem>> gens;
      for (Elem m = 0; m < a.size(); ++m) {
        Elem l = evaluate(eq.lhs, a, {{"x", m}});
        Elem r = evaluate(eq.rhs, a, {{"x", m}});
        f[m]   = labels[l] == labels[r];
        if (f[m]) {
          gens.emplace_back(l, r);
        }
      }
      auto lower = oracle::least_containing(a, gens);
      auto upper = oracle::greatest_compatible(a, f);
      auto theta = oracle::relation_of(labels);
      CHECK(subset(lower, theta));
      CHECK(subset(theta, upper));

      auto th = Congruence::from_partition(a, labels);
      CHECK(relation(xi(a, i_tau(a, th, fp), fp)) == lower);
      CHECK(relation(leibniz_omega(a, i_tau(a, th, fp))) == upper);
    }
  }
}  // namespace

TEST_CASE("sandwich battery against brute force") {
  auto ls = successor_pair();
  for (std::size_t n = 1; n <= 3; ++n) {
    for (auto const& a : all_unary(n)) {
      check_sandwich_by_brute_force(ls, a);
    }
  }
  auto g = group_pair();
  for (auto const& a : {cyclic_group(2), cyclic_group(4), s3()}) {
    check_sandwich_by_brute_force(g, a);
  }

  std::vector<FiniteAlgebra> corpus{cyc3z()};
  auto                       rep = sandwich_battery(ls, corpus);
  CHECK(rep.algebras == 1);
  CHECK(rep.rows.size() == all_congruences(cyc3z()).size());
  CHECK(!rep.equal_everywhere());
  auto j = rep.to_json(corpus);
  CHECK(j["inclusions"] == "hold");
}

TEST_CASE("cyc3z worked example") {
  auto a  = cyc3z();
  auto fp = successor_pair();
  auto d  = diagonal(a);
  CHECK(i_tau(a, d, fp) == ElemSet(4, {3}));
  CHECK(leibniz_omega(a, ElemSet(4, {3})).to_string() == "[[0,1,2],[3]]");
  CHECK(xi(a, ElemSet(4, {3}), fp).is_diagonal());
  CHECK(i_tau(a, leibniz_omega(a, i_tau(a, d, fp)), fp).is_full());

  std::vector<FiniteAlgebra> corpus{a};
  auto                       rep = sandwich_battery(fp, corpus);
  for (auto const& row : rep.rows) {
    if (row.theta.is_diagonal()) {
      CHECK(row.lower.is_diagonal());
      CHECK(row.upper.to_string() == "[[0,1,2],[3]]");
      CHECK(row.lower_equal);
      CHECK(!row.upper_equal);
    }
  }

  auto te = truth_equational_refute(fp, corpus);
  REQUIRE(te.is_refuted());
  CHECK(te.witness["filter"] == json::array({"z"}));
  CHECK(te.witness["algebra"] == "cyc3z");
  CHECK(te.witness["tau_solutions"] == json::array({"0", "1", "2", "z"}));
}

TEST_CASE("omega-i iteration") {
  auto a  = cyc3z();
  auto fp = successor_pair();
  auto r  = omega_i_iterate(a, diagonal(a), fp);
  REQUIRE(r.stabilized_at);
  CHECK(*r.stabilized_at == 2);
  REQUIRE(r.sequence.size() == 3);
  CHECK(r.sequence[1].to_string() == "[[0,1,2],[3]]");
  CHECK(r.sequence[2].is_full());
  CHECK(r.quotient_sizes == std::vector<std::size_t>{4, 2, 1});
  CHECK(r.to_json(a)["stabilized_at"] == 2);

  auto top = omega_i_iterate(a, full(a), fp);
  CHECK(top.stabilized_at == std::size_t{0});

  // Groups: i is injective and Ω∘i is the identity on congruences.
  auto g  = group_pair();
  auto z4 = cyclic_group(4);
  for (auto const& th : all_congruences(z4)) {
    auto it = omega_i_iterate(z4, th, g);
    CHECK(it.stabilized_at == std::size_t{0});
  }

  // An iterate never shrinks: θ ⊆ Ω(i(θ)).
  for (auto const& u : all_unary(3)) {
    for (auto const& th : all_congruences(u)) {
      auto it = omega_i_iterate(u, th, fp);
      REQUIRE(it.stabilized_at);
      for (std::size_t k = 1; k < it.sequence.size(); ++k) {
        CHECK(it.sequence[k - 1].is_subset_of(it.sequence[k]));
      }
    }
  }

  CHECK_THROWS_AS(omega_i_iterate(z4, Congruence::parse(z4, "[[0,1]]"), g), InvariantError);
}

TEST_CASE("groups are consistent everywhere") {
  auto                       fp = group_pair();
  std::vector<FiniteAlgebra> corpus{cyclic_group(2), cyclic_group(4), s3()};
  auto                       rep = hierarchy_report(fp, corpus);
  CHECK(rep.sandwich.equal_everywhere());
  CHECK(rep.algebraizable.verdict == Verdict::ConsistentUpTo);
  CHECK(rep.truth_equational.verdict == Verdict::ConsistentUpTo);
  CHECK(rep.protoalgebraic.verdict == Verdict::ConsistentUpTo);
  REQUIRE(rep.assertional);
  CHECK(rep.assertional->passed());
  REQUIRE(rep.rwa);
  CHECK(!rep.rwa->is_refuted());
  CHECK(rep.exit_code() == 0);
  CHECK(rep.notes.size() == 2);

  for (auto const& a : corpus) {
    auto t = i_filters(a, fp);
    CHECK(t.i_injective());
    for (auto const& f : t.filters) {
      CHECK(xi(a, f, fp) == leibniz_omega(a, f));
    }
  }
}

TEST_CASE("assertional checks on Z4") {
  auto                       fp = group_pair();
  auto                       z4 = cyclic_group(4);
  std::vector<FiniteAlgebra> corpus{z4};
  auto                       rep = assertional_checks(fp, corpus);
  CHECK(rep.passed());

  ElemSet f(4, {0, 2});
  CHECK(i_tau(z4, leibniz_omega(z4, f), fp) == f);
  auto red = reduce_matrix({z4, ElemSet(4, {0})});
  CHECK(red.algebra.size() == 4);
  CHECK(red.designated == ElemSet(4, {0}));
  auto red2 = reduce_matrix({z4, f});
  CHECK(red2.algebra.size() == 2);
  CHECK(red2.designated.count() == 1);

  CHECK_THROWS_AS(assertional_checks(successor_pair(), corpus), InvariantError);
  CHECK_THROWS_AS(rwa_probe(successor_pair(), corpus), InvariantError);
}

TEST_CASE("refutation fixtures") {
  auto ls = successor_pair();

  SUBCASE("algebraizability: two filters with one Omega") {
    std::vector<FiniteAlgebra> corpus{unary("u2", {1, 0})};
    auto                       c = algebraizability_refute(ls, corpus);
    REQUIRE(c.is_refuted());
    CHECK(c.witness["algebra"] == "u2");
    CHECK(c.witness["omega_1"] == c.witness["omega_2"]);
    CHECK(c.witness["filter_1"] != c.witness["filter_2"]);
  }

  SUBCASE("protoalgebraicity: Omega not monotone") {
    std::vector<FiniteAlgebra> corpus{unary("u3", {0, 0, 0})};
    auto                       c = protoalgebraic_refute(ls, corpus);
    REQUIRE(c.is_refuted());
    auto a  = corpus[0];
    auto o1 = Congruence::parse(a, c.witness["omega_1"].dump());
    auto o2 = Congruence::parse(a, c.witness["omega_2"].dump());
    CHECK(!o1.is_subset_of(o2));
    CHECK(leibniz_omega(a, ElemSet(3, {0})).to_string() == "[[0],[1,2]]");
    CHECK(!leibniz_omega(a, ElemSet(3, {0})).is_subset_of(leibniz_omega(a, ElemSet(3, {0, 1}))));
  }

  SUBCASE("rwa: F below i(theta) but Omega(F) not below theta") {
    auto                       fp = pointed_unary_pair();
    auto                       a  = pointed_unary("p3", 0, {0, 0, 0});
    std::vector<FiniteAlgebra> corpus{a};
    auto                       c = rwa_probe(fp, corpus);
    REQUIRE(c.is_refuted());
    CHECK(c.witness["omega_below_theta"] == false);
    CHECK(c.witness["filter_below_i"] == true);
    CHECK(leibniz_omega(a, ElemSet(3, {0})).to_string() == "[[0],[1,2]]");
    CHECK(i_tau(a, diagonal(a), fp) == ElemSet(3, {0}));
  }

  SUBCASE("the forward rwa direction never fails for i-filters") {
    auto fp = pointed_unary_pair();
    for (Elem e = 0; e < 3; ++e) {
      for (auto const& u : all_unary(3)) {
        auto a = pointed_unary("p", e, u.table(0));
        auto t = i_filters(a, fp);
        for (auto const& f : t.filters) {
          for (auto const& th : t.congruences) {
            if (leibniz_omega(a, f).is_subset_of(th)) {
              CHECK(f.is_subset_of(i_tau(a, th, fp)));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("empty corpus is vacuously consistent") {
  std::vector<FiniteAlgebra> none;
  auto                       ls = successor_pair();
  CHECK(algebraizability_refute(ls, none).verdict == Verdict::ConsistentUpTo);
  CHECK(truth_equational_refute(ls, none).verdict == Verdict::ConsistentUpTo);
  CHECK(protoalgebraic_refute(ls, none).verdict == Verdict::ConsistentUpTo);
  auto rep = hierarchy_report(ls, none);
  CHECK(rep.sandwich.rows.empty());
  CHECK(rep.exit_code() == 0);
}

TEST_CASE("pointed-assertional pairs are truth-equational on every unary corpus") {
  auto fp = pointed_unary_pair();
  for (Elem e = 0; e < 3; ++e) {
    std::vector<FiniteAlgebra> corpus;
    for (auto const& u : all_unary(3)) {
      corpus.push_back(pointed_unary("p", e, u.table(0)));
    }
    CHECK(!truth_equational_refute(fp, corpus).is_refuted());
  }
}

TEST_CASE("report JSON") {
  std::vector<FiniteAlgebra> corpus{cyc3z()};
  auto                       rep = hierarchy_report(successor_pair(), corpus);
  CHECK(rep.exit_code() == 1);
  auto j = rep.to_json(corpus);
  CHECK(j["verdict"] == "RefutedBy");
  CHECK(j["truth_equational"]["witness"]["filter"] == json::array({"z"}));
  CHECK(!j.contains("assertional"));
  CHECK(j.dump() == hierarchy_report(successor_pair(), corpus).to_json(corpus).dump());
}
