#include "fpw/leibniz.hpp"

#include "fpw/error.hpp"

namespace fpw {

  bool is_compatible(Congruence const& theta, ElemSet const& f) {
    if (theta.universe() != f.universe()) {
      throw MismatchError("is_compatible: congruence and subset live on different carriers");
    }
    for (Elem a = 0; a < theta.universe(); ++a) {
      if (f.contains(a) != f.contains(theta.block_of(a))) {
        return false;
      }
    }
    return true;
  }

  Congruence leibniz_omega(FiniteAlgebra const& a, ElemSet const& f) {
    if (f.universe() != a.size()) {
      throw MismatchError("leibniz_omega: subset is not over the carrier of " + a.name());
    }
    Congruence omega = diagonal(a);
    for (Elem x = 0; x < a.size(); ++x) {
      for (Elem y = x + 1; y < a.size(); ++y) {
        if (omega.related(x, y) || f.contains(x) != f.contains(y)) {
          continue;
        }
        auto p = principal_congruence(a, x, y);
        if (is_compatible(p, f)) {
          omega = join(a, omega, p);
        }
      }
    }
    return omega;
  }

  Matrix reduce_matrix(Matrix const& m) {
    auto omega  = leibniz_omega(m.algebra, m.designated);
    auto [q, p] = quotient(m.algebra, omega);
    return {std::move(q), p.image(m.designated)};
  }

  bool is_reduced(Matrix const& m) {
    return leibniz_omega(m.algebra, m.designated).is_diagonal();
  }

  bool matrices_isomorphic(Matrix const& x, Matrix const& y) {
    if (x.algebra.signature() != y.algebra.signature() || x.algebra.size() != y.algebra.size()
        || x.designated.count() != y.designated.count()) {
      return false;
    }
    return canonical_code(x.algebra, &x.designated) == canonical_code(y.algebra, &y.designated);
  }

  ElemSet left_adjoint_L(FiniteAlgebra const& a, Congruence const& theta, std::span<ElemSet const> filters) {
    ElemSet out = ElemSet::full(a.size());
    for (auto const& f : filters) {
      if (theta.is_subset_of(leibniz_omega(a, f))) {
        out = out.intersect(f);
      }
    }
    return out;
  }

}  // namespace fpw
