#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace th;

namespace {

MatrixXd traceless(int n, oracle::Rng& rng) {
  MatrixXd a = oracle::gaussian(n, n, rng);
  return a - (a.trace() / n) * MatrixXd::Identity(n, n);
}

FlagType random_type(int n, oracle::Rng& rng) {
  const auto all = oracle::all_flag_types(n);
  std::uniform_int_distribution<std::size_t> d(0, all.size() - 1);
  return FlagType(SemisimpleSpec({n}), {all[d(rng)]});
}

GroupElem unimodular(int n, oracle::Rng& rng, double cond = 3.0) {
  MatrixXd a = oracle::conditioned(n, cond, rng);
  if (a.determinant() < 0) a.col(0) *= -1.0;
  return GroupElem({a / std::pow(a.determinant(), 1.0 / n)}, 1e-8);
}

GroupElem rotation(int n, oracle::Rng& rng) {
  MatrixXd q = oracle::orthogonal(n, rng);
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return GroupElem({q}, 1e-8);
}

}  // namespace

TEST_CASE("flag types") {
  const SemisimpleSpec s4({4});
  CHECK_THROWS_AS(FlagType(s4, {{2, 1}}), Error);
  CHECK_THROWS_AS(FlagType(s4, {{0}}), Error);
  CHECK_THROWS_AS(FlagType(s4, {{4}}), Error);
  CHECK(FlagType(s4, {{1, 3}}).steps(0) == std::vector<int>{1, 2, 1});
  CHECK(FlagType::full(s4).manifold_dim() == 6);
  CHECK(FlagType(s4, {{2}}).manifold_dim() == 4);
  CHECK(FlagType(s4, {{}}).manifold_dim() == 0);
  CHECK(rp2().manifold_dim() == 2);
  CHECK(torus_type().manifold_dim() == 2);
}

TEST_CASE("flag_from_basis") {
  const FlagType t(SemisimpleSpec({4}), {{1, 3}});
  SUBCASE("identity gives the base point") {
    const Flag b = flag_from_basis({MatrixXd::Identity(4, 4)}, t);
    CHECK(max_abs(b.frame(0) - MatrixXd::Identity(4, 4)) < 1e-15);
    CHECK(same_flag(b, base_flag(t)));
  }
  SUBCASE("permuting columns inside a step block does not change the flag") {
    oracle::Rng rng(31);
    const MatrixXd m = oracle::gaussian(4, 4, rng);
    MatrixXd p = m;
    p.col(1).swap(p.col(2));
    p.col(1) *= -3.0;
    const Flag a = flag_from_basis({m}, t), b = flag_from_basis({p}, t);
    CHECK(max_abs(a.frame(0) - b.frame(0)) < 1e-12);
  }
  SUBCASE("spans agree with an independent projector computation") {
    oracle::Rng rng(32);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 5;
      const FlagType ty = random_type(n, rng);
      const MatrixXd m = oracle::gaussian(n, n, rng);
      const Flag x = flag_from_basis({m}, ty);
      CHECK(max_abs(x.frame(0).transpose() * x.frame(0) - MatrixXd::Identity(n, n)) < 1e-12);
      for (std::size_t i = 0; i < ty.dims(0).size(); ++i)
        CHECK(max_abs(x.projector(0, i + 1) - oracle::span_projector(m, ty.dims(0)[i])) < 1e-10);
    }
  }
  SUBCASE("singular bases are rejected") {
    MatrixXd m = MatrixXd::Identity(4, 4);
    m.col(2) = m.col(0);
    try {
      flag_from_basis({m}, t);
      FAIL("singular basis accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularBasis);
    }
  }
}

TEST_CASE("group action") {
  oracle::Rng rng(33);
  const FlagType t = FlagType::full(SemisimpleSpec({3}));
  const Flag x = flag_from_basis({oracle::gaussian(3, 3, rng)}, t);
  CHECK(same_flag(act(GroupElem::identity(SemisimpleSpec({3})), x), x));
  CHECK(same_flag(act(GroupElem({diag({2, 0.25, 2})}), base_flag(t)), base_flag(t)));
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    const FlagType ty = random_type(n, rng);
    const MatrixXd m = oracle::gaussian(n, n, rng);
    const Flag y = flag_from_basis({m}, ty);
    const GroupElem g = unimodular(n, rng), h = unimodular(n, rng);
    const Flag gy = act(g, y);
    for (std::size_t i = 0; i < ty.dims(0).size(); ++i)
      CHECK(max_abs(gy.projector(0, i + 1) - oracle::span_projector(g.block(0) * m, ty.dims(0)[i])) < 1e-9);
    CHECK(flag_distance(act(g * h, y), act(g, act(h, y))) < 1e-9);
  }
}

TEST_CASE("induced vectors") {
  const FlagType line(SemisimpleSpec({2}), {{1}});
  SUBCASE("E21 at the base point of RP^1") {
    const TangentVec v = induced_vector(alg(unit(2, 1, 0)), base_flag(line));
    CHECK(max_abs(v.reduced[0] - unit(2, 1, 0)) < 1e-15);
    CHECK(tangent_norm(v) == doctest::Approx(1.0));
  }
  SUBCASE("isotropy kernel") {
    oracle::Rng rng(34);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 4;
      const FlagType ty = random_type(n, rng);
      const Flag x = flag_from_basis({oracle::gaussian(n, n, rng)}, ty);
      // block upper triangular in the frame of x
      MatrixXd z = traceless(n, rng);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (ty.step_of(0, a) > ty.step_of(0, b)) z(a, b) = 0.0;
      const MatrixXd y = x.frame(0) * z * x.frame(0).transpose();
      CHECK(tangent_norm(induced_vector(alg(y), x)) < 1e-12);
      CHECK(in_isotropy(alg(y), x, 1e-9));
      const MatrixXd w = traceless(n, rng);
      CHECK(!in_isotropy(alg(w), x, 1e-9));
      CHECK(tangent_coordinates(induced_vector(alg(w), x)).size() == ty.manifold_dim());
    }
  }
  SUBCASE("reduced form and representative induce the same vector") {
    oracle::Rng rng(35);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 4;
      const FlagType ty = random_type(n, rng);
      const Flag x = flag_from_basis({oracle::gaussian(n, n, rng)}, ty);
      const TangentVec v = induced_vector(alg(traceless(n, rng)), x);
      const MatrixXd q = x.frame(0);
      const TangentVec w = induced_vector(alg(q * v.reduced[0] * q.transpose()), x);
      CHECK(max_abs(w.reduced[0] - v.reduced[0]) < 1e-12);
    }
  }
  SUBCASE("central differences of step projectors") {
    oracle::Rng rng(36);
    const double h = 1e-5;
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 4;
      const FlagType ty = random_type(n, rng);
      const Flag x = flag_from_basis({oracle::gaussian(n, n, rng)}, ty);
      const MatrixXd xm = traceless(n, rng);
      const TangentVec v = induced_vector(alg(xm), x);
      const Flag fwd = act(GroupElem({(h * xm).exp()}, kNoCheck), x);
      const Flag bwd = act(GroupElem({(-h * xm).exp()}, kNoCheck), x);
      for (std::size_t i = 1; i <= ty.dims(0).size(); ++i) {
        const MatrixXd fd = (fwd.projector(0, i) - bwd.projector(0, i)) / (2 * h);
        const MatrixXd p = x.projector(0, i);
        const MatrixXd id = MatrixXd::Identity(n, n);
        const MatrixXd analytic = (id - p) * xm * p + p * xm.transpose() * (id - p);
        CHECK(max_abs(projector_derivative(v, 0, i) - fd) < 1e-6);
        CHECK(max_abs(analytic - fd) < 1e-6);
      }
    }
  }
}

TEST_CASE("metric invariance and pushforward") {
  oracle::Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    const FlagType ty = random_type(n, rng);
    const Flag x = flag_from_basis({oracle::gaussian(n, n, rng)}, ty);
    const TangentVec v = induced_vector(alg(traceless(n, rng)), x);
    const GroupElem k = rotation(n, rng);
    CHECK(std::abs(tangent_norm(pushforward(k, v)) - tangent_norm(v)) < 1e-9 * (1 + tangent_norm(v)));
  }
  SUBCASE("identity and equivariance") {
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 4;
      const FlagType ty = random_type(n, rng);
      const Flag x = flag_from_basis({oracle::gaussian(n, n, rng)}, ty);
      const AlgElem y = alg(traceless(n, rng));
      const TangentVec v = induced_vector(y, x);
      const TangentVec same = pushforward(GroupElem::identity(SemisimpleSpec({n})), v);
      CHECK(max_abs(same.reduced[0] - v.reduced[0]) < 1e-12);
      const GroupElem g = unimodular(n, rng);
      const TangentVec a = pushforward(g, v);
      const TangentVec b = induced_vector(adjoint(g, y), act(g, x));
      CHECK(max_abs(a.reduced[0] - b.reduced[0]) < 1e-9 * (1 + max_abs(b.reduced[0])));
    }
  }
  SUBCASE("chain rule against finite differences") {
    const double h = 1e-5;
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 4;
      const FlagType ty = random_type(n, rng);
      const Flag x = flag_from_basis({oracle::gaussian(n, n, rng)}, ty);
      const MatrixXd y = traceless(n, rng);
      const GroupElem g = unimodular(n, rng);
      const TangentVec gv = pushforward(g, induced_vector(alg(y), x));
      const Flag fwd = act(g, act(GroupElem({(h * y).exp()}, kNoCheck), x));
      const Flag bwd = act(g, act(GroupElem({(-h * y).exp()}, kNoCheck), x));
      for (std::size_t i = 1; i <= ty.dims(0).size(); ++i) {
        const MatrixXd fd = (fwd.projector(0, i) - bwd.projector(0, i)) / (2 * h);
        CHECK(max_abs(projector_derivative(gv, 0, i) - fd) < 1e-6 * std::max(1.0, max_abs(fd)));
      }
    }
  }
}

TEST_CASE("norm never exceeds the Cartan norm of a representative in n^-_H") {
  // regular H, full flags; at the flag (e2, e1, e3) the direction E21 lies in
  // the isotropy algebra while E31 and E32 do not
  const Chamber c = chamber_normalize(alg(diag({3, 1, -4})));
  AlgElem y = AlgElem::zero(SemisimpleSpec({3}));
  for (const auto& b : ad_eigenspaces(c, Sign::Minus)) y += b;
  MatrixXd q = MatrixXd::Zero(3, 3);
  q(1, 0) = q(0, 1) = q(2, 2) = 1.0;
  const Flag x = flag_from_basis({q}, FlagType::full(SemisimpleSpec({3})));
  CHECK(tangent_norm(induced_vector(y, x)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(cartan_norm(y) == doctest::Approx(std::sqrt(3.0)));
}
