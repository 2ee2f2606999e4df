#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>

using namespace th;

TEST_CASE("element construction validates its blocks") {
  CHECK_THROWS_AS(SemisimpleSpec({1}), Error);
  CHECK_NOTHROW(AlgElem({diag({1, -1})}));
  try {
    AlgElem({diag({1, 1})});
    FAIL("traceful block accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidElement);
  }
  try {
    AlgElem({MatrixXd::Zero(2, 3)});
    FAIL("rectangular block accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonSquareInput);
  }
  CHECK_THROWS_AS(GroupElem({diag({2, 1})}), Error);
  CHECK_NOTHROW(GroupElem({diag({2, 0.5})}));
}

TEST_CASE("additive Jordan of the RP^2 example is exact") {
  const auto j = additive_jordan(example_x());
  CHECK(max_abs(j.elliptic.block(0)) < 1e-12);
  CHECK(max_abs(j.hyperbolic.block(0) - example_h()) < 1e-12);
  CHECK(max_abs(j.nilpotent.block(0) - example_n()) < 1e-12);
}

TEST_CASE("symmetric generators are hyperbolic") {
  oracle::Rng rng(11);
  for (int n = 2; n <= 6; ++n) {
    MatrixXd s = oracle::gaussian(n, n, rng);
    s = (s + s.transpose()).eval();
    s -= (s.trace() / n) * MatrixXd::Identity(n, n);
    const auto j = additive_jordan(alg(s));
    CHECK(max_abs(j.hyperbolic.block(0) - s) < 1e-9 * s.norm());
    CHECK(max_abs(j.elliptic.block(0)) < 1e-9 * s.norm());
    CHECK(max_abs(j.nilpotent.block(0)) < 1e-9 * s.norm());
  }
}

TEST_CASE("commuting triples are recovered part by part") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 5;
    const auto t = oracle::commuting_triple(n, rng, 4.0, trial % 2 == 0);
    const auto j = additive_jordan(alg(t.x()));
    const double s = std::max(1.0, t.x().norm());
    CHECK(max_abs(j.elliptic.block(0) - t.e) < 1e-8 * s);
    CHECK(max_abs(j.hyperbolic.block(0) - t.h) < 1e-8 * s);
    CHECK(max_abs(j.nilpotent.block(0) - t.n) < 1e-8 * s);
    // nilpotency: N^n = 0
    MatrixXd p = MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) p = p * j.nilpotent.block(0);
    CHECK(max_abs(p) < 1e-8 * std::pow(s, n));
  }
}

TEST_CASE("multiplicative Jordan") {
  SUBCASE("exp of the RP^2 generator") {
    const GroupElem g = exp(example_x());
    const auto m = multiplicative_jordan(g);
    CHECK(max_abs(m.elliptic.block(0) - MatrixXd::Identity(3, 3)) < 1e-9);
    CHECK(max_abs(m.hyperbolic.block(0) - example_h().exp()) < 1e-9 * example_h().exp().norm());
    CHECK(max_abs(m.unipotent.block(0) - example_n().exp()) < 1e-9);
    CHECK(max_abs(m.hyperbolic_log.block(0) - example_h()) < 1e-9);
    CHECK(max_abs(m.nilpotent_log.block(0) - example_n()) < 1e-9);
  }
  SUBCASE("orthogonal elements are elliptic") {
    oracle::Rng rng(13);
    for (int n = 2; n <= 5; ++n) {
      MatrixXd q = oracle::orthogonal(n, rng);
      if (q.determinant() < 0) q.col(0) *= -1.0;
      const auto m = multiplicative_jordan(GroupElem({q}));
      CHECK(max_abs(m.elliptic.block(0) - q) < 1e-9);
      CHECK(max_abs(m.hyperbolic.block(0) - MatrixXd::Identity(n, n)) < 1e-9);
      CHECK(max_abs(m.unipotent.block(0) - MatrixXd::Identity(n, n)) < 1e-9);
    }
  }
  SUBCASE("positive diagonalizable elements are hyperbolic") {
    oracle::Rng rng(14);
    for (int n = 2; n <= 5; ++n) {
      std::vector<double> logs = oracle::spaced_spectrum(std::vector<int>(static_cast<std::size_t>(n), 1), 0.4, rng);
      std::vector<double> vals;
      for (double l : logs) vals.push_back(std::exp(l));
      const MatrixXd g = oracle::hyperbolic(vals, 3.0, rng);
      const auto m = multiplicative_jordan(GroupElem({g}, 1e-8));
      CHECK(max_abs(m.elliptic.block(0) - MatrixXd::Identity(n, n)) < 1e-8);
      CHECK(max_abs(m.hyperbolic.block(0) - g) < 1e-8 * g.norm());
      CHECK(max_abs(m.unipotent.block(0) - MatrixXd::Identity(n, n)) < 1e-8);
    }
  }
  SUBCASE("parts commute and reconstruct") {
    oracle::Rng rng(15);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 5;
      const auto t = oracle::commuting_triple(n, rng);
      const MatrixXd g = t.x().exp();
      const auto m = multiplicative_jordan(GroupElem({g}, 1e-8));
      const MatrixXd& e = m.elliptic.block(0);
      const MatrixXd& h = m.hyperbolic.block(0);
      const MatrixXd& u = m.unipotent.block(0);
      const double s = g.norm();
      CHECK(max_abs(e * h * u - g) < 1e-8 * s);
      CHECK(max_abs(e * h - h * e) < 1e-8 * s * s);
      CHECK(max_abs(h * u - u * h) < 1e-8 * s * s);
      CHECK(max_abs(m.hyperbolic_log.block(0) - t.h) < 1e-8 * std::max(1.0, t.x().norm()));
      CHECK(max_abs(m.nilpotent_log.block(0) - t.n) < 1e-8 * std::max(1.0, t.x().norm()));
    }
  }
}

TEST_CASE("unstable clustering is reported") {
  // a gap inside the band between the merge threshold for a double
  // eigenvalue and ten times that threshold
  const MatrixXd x = diag({1.0, 1.0 + 2e-5, -2.0 - 2e-5});
  try {
    additive_jordan(alg(x));
    FAIL("expected ClusterAmbiguity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClusterAmbiguity);
  }
}

TEST_CASE("chamber normalization") {
  SUBCASE("RP^2 example") {
    const Chamber c = chamber_normalize(alg(example_h()));
    const auto& f = c.factor(0);
    CHECK(f.eigenvalues == std::vector<double>{2.0, -1.0});
    CHECK(f.multiplicities == std::vector<int>{1, 2});
    // e3 comes first
    CHECK(std::abs(std::abs(f.conjugator(2, 0)) - 1.0) < 1e-12);
    CHECK(max_abs(f.conjugator_inv * example_h() * f.conjugator - diag({2, -1, -1})) < 1e-12);
  }
  SUBCASE("zero") {
    const Chamber c = chamber_normalize(AlgElem::zero(SemisimpleSpec({4})));
    CHECK(c.factor(0).eigenvalues.size() == 1);
    CHECK(c.factor(0).multiplicities == std::vector<int>{4});
    CHECK(max_abs(c.factor(0).conjugator - MatrixXd::Identity(4, 4)) < 1e-15);
    CHECK(c.is_zero());
  }
  SUBCASE("random symmetric against a dense symmetric solver") {
    oracle::Rng rng(16);
    for (int n = 2; n <= 6; ++n) {
      MatrixXd s = oracle::gaussian(n, n, rng);
      s = (s + s.transpose()).eval();
      s -= (s.trace() / n) * MatrixXd::Identity(n, n);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
      std::vector<double> ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
      std::sort(ref.rbegin(), ref.rend());
      const Chamber c = chamber_normalize(alg(s));
      REQUIRE(c.factor(0).eigenvalues.size() == static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) CHECK(std::abs(c.factor(0).eigenvalues[static_cast<std::size_t>(k)] - ref[static_cast<std::size_t>(k)]) < 1e-10);
      const auto& f = c.factor(0);
      const MatrixXd rec = f.conjugator * f.diagonal().asDiagonal() * f.conjugator_inv;
      CHECK(max_abs(rec - s) < 1e-9 * s.norm());
    }
  }
  SUBCASE("non-hyperbolic input") {
    try {
      chamber_normalize(alg(mat({{0, -1}, {1, 0}})));
      FAIL("rotation accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotHyperbolic);
    }
    try {
      chamber_normalize(alg(unit(2, 0, 1)));
      FAIL("defective accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotHyperbolic);
    }
  }
  SUBCASE("invariants on random non-symmetric inputs") {
    oracle::Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 5;
      const auto mult = oracle::composition(n, rng);
      const MatrixXd h = oracle::hyperbolic(oracle::spaced_spectrum(mult, 0.5, rng), 5.0, rng);
      const Chamber c = chamber_normalize(alg(h));
      const auto& f = c.factor(0);
      double tr = 0;
      int total = 0;
      for (std::size_t j = 0; j < f.eigenvalues.size(); ++j) {
        if (j > 0) CHECK(f.eigenvalues[j] < f.eigenvalues[j - 1]);
        tr += f.eigenvalues[j] * f.multiplicities[j];
        total += f.multiplicities[j];
      }
      CHECK(total == n);
      CHECK(std::abs(tr) <= 1e-9 * std::max(1.0, h.norm()));
      CHECK(f.multiplicities.size() == mult.size());
      CHECK(max_abs(f.conjugator_inv * h * f.conjugator - MatrixXd(f.diagonal().asDiagonal())) <= 1e-8 * std::max(1.0, h.norm()));
    }
  }
}

TEST_CASE("mu_gap") {
  CHECK(mu_gap(chamber_normalize(alg(diag({2, -1, -1})))) == doctest::Approx(3.0));
  CHECK(mu_gap(chamber_normalize(AlgElem({diag({-1, 1}), MatrixXd::Zero(2, 2)}))) == doctest::Approx(2.0));
  CHECK(mu_gap(chamber_normalize(alg(diag({3, 1, 0, -4})))) == doctest::Approx(1.0));
  try {
    mu_gap(chamber_normalize(AlgElem::zero(SemisimpleSpec({2, 3}))));
    FAIL("expected NoPositiveRoot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPositiveRoot);
  }
  // brute force over pairwise differences, and scaling
  oracle::Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const auto vals = oracle::spaced_spectrum(oracle::composition(n, rng), 0.3, rng);
    double best = 1e300;
    for (double a : vals)
      for (double b : vals)
        if (a - b > 1e-9) best = std::min(best, a - b);
    const MatrixXd h = oracle::hyperbolic(vals, 2.0, rng);
    if (best == 1e300) continue;
    const double mu = mu_gap(chamber_normalize(alg(h)));
    CHECK(mu == doctest::Approx(best).epsilon(1e-8));
    CHECK(mu_gap(chamber_normalize(alg(2.5 * h))) == doctest::Approx(2.5 * mu).epsilon(1e-8));
  }
}

TEST_CASE("Cartan inner product") {
  const SemisimpleSpec sp({3});
  CHECK(cartan_inner(alg(unit(3, 0, 1)), alg(unit(3, 0, 1))) == 1.0);
  CHECK(cartan_inner(alg(unit(3, 0, 1)), alg(unit(3, 1, 0))) == 0.0);
  CHECK_THROWS_AS(cartan_inner(alg(unit(3, 0, 1)), AlgElem({unit(2, 0, 1)})), Error);
  oracle::Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    MatrixXd a = oracle::gaussian(n, n, rng), b = oracle::gaussian(n, n, rng);
    a -= (a.trace() / n) * MatrixXd::Identity(n, n);
    b -= (b.trace() / n) * MatrixXd::Identity(n, n);
    MatrixXd k = oracle::orthogonal(n, rng);
    if (k.determinant() < 0) k.col(0) *= -1.0;
    const GroupElem kg({k});
    const double ref = cartan_inner(alg(a), alg(b));
    CHECK(std::abs(cartan_inner(adjoint(kg, alg(a)), adjoint(kg, alg(b))) - ref) < 1e-12 * (1 + std::abs(ref)) * n);
    CHECK(cartan_inner(alg(a), alg(b)) == doctest::Approx(cartan_inner(alg(b), alg(a))));
    CHECK(cartan_inner(alg(a), alg(a)) > 0);
  }
}

TEST_CASE("ad(H) eigenspaces") {
  SUBCASE("RP^2 example") {
    const Chamber c = chamber_normalize(alg(diag({2, -1, -1})));
    const auto plus = ad_eigenspaces(c, Sign::Plus);
    CHECK(plus.size() == 2);
    // in sorted coordinates these are E_12, E_13: upper triangular
    for (const auto& y : plus) CHECK(max_abs(MatrixXd(y.block(0).triangularView<Eigen::StrictlyLower>())) == 0.0);
    CHECK(ad_eigenspaces(c, Sign::Minus).size() == 2);
  }
  CHECK(ad_eigenspaces(chamber_normalize(AlgElem::zero(SemisimpleSpec({3}))), Sign::Plus).empty());
  CHECK(ad_eigenspaces(chamber_normalize(alg(diag({3, 1, -4}))), Sign::Plus).size() == 3);

  oracle::Rng rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto mult = oracle::composition(n, rng);
    const MatrixXd h = oracle::hyperbolic(oracle::spaced_spectrum(mult, 0.5, rng), 3.0, rng);
    const Chamber c = chamber_normalize(alg(h));
    int expect = 0;
    for (std::size_t j = 0; j < mult.size(); ++j)
      for (std::size_t k = j + 1; k < mult.size(); ++k) expect += mult[j] * mult[k];
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const auto basis = ad_eigenspaces(c, sign);
      const auto vals = ad_eigenvalues(c, sign);
      REQUIRE(basis.size() == static_cast<std::size_t>(expect));
      for (std::size_t k = 0; k < basis.size(); ++k) {
        CHECK((sign == Sign::Plus ? vals[k] > 0 : vals[k] < 0));
        const AlgElem ad = commutator(alg(h), basis[k]);
        CHECK(rel_err(ad, vals[k] * basis[k]) < 1e-8 * h.norm());
      }
    }
  }
}

TEST_CASE("ad(H) is self-adjoint for symmetric H") {
  oracle::Rng rng(21);
  MatrixXd s = oracle::gaussian(4, 4, rng);
  s = (s + s.transpose()).eval();
  s -= (s.trace() / 4) * MatrixXd::Identity(4, 4);
  for (int k = 0; k < 10; ++k) {
    MatrixXd a = oracle::gaussian(4, 4, rng), b = oracle::gaussian(4, 4, rng);
    a -= (a.trace() / 4) * MatrixXd::Identity(4, 4);
    b -= (b.trace() / 4) * MatrixXd::Identity(4, 4);
    const double l = cartan_inner(commutator(alg(s), alg(a)), alg(b));
    const double r = cartan_inner(alg(a), commutator(alg(s), alg(b)));
    CHECK(std::abs(l - r) < 1e-10 * (1 + std::abs(l)));
  }
}

TEST_CASE("group operations") {
  oracle::Rng rng(22);
  const MatrixXd a = oracle::conditioned(3, 3.0, rng);
  const MatrixXd g = a / std::cbrt(a.determinant());
  const GroupElem ge({g}, 1e-8);
  CHECK(max_abs((ge * ge.inverse()).block(0) - MatrixXd::Identity(3, 3)) < 1e-10);
  CHECK(max_abs(ge.pow(3).block(0) - g * g * g) < 1e-10 * g.norm() * g.norm() * g.norm());
  CHECK(max_abs(ge.pow(-2).block(0) - (g * g).inverse()) < 1e-9 * (g * g).inverse().norm());
  CHECK(max_abs(ge.pow(0).block(0) - MatrixXd::Identity(3, 3)) == 0.0);
}
