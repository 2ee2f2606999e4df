#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace oracle {

MatrixXd gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> nd;
  MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = nd(rng);
  return m;
}

MatrixXd orthogonal(int n, Rng& rng) {
  const MatrixXd a = gaussian(n, n, rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

MatrixXd conditioned(int n, double cond, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s(i) = std::pow(cond, u(rng));
  return orthogonal(n, rng) * s.asDiagonal() * orthogonal(n, rng).transpose();
}

std::vector<double> spaced_spectrum(const std::vector<int>& mult, double gap, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> distinct;
  double v = 0.0;
  for (std::size_t j = 0; j < mult.size(); ++j) {
    distinct.push_back(v);
    v += gap * (1.0 + u(rng));
  }
  int n = 0;
  double sum = 0.0;
  for (std::size_t j = 0; j < mult.size(); ++j) {
    n += mult[j];
    sum += mult[j] * distinct[j];
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < mult.size(); ++j)
    for (int r = 0; r < mult[j]; ++r) out.push_back(distinct[j] - sum / n);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

MatrixXd hyperbolic(const std::vector<double>& values, double cond, Rng& rng) {
  const int n = static_cast<int>(values.size());
  const MatrixXd v = conditioned(n, cond, rng);
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(values.data(), n);
  return v * d.asDiagonal() * v.inverse();
}

std::vector<int> composition(int n, Rng& rng) {
  std::vector<int> parts;
  int left = n;
  while (left > 0) {
    std::uniform_int_distribution<int> d(1, left);
    const int p = d(rng);
    parts.push_back(p);
    left -= p;
  }
  return parts;
}

Triple commuting_triple(int n, Rng& rng, double cond, bool orthogonal_basis) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  MatrixXd e = MatrixXd::Zero(n, n), h = MatrixXd::Zero(n, n), nil = MatrixXd::Zero(n, n);
  // distinct block eigenvalues: real parts on a lattice with random offsets,
  // imaginary parts well away from zero
  std::vector<double> reals;
  for (int k = 0; k < n; ++k) reals.push_back(-2.0 + 0.8 * k + 0.3 * u(rng));
  std::shuffle(reals.begin(), reals.end(), rng);
  int at = 0, block = 0;
  while (at < n) {
    const double lambda = reals[static_cast<std::size_t>(block++)];
    const bool pair = n - at >= 2 && coin(rng);
    const int unit = pair ? 2 : 1;
    const int max_chain = (n - at) / unit;
    std::uniform_int_distribution<int> dc(1, std::min(max_chain, 3));
    const int chain = dc(rng);
    const int size = unit * chain;
    MatrixXd rot = MatrixXd::Zero(unit, unit);
    if (pair) {
      const double b = 0.6 + 1.2 * u(rng);
      rot << 0, -b, b, 0;
    }
    for (int c = 0; c < chain; ++c) {
      h.block(at + unit * c, at + unit * c, unit, unit) = lambda * MatrixXd::Identity(unit, unit);
      e.block(at + unit * c, at + unit * c, unit, unit) = rot;
      if (c + 1 < chain)
        nil.block(at + unit * c, at + unit * (c + 1), unit, unit) = (0.5 + u(rng)) * MatrixXd::Identity(unit, unit);
    }
    at += size;
  }
  h -= (h.trace() / n) * MatrixXd::Identity(n, n);
  const MatrixXd v = orthogonal_basis ? orthogonal(n, rng) : conditioned(n, cond, rng);
  const MatrixXd vi = v.inverse();
  return Triple{v * e * vi, v * h * vi, v * nil * vi};
}

MatrixXd span_projector(const MatrixXd& basis, int d) {
  const MatrixXd a = basis.leftCols(d);
  return a * (a.transpose() * a).inverse() * a.transpose();
}

std::vector<Eigen::MatrixXi> brute_tables(const std::vector<int>& rows, const std::vector<int>& cols) {
  const int r = static_cast<int>(rows.size()), c = static_cast<int>(cols.size());
  std::vector<Eigen::MatrixXi> out;
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(r, c);
  std::function<void(int)> rec = [&](int cell) {
    if (cell == r * c) {
      for (int i = 0; i < r; ++i)
        if (m.row(i).sum() != rows[static_cast<std::size_t>(i)]) return;
      for (int j = 0; j < c; ++j)
        if (m.col(j).sum() != cols[static_cast<std::size_t>(j)]) return;
      out.push_back(m);
      return;
    }
    const int i = cell / c, j = cell % c;
    const int bound = std::min(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    for (int v = 0; v <= bound; ++v) {
      m(i, j) = v;
      rec(cell + 1);
    }
    m(i, j) = 0;
  };
  rec(0);
  return out;
}

PairCounts pair_counts(const Eigen::MatrixXi& d) {
  std::vector<int> g, s;
  for (int i = 0; i < d.cols(); ++i)
    for (int j = 0; j < d.rows(); ++j)
      for (int k = 0; k < d(j, i); ++k) {
        g.push_back(j);
        s.push_back(i);
      }
  PairCounts pc;
  const std::size_t n = g.size();
  // v_a w_b^T moves column b towards column a; it is a tangent direction of
  // the flag manifold iff step(a) > step(b). Group order decides its sign.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (s[a] <= s[b]) continue;
      if (g[a] == g[b]) ++pc.fix;
      else if (g[a] < g[b]) ++pc.plus;
      else ++pc.minus;
    }
  return pc;
}

int inversions(const std::vector<int>& perm) {
  int k = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++k;
  return k;
}

std::vector<std::vector<int>> all_flag_types(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << (n - 1)); ++mask) {
    std::vector<int> dims;
    for (int d = 1; d < n; ++d)
      if (mask & (1 << (d - 1))) dims.push_back(d);
    out.push_back(dims);
  }
  return out;
}

std::vector<std::vector<int>> all_compositions(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<int> parts;
    int run = 1;
    for (int k = 1; k < n; ++k) {
      if (mask & (1 << (k - 1))) {
        parts.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    parts.push_back(run);
    out.push_back(parts);
  }
  return out;
}

std::vector<flagflow::TrigTerm> dft_table(const std::function<MatrixXd(double)>& x, std::size_t factor, double period,
                                          int k_max, int samples) {
  std::vector<flagflow::TrigTerm> out;
  const MatrixXd x0 = x(0.0);
  for (int k = 0; k <= k_max; ++k) {
    MatrixXd c = MatrixXd::Zero(x0.rows(), x0.cols()), s = c;
    for (int i = 0; i < samples; ++i) {
      const double t = period * i / samples;
      const double w = 2 * std::numbers::pi * k * i / samples;
      const MatrixXd v = x(t);
      c += std::cos(w) * v;
      s += std::sin(w) * v;
    }
    const double scale = k == 0 ? 1.0 / samples : 2.0 / samples;
    out.push_back(flagflow::TrigTerm{factor, k, scale * c, k == 0 ? MatrixXd() : MatrixXd(scale * s)});
  }
  return out;
}

MatrixXd RotatingFrame::rotation(double t) const { return (t * omega).exp(); }

MatrixXd RotatingFrame::coefficient(double t) const {
  const MatrixXd r = rotation(t);
  return r * x0 * r.transpose() + omega;
}

MatrixXd RotatingFrame::solution(double t) const { return rotation(t) * (t * x0).exp(); }

}  // namespace oracle
