#include "flagflow/lie_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace flagflow {

namespace {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Merging threshold for a cluster of algebraic multiplicity m. A Jordan block
// of size m perturbed at the level of roundoff splits its eigenvalue over a
// disc of radius ~ (n u)^{1/m}, inflated for the conditioning of the
// eigenbasis.
double merge_threshold(int n, int m, double floor) {
  const double u = std::numeric_limits<double>::epsilon();
  return std::max(floor, std::pow(1e4 * n * u, 1.0 / m));
}

constexpr double kAmbiguityFactor = 10.0;

// Spectral data of one real block: eigenvalue clusters and a basis of the
// generalized eigenspaces, columns grouped cluster by cluster.
struct SpectralSplit {
  std::vector<cd> centers;
  std::vector<int> multiplicities;
  MatrixXcd basis;
  MatrixXcd basis_inv;

  // Real matrix sum_c w(center_c) P_c.
  template <class Weight>
  MatrixXd spectral_sum(Weight w) const {
    const Eigen::Index n = basis.rows();
    VectorXcd diag(n);
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      for (int j = 0; j < multiplicities[c]; ++j) diag(k++) = w(centers[c]);
    }
    const MatrixXcd m = basis * diag.asDiagonal() * basis_inv;
    const double scale = std::max(1.0, m.norm());
    if (m.imag().norm() > 1e-8 * scale) {
      throw Error(ErrorCode::ClusterAmbiguity, "spectral sum is not real; conjugate pairing failed");
    }
    return m.real();
  }
};

// relative == true measures eigenvalue distances relative to modulus, which
// suits group elements whose spectra span many orders of magnitude.
SpectralSplit spectral_split(const MatrixXd& a, bool relative, double floor) {
  const int n = static_cast<int>(a.rows());
  const double scale = std::max(1.0, a.norm());

  Eigen::ComplexEigenSolver<MatrixXcd> solver(a.cast<cd>(), false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::ClusterAmbiguity, "eigensolver failed");
  const VectorXcd ev = solver.eigenvalues();

  auto dist = [&](cd x, cd y) {
    if (relative) return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
    return std::abs(x - y) / scale;
  };

  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});

  auto linkage = [&](const std::vector<int>& p, const std::vector<int>& q) {
    double d = std::numeric_limits<double>::infinity();
    for (int i : p)
      for (int j : q) d = std::min(d, dist(ev(i), ev(j)));
    return d;
  };

  // A perturbed Jordan block of size m scatters its eigenvalue over a small
  // disc, so pairs inside it are judged with the threshold of everything
  // nearby, not just of the pair.
  auto local_multiplicity = [&](const std::vector<int>& p, const std::vector<int>& q, double d) {
    int m = 0;
    for (int k = 0; k < n; ++k) {
      double near = std::numeric_limits<double>::infinity();
      for (int i : p) near = std::min(near, dist(ev(k), ev(i)));
      for (int j : q) near = std::min(near, dist(ev(k), ev(j)));
      if (near <= 2.0 * d) ++m;
    }
    return std::max(m, static_cast<int>(p.size() + q.size()));
  };

  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bp = 0, bq = 0;
    for (std::size_t p = 0; p < clusters.size(); ++p) {
      for (std::size_t q = p + 1; q < clusters.size(); ++q) {
        const double d = linkage(clusters[p], clusters[q]);
        if (d < best && d <= merge_threshold(n, local_multiplicity(clusters[p], clusters[q], d), floor)) {
          best = d;
          bp = p;
          bq = q;
        }
      }
    }
    if (!std::isfinite(best)) break;
    clusters[bp].insert(clusters[bp].end(), clusters[bq].begin(), clusters[bq].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bq));
  }

  for (std::size_t p = 0; p < clusters.size(); ++p) {
    for (std::size_t q = p + 1; q < clusters.size(); ++q) {
      const double d = linkage(clusters[p], clusters[q]);
      const int m = local_multiplicity(clusters[p], clusters[q], d);
      if (d <= kAmbiguityFactor * merge_threshold(n, m, floor)) {
        std::ostringstream os;
        os << "eigenvalue clusters separated by " << d << " are too close to the merge threshold";
        throw Error(ErrorCode::ClusterAmbiguity, os.str());
      }
    }
  }

  const std::size_t count = clusters.size();
  std::vector<cd> centers(count);
  std::vector<int> mult(count);
  for (std::size_t c = 0; c < count; ++c) {
    cd sum = 0.0;
    for (int i : clusters[c]) sum += ev(i);
    mult[c] = static_cast<int>(clusters[c].size());
    centers[c] = sum / static_cast<double>(mult[c]);
  }

  // Conjugate pairing so that spectral sums come out real.
  std::vector<int> partner(count, -1);
  for (std::size_t c = 0; c < count; ++c) {
    if (partner[c] >= 0) continue;
    const cd target = std::conj(centers[c]);
    std::size_t best = c;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < count; ++q) {
      if (partner[q] >= 0 && q != c) continue;
      const double d = dist(centers[q], target);
      if (d < bd) {
        bd = d;
        best = q;
      }
    }
    if (bd > kAmbiguityFactor * merge_threshold(n, 2 * mult[c], floor) || mult[best] != mult[c]) {
      throw Error(ErrorCode::ClusterAmbiguity, "eigenvalue cluster without conjugate partner");
    }
    if (best == c) {
      centers[c] = cd(centers[c].real(), 0.0);
      partner[c] = static_cast<int>(c);
    } else {
      const cd avg = 0.5 * (centers[c] + std::conj(centers[best]));
      centers[c] = avg;
      centers[best] = std::conj(avg);
      partner[c] = static_cast<int>(best);
      partner[best] = static_cast<int>(c);
    }
  }

  // Generalized eigenspaces as null spaces of ((A - z)/scale)^m.
  std::vector<MatrixXcd> bases(count);
  const MatrixXcd ac = a.cast<cd>() / scale;
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  for (std::size_t c = 0; c < count; ++c) {
    const int m = mult[c];
    const std::size_t p = static_cast<std::size_t>(partner[c]);
    if (p < c) {
      bases[c] = bases[p].conjugate();
      continue;
    }
    if (m == n) {
      bases[c] = id;
      continue;
    }
    const MatrixXcd shifted = ac - (centers[c] / scale) * id;
    MatrixXcd power = id;
    for (int k = 0; k < m; ++k) power = power * shifted;
    Eigen::JacobiSVD<MatrixXcd> svd(power, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double kept = sv(n - m - 1);
    const double dropped = sv(n - m);
    if (!(dropped <= 1e-3 * kept)) {
      throw Error(ErrorCode::ClusterAmbiguity, "generalized eigenspace is not numerically separated");
    }
    bases[c] = svd.matrixV().rightCols(m);
  }

  SpectralSplit out;
  out.centers = centers;
  out.multiplicities = mult;
  out.basis.resize(n, n);
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < count; ++c) {
    out.basis.middleCols(col, mult[c]) = bases[c];
    col += mult[c];
  }
  Eigen::FullPivLU<MatrixXcd> lu(out.basis);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    throw Error(ErrorCode::ClusterAmbiguity, "generalized eigenspaces are nearly dependent");
  }
  out.basis_inv = lu.inverse();
  return out;
}

void check_commuting(const MatrixXd& s, const MatrixXd& rest, double scale) {
  const double c = (s * rest - rest * s).norm();
  if (c > 1e-6 * scale * scale) {
    std::ostringstream os;
    os << "semisimple and nilpotent parts fail to commute (" << c << ")";
    throw Error(ErrorCode::ClusterAmbiguity, os.str());
  }
}

}  // namespace

AdditiveJordan additive_jordan(const AlgElem& x, const JordanOptions& opts) {
  std::vector<MatrixXd> es, hs, ns;
  for (const auto& a : x.blocks()) {
    const SpectralSplit split = spectral_split(a, false, opts.cluster);
    MatrixXd h = split.spectral_sum([](cd z) { return cd(z.real(), 0.0); });
    MatrixXd e = split.spectral_sum([](cd z) { return cd(0.0, z.imag()); });
    MatrixXd nil = a - h - e;
    check_commuting(h + e, nil, std::max(1.0, a.norm()));
    es.push_back(std::move(e));
    hs.push_back(std::move(h));
    ns.push_back(std::move(nil));
  }
  return AdditiveJordan{AlgElem(std::move(es), kNoCheck), AlgElem(std::move(hs), kNoCheck),
                        AlgElem(std::move(ns), kNoCheck)};
}

MultiplicativeJordan multiplicative_jordan(const GroupElem& g, const JordanOptions& opts) {
  std::vector<MatrixXd> es, hs, us, hlogs, nlogs;
  for (const auto& a : g.blocks()) {
    const Eigen::Index n = a.rows();
    const SpectralSplit split = spectral_split(a, true, opts.cluster);
    MatrixXd h = split.spectral_sum([](cd z) { return cd(std::abs(z), 0.0); });
    MatrixXd e = split.spectral_sum([](cd z) { return z / std::abs(z); });
    MatrixXd hlog = split.spectral_sum([](cd z) { return cd(std::log(std::abs(z)), 0.0); });
    const MatrixXd s_inv = split.spectral_sum([](cd z) { return 1.0 / z; });
    MatrixXd u = s_inv * a;

    const MatrixXd id = MatrixXd::Identity(n, n);
    const MatrixXd du = u - id;
    MatrixXd nlog = MatrixXd::Zero(n, n);
    MatrixXd power = id;
    for (Eigen::Index k = 1; k < n; ++k) {
      power = power * du;
      nlog += ((k % 2) ? 1.0 : -1.0) / static_cast<double>(k) * power;
    }
    check_commuting(hlog, nlog, std::max(1.0, hlog.norm() + nlog.norm()));

    es.push_back(std::move(e));
    hs.push_back(std::move(h));
    us.push_back(std::move(u));
    hlogs.push_back(std::move(hlog));
    nlogs.push_back(std::move(nlog));
  }
  return MultiplicativeJordan{GroupElem(std::move(es), kNoCheck), GroupElem(std::move(hs), kNoCheck),
                              GroupElem(std::move(us), kNoCheck), AlgElem(std::move(hlogs), kNoCheck),
                              AlgElem(std::move(nlogs), kNoCheck)};
}

}  // namespace flagflow
