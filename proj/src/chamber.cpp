#include "flagflow/lie_core.hpp"
#include "flagflow/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace flagflow {

int FactorChamber::group_offset(int group) const {
  return std::accumulate(multiplicities.begin(), multiplicities.begin() + group, 0);
}

int FactorChamber::group_of(int column) const {
  int acc = 0;
  for (int j = 0; j < num_groups(); ++j) {
    acc += multiplicities[static_cast<std::size_t>(j)];
    if (column < acc) return j;
  }
  return num_groups() - 1;
}

Eigen::VectorXd FactorChamber::diagonal() const {
  Eigen::VectorXd d(dim());
  for (int a = 0; a < dim(); ++a) d(a) = eigenvalues[static_cast<std::size_t>(group_of(a))];
  return d;
}

Chamber::Chamber(AlgElem generator, std::vector<FactorChamber> factors)
    : generator_(std::move(generator)), factors_(std::move(factors)) {}

AlgElem Chamber::to_adapted(const AlgElem& x) const {
  std::vector<MatrixXd> out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.push_back(factors_[i].conjugator_inv * x.block(i) * factors_[i].conjugator);
  }
  return AlgElem(std::move(out), kNoCheck);
}

AlgElem Chamber::from_adapted(const AlgElem& x) const {
  std::vector<MatrixXd> out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.push_back(factors_[i].conjugator * x.block(i) * factors_[i].conjugator_inv);
  }
  return AlgElem(std::move(out), kNoCheck);
}

Chamber Chamber::adapted() const {
  std::vector<FactorChamber> fs;
  std::vector<MatrixXd> gen;
  for (const auto& f : factors_) {
    FactorChamber a = f;
    a.conjugator = MatrixXd::Identity(f.dim(), f.dim());
    a.conjugator_inv = a.conjugator;
    gen.push_back(f.diagonal().asDiagonal());
    fs.push_back(std::move(a));
  }
  return Chamber(AlgElem(std::move(gen), kNoCheck), std::move(fs));
}

bool Chamber::is_zero() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const FactorChamber& f) { return f.num_groups() < 2; });
}

namespace {

FactorChamber normalize_block(const MatrixXd& h, const JordanOptions& opts) {
  const int n = static_cast<int>(h.rows());
  const double scale = std::max(1.0, h.norm());

  Eigen::EigenSolver<MatrixXd> solver(h, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NotHyperbolic, "eigensolver failed");
  std::vector<double> ev;
  for (int i = 0; i < n; ++i) {
    const auto z = solver.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-7 * scale) {
      std::ostringstream os;
      os << "eigenvalue " << z.real() << "+" << z.imag() << "i is not real";
      throw Error(ErrorCode::NotHyperbolic, os.str());
    }
    ev.push_back(z.real());
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());

  FactorChamber fc;
  std::vector<std::vector<double>> groups;
  for (double v : ev) {
    if (!groups.empty() && groups.back().back() - v <= opts.cluster * scale) {
      groups.back().push_back(v);
    } else {
      groups.push_back({v});
    }
  }
  for (const auto& g : groups) {
    fc.eigenvalues.push_back(std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size()));
    fc.multiplicities.push_back(static_cast<int>(g.size()));
  }
  if (fc.eigenvalues.size() == 1) fc.eigenvalues[0] = 0.0;  // traceless

  fc.conjugator.resize(n, n);
  int col = 0;
  const MatrixXd id = MatrixXd::Identity(n, n);
  for (std::size_t j = 0; j < fc.eigenvalues.size(); ++j) {
    const int m = fc.multiplicities[j];
    const MatrixXd shifted = h - fc.eigenvalues[j] * id;
    Eigen::JacobiSVD<MatrixXd> svd(shifted, Eigen::ComputeFullV);
    const double worst = svd.singularValues()(n - m);
    if (worst > 1e-6 * scale) {
      throw Error(ErrorCode::NotHyperbolic, "defective eigenvalue: eigenspace smaller than multiplicity");
    }
    const MatrixXd kernel = svd.matrixV().rightCols(m);
    fc.conjugator.middleCols(col, m) = linalg::canonical_basis(linalg::projector(kernel), m);
    col += m;
  }
  Eigen::FullPivLU<MatrixXd> lu(fc.conjugator);
  if (!lu.isInvertible()) throw Error(ErrorCode::NotHyperbolic, "eigenvectors do not span");
  fc.conjugator_inv = lu.inverse();

  const MatrixXd diag = fc.diagonal().asDiagonal();
  if ((fc.conjugator * diag * fc.conjugator_inv - h).norm() > 1e-7 * scale) {
    throw Error(ErrorCode::NotHyperbolic, "eigenbasis does not reconstruct H");
  }
  return fc;
}

}  // namespace

Chamber chamber_normalize(const AlgElem& h, const JordanOptions& opts) {
  std::vector<FactorChamber> fs;
  for (const auto& b : h.blocks()) fs.push_back(normalize_block(b, opts));
  return Chamber(h, std::move(fs));
}

double mu_gap(const Chamber& c) {
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& f : c.factors()) {
    for (int j = 0; j + 1 < f.num_groups(); ++j) {
      mu = std::min(mu, f.eigenvalues[static_cast<std::size_t>(j)] - f.eigenvalues[static_cast<std::size_t>(j + 1)]);
    }
  }
  if (!std::isfinite(mu)) throw Error(ErrorCode::NoPositiveRoot, "H vanishes in every factor");
  return mu;
}

namespace {

template <class Visit>
void for_each_root(const Chamber& c, Sign sign, Visit visit) {
  for (std::size_t i = 0; i < c.num_factors(); ++i) {
    const FactorChamber& f = c.factor(i);
    for (int a = 0; a < f.dim(); ++a) {
      for (int b = 0; b < f.dim(); ++b) {
        const int ga = f.group_of(a), gb = f.group_of(b);
        const bool keep = sign == Sign::Plus ? ga < gb : ga > gb;
        if (keep) visit(i, a, b, f.eigenvalues[static_cast<std::size_t>(ga)] - f.eigenvalues[static_cast<std::size_t>(gb)]);
      }
    }
  }
}

}  // namespace

std::vector<AlgElem> ad_eigenspaces(const Chamber& c, Sign sign) {
  std::vector<AlgElem> basis;
  const SemisimpleSpec spec = c.spec();
  for_each_root(c, sign, [&](std::size_t i, int a, int b, double) {
    const FactorChamber& f = c.factor(i);
    const MatrixXd block = f.conjugator.col(a) * f.conjugator_inv.row(b);
    basis.push_back(AlgElem::embed(spec, i, block));
  });
  return basis;
}

std::vector<double> ad_eigenvalues(const Chamber& c, Sign sign) {
  std::vector<double> values;
  for_each_root(c, sign, [&](std::size_t, int, int, double v) { values.push_back(v); });
  return values;
}

}  // namespace flagflow
