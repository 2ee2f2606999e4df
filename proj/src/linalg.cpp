#include "flagflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flagflow::linalg {

MatrixXd orthonormal_range(const MatrixXd& m, int rank) {
  if (rank <= 0) return MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(rank);
}

MatrixXd null_space(const MatrixXd& m, int dim) {
  if (dim <= 0) return MatrixXd(m.cols(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

MatrixXd projector(const MatrixXd& basis) { return basis * basis.transpose(); }

MatrixXd canonical_basis(const MatrixXd& p, int dim) {
  const Eigen::Index n = p.rows();
  if (dim <= 0) return MatrixXd(n, 0);

  Eigen::ColPivHouseholderQR<MatrixXd> qr(p);
  std::vector<int> pivots(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) pivots[static_cast<std::size_t>(k)] = qr.colsPermutation().indices()(k);
  std::sort(pivots.begin(), pivots.end());

  MatrixXd basis(n, dim);
  for (int k = 0; k < dim; ++k) {
    VectorXd v = p.col(pivots[static_cast<std::size_t>(k)]);
    // two passes of Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < k; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    }
    basis.col(k) = v.normalized();
  }
  return basis;
}

VectorXd principal_cosines(const MatrixXd& a, const MatrixXd& b) {
  if (a.cols() == 0 || b.cols() == 0) return VectorXd(0);
  Eigen::JacobiSVD<MatrixXd> svd(a.transpose() * b);
  return svd.singularValues();
}

int intersection_dim(const MatrixXd& a, const MatrixXd& b, double tol) {
  const VectorXd c = principal_cosines(a, b);
  int count = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i) > 1.0 - tol) ++count;
  }
  return count;
}

MatrixXd positive_qr(const MatrixXd& m, double* min_abs_diag) {
  const Eigen::Index n = m.cols();
  Eigen::HouseholderQR<MatrixXd> qr(m);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(m.rows(), n);
  const MatrixXd& r = qr.matrixQR();
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
    smallest = std::min(smallest, std::abs(r(i, i)));
  }
  if (min_abs_diag) {
    const double scale = m.norm();
    *min_abs_diag = scale > 0 ? smallest / scale : 0.0;
  }
  return q;
}

MatrixXd random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  if (n == 0) return MatrixXd(0, 0);
  return positive_qr(random_gaussian(n, n, rng));
}

double op_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace flagflow::linalg
