#pragma once

#include "flagflow/dynamics.hpp"
#include "flagflow/flag_geometry.hpp"
#include "flagflow/lie_core.hpp"
#include "flagflow/morse.hpp"

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

namespace th {

using Eigen::MatrixXd;
using namespace flagflow;

inline MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline MatrixXd unit(int n, int i, int j) {
  MatrixXd m = MatrixXd::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline MatrixXd diag(std::initializer_list<double> v) {
  std::vector<double> d(v);
  return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal();
}

inline AlgElem alg(const MatrixXd& m) { return AlgElem({m}); }

// The worked example on RP^2: X = H + N with H = diag(-1,-1,2), N = E_12.
inline MatrixXd example_h() { return diag({-1, -1, 2}); }
inline MatrixXd example_n() { return unit(3, 0, 1); }
inline AlgElem example_x() { return alg(example_h() + example_n()); }
inline FlagType rp2() { return FlagType(SemisimpleSpec({3}), {{1}}); }

// The torus example: (diag(-1,1), E_12) on RP^1 x RP^1.
inline AlgElem torus_x() { return AlgElem({diag({-1, 1}), unit(2, 0, 1)}); }
inline FlagType torus_type() { return FlagType(SemisimpleSpec({2, 2}), {{1}, {1}}); }

inline Flag line_flag(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  MatrixXd b = MatrixXd::Identity(n, n);
  int k = 0;
  v.cwiseAbs().maxCoeff(&k);
  b.col(k) = b.col(0);
  b.col(0) = v;
  return flag_from_basis({b}, FlagType(SemisimpleSpec({n}), {{1}}));
}

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_err(const BlockMatrix& a, const BlockMatrix& b) {
  double num = 0, den = 0;
  for (std::size_t f = 0; f < a.num_factors(); ++f) {
    num += (a.block(f) - b.block(f)).squaredNorm();
    den += b.block(f).squaredNorm();
  }
  return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

}  // namespace th
