#include "flagflow/flag_geometry.hpp"
#include "flagflow/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace flagflow {

FlagType::FlagType(SemisimpleSpec spec, std::vector<std::vector<int>> dims)
    : spec_(std::move(spec)), dims_(std::move(dims)) {
  if (dims_.size() != spec_.num_factors()) {
    throw Error(ErrorCode::InvalidFlagType, "one dimension list per factor required");
  }
  for (std::size_t f = 0; f < dims_.size(); ++f) {
    int prev = 0;
    for (int d : dims_[f]) {
      if (d <= prev || d >= spec_.size(f)) {
        throw Error(ErrorCode::InvalidFlagType, "dimensions must increase strictly within (0, n)");
      }
      prev = d;
    }
  }
}

FlagType FlagType::full(const SemisimpleSpec& spec) {
  std::vector<std::vector<int>> dims;
  for (int n : spec.factors()) {
    std::vector<int> d;
    for (int k = 1; k < n; ++k) d.push_back(k);
    dims.push_back(std::move(d));
  }
  return FlagType(spec, std::move(dims));
}

std::vector<int> FlagType::steps(std::size_t factor) const {
  std::vector<int> c;
  int prev = 0;
  for (int d : dims_[factor]) {
    c.push_back(d - prev);
    prev = d;
  }
  c.push_back(spec_.size(factor) - prev);
  return c;
}

int FlagType::step_of(std::size_t factor, int column) const {
  const auto& d = dims_[factor];
  return static_cast<int>(std::upper_bound(d.begin(), d.end(), column) - d.begin());
}

int flag_manifold_dim(const std::vector<int>& steps) {
  int total = 0, acc = 0;
  for (int c : steps) {
    total += c * acc;
    acc += c;
  }
  return total;
}

int FlagType::manifold_dim(std::size_t factor) const { return flag_manifold_dim(steps(factor)); }

int FlagType::manifold_dim() const {
  int total = 0;
  for (std::size_t f = 0; f < dims_.size(); ++f) total += manifold_dim(f);
  return total;
}

Flag::Flag(FlagType type, std::vector<MatrixXd> frames) : type_(std::move(type)), frames_(std::move(frames)) {}

MatrixXd Flag::projector(std::size_t factor, std::size_t step) const {
  const int d = type_.dims(factor).at(step - 1);
  const MatrixXd& q = frames_[factor];
  return q.leftCols(d) * q.leftCols(d).transpose();
}

Flag flag_from_basis(const std::vector<MatrixXd>& bases, const FlagType& type) {
  if (bases.size() != type.num_factors()) throw Error(ErrorCode::SpecMismatch, "basis count differs from factor count");
  std::vector<MatrixXd> frames;
  for (std::size_t f = 0; f < bases.size(); ++f) {
    const MatrixXd& m = bases[f];
    const int n = type.spec().size(f);
    if (m.rows() != n || m.cols() != n) throw Error(ErrorCode::SpecMismatch, "basis block has wrong size");
    // Leading columns may differ in scale by many orders of magnitude after
    // long flows; normalize them first.
    MatrixXd scaled = m;
    for (int j = 0; j < n; ++j) {
      const double c = scaled.col(j).norm();
      if (!(c > 0) || !std::isfinite(c)) throw Error(ErrorCode::SingularBasis, "zero or non-finite basis column");
      scaled.col(j) /= c;
    }
    double min_diag = 0.0;
    const MatrixXd q = linalg::positive_qr(scaled, &min_diag);
    if (min_diag < 1e-13) throw Error(ErrorCode::SingularBasis, "basis is numerically singular");

    MatrixXd frame(n, n);
    int col = 0;
    for (int c : type.steps(f)) {
      const MatrixXd block = q.middleCols(col, c);
      frame.middleCols(col, c) = linalg::canonical_basis(linalg::projector(block), c);
      col += c;
    }
    frames.push_back(std::move(frame));
  }
  return Flag(type, std::move(frames));
}

Flag base_flag(const FlagType& type) {
  std::vector<MatrixXd> frames;
  for (int n : type.spec().factors()) frames.push_back(MatrixXd::Identity(n, n));
  return Flag(type, std::move(frames));
}

Flag act_linear(const std::vector<MatrixXd>& maps, const Flag& x) {
  if (maps.size() != x.frames().size()) throw Error(ErrorCode::SpecMismatch, "action on mismatched spec");
  std::vector<MatrixXd> bases;
  for (std::size_t f = 0; f < maps.size(); ++f) bases.push_back(maps[f] * x.frame(f));
  return flag_from_basis(bases, x.type());
}

Flag act(const GroupElem& g, const Flag& x) { return act_linear(g.blocks(), x); }

double flag_distance(const Flag& a, const Flag& b) {
  if (!(a.type() == b.type())) throw Error(ErrorCode::SpecMismatch, "flags of different types");
  double worst = 0.0;
  for (std::size_t f = 0; f < a.type().num_factors(); ++f) {
    for (std::size_t i = 1; i <= a.type().dims(f).size(); ++i) {
      worst = std::max(worst, linalg::op_norm(a.projector(f, i) - b.projector(f, i)));
    }
  }
  return worst;
}

bool same_flag(const Flag& a, const Flag& b, double tol) { return flag_distance(a, b) <= tol; }

namespace {

MatrixXd strictly_block_lower(const MatrixXd& m, const FlagType& type, std::size_t factor) {
  MatrixXd z = MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index b = 0; b < m.cols(); ++b) {
    const int sb = type.step_of(factor, static_cast<int>(b));
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
      if (type.step_of(factor, static_cast<int>(a)) > sb) z(a, b) = m(a, b);
    }
  }
  return z;
}

}  // namespace

TangentVec induced_vector(const AlgElem& y, const Flag& x) {
  if (y.num_factors() != x.frames().size()) throw Error(ErrorCode::SpecMismatch, "vector and flag specs differ");
  std::vector<MatrixXd> reduced;
  for (std::size_t f = 0; f < y.num_factors(); ++f) {
    const MatrixXd& q = x.frame(f);
    reduced.push_back(strictly_block_lower(q.transpose() * y.block(f) * q, x.type(), f));
  }
  return TangentVec{x, y, std::move(reduced)};
}

double tangent_norm(const TangentVec& v) {
  double s = 0.0;
  for (const auto& z : v.reduced) s += z.squaredNorm();
  return std::sqrt(s);
}

TangentVec pushforward(const GroupElem& g, const TangentVec& v) {
  return induced_vector(adjoint(g, v.rep), act(g, v.base));
}

Eigen::VectorXd tangent_coordinates(const TangentVec& v) {
  const FlagType& type = v.base.type();
  Eigen::VectorXd out(type.manifold_dim());
  Eigen::Index k = 0;
  for (std::size_t f = 0; f < v.reduced.size(); ++f) {
    const MatrixXd& z = v.reduced[f];
    for (Eigen::Index b = 0; b < z.cols(); ++b) {
      const int sb = type.step_of(f, static_cast<int>(b));
      for (Eigen::Index a = 0; a < z.rows(); ++a) {
        if (type.step_of(f, static_cast<int>(a)) > sb) out(k++) = z(a, b);
      }
    }
  }
  return out;
}

MatrixXd projector_derivative(const TangentVec& v, std::size_t factor, std::size_t step) {
  const MatrixXd& q = v.base.frame(factor);
  const Eigen::Index n = q.rows();
  const int d = v.base.type().dims(factor).at(step - 1);
  MatrixXd j = MatrixXd::Zero(n, n);
  j.topLeftCorner(d, d).setIdentity();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd& z = v.reduced[factor];
  const MatrixXd inner = (id - j) * z * j;
  return q * (inner + inner.transpose()) * q.transpose();
}

bool in_isotropy(const AlgElem& y, const Flag& x, double tol) {
  const TangentVec v = induced_vector(y, x);
  return tangent_norm(v) <= tol * std::max(1.0, y.norm());
}

}  // namespace flagflow
