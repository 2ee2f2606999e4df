#include "flagflow/lie_core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace flagflow {

SemisimpleSpec::SemisimpleSpec(std::vector<int> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error(ErrorCode::SpecMismatch, "at least one factor required");
  for (int n : factors_) {
    if (n < 2) throw Error(ErrorCode::SpecMismatch, "factor sizes must be >= 2");
  }
}

BlockMatrix::BlockMatrix(std::vector<MatrixXd> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.rows() != b.cols()) throw Error(ErrorCode::NonSquareInput, "blocks must be square");
  }
}

SemisimpleSpec BlockMatrix::spec() const {
  std::vector<int> sizes;
  sizes.reserve(blocks_.size());
  for (const auto& b : blocks_) sizes.push_back(static_cast<int>(b.rows()));
  return SemisimpleSpec(std::move(sizes));
}

double BlockMatrix::norm() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return std::sqrt(s);
}

namespace {

void require_same_shape(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.num_factors() != b.num_factors()) throw Error(ErrorCode::SpecMismatch, "factor count differs");
  for (std::size_t i = 0; i < a.num_factors(); ++i) {
    if (a.block(i).rows() != b.block(i).rows()) throw Error(ErrorCode::SpecMismatch, "block sizes differ");
  }
}

}  // namespace

AlgElem::AlgElem(std::vector<MatrixXd> blocks, double tol) : BlockMatrix(std::move(blocks)) {
  if (std::isinf(tol)) return;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const double scale = std::max(1.0, blocks_[i].norm());
    if (std::abs(blocks_[i].trace()) > tol * scale) {
      std::ostringstream os;
      os << "block " << i << " has trace " << blocks_[i].trace();
      throw Error(ErrorCode::InvalidElement, os.str());
    }
  }
}

AlgElem AlgElem::zero(const SemisimpleSpec& spec) {
  std::vector<MatrixXd> blocks;
  for (int n : spec.factors()) blocks.push_back(MatrixXd::Zero(n, n));
  return AlgElem(std::move(blocks));
}

AlgElem AlgElem::embed(const SemisimpleSpec& spec, std::size_t factor, const MatrixXd& block) {
  std::vector<MatrixXd> blocks;
  for (int n : spec.factors()) blocks.push_back(MatrixXd::Zero(n, n));
  blocks.at(factor) = block;
  return AlgElem(std::move(blocks));
}

AlgElem& AlgElem::operator+=(const AlgElem& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.block(i);
  return *this;
}

AlgElem& AlgElem::operator-=(const AlgElem& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.block(i);
  return *this;
}

AlgElem& AlgElem::operator*=(double s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

AlgElem operator+(AlgElem a, const AlgElem& b) { return a += b; }
AlgElem operator-(AlgElem a, const AlgElem& b) { return a -= b; }
AlgElem operator*(double s, AlgElem a) { return a *= s; }

GroupElem::GroupElem(std::vector<MatrixXd> blocks, double tol) : BlockMatrix(std::move(blocks)) {
  if (std::isinf(tol)) return;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const MatrixXd& b = blocks_[i];
    Eigen::FullPivLU<MatrixXd> lu(b);
    if (!lu.isInvertible()) throw Error(ErrorCode::InvalidElement, "singular group block");
    const double cond = b.norm() * lu.inverse().norm();
    const double bound = tol * static_cast<double>(b.rows()) * std::max(1.0, cond);
    if (std::abs(lu.determinant() - 1.0) > bound) {
      std::ostringstream os;
      os << "block " << i << " has determinant " << lu.determinant();
      throw Error(ErrorCode::InvalidElement, os.str());
    }
  }
}

GroupElem GroupElem::identity(const SemisimpleSpec& spec) {
  std::vector<MatrixXd> blocks;
  for (int n : spec.factors()) blocks.push_back(MatrixXd::Identity(n, n));
  return GroupElem(std::move(blocks));
}

GroupElem GroupElem::inverse() const {
  std::vector<MatrixXd> inv;
  for (const auto& b : blocks_) inv.push_back(b.inverse());
  GroupElem out;
  out.blocks_ = std::move(inv);
  return out;
}

GroupElem GroupElem::pow(long k) const {
  const GroupElem base = k < 0 ? inverse() : *this;
  unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
  std::vector<MatrixXd> result;
  for (const auto& b : base.blocks()) {
    MatrixXd acc = MatrixXd::Identity(b.rows(), b.cols());
    MatrixXd sq = b;
    unsigned long r = e;
    while (r) {
      if (r & 1UL) acc = acc * sq;
      sq = sq * sq;
      r >>= 1;
    }
    result.push_back(std::move(acc));
  }
  GroupElem out;
  out.blocks_ = std::move(result);
  return out;
}

GroupElem operator*(const GroupElem& a, const GroupElem& b) {
  require_same_shape(a, b);
  std::vector<MatrixXd> prod;
  for (std::size_t i = 0; i < a.num_factors(); ++i) prod.push_back(a.block(i) * b.block(i));
  return GroupElem(std::move(prod), kNoCheck);
}

GroupElem exp(const AlgElem& x) {
  std::vector<MatrixXd> blocks;
  for (const auto& b : x.blocks()) blocks.push_back(b.exp());
  return GroupElem(std::move(blocks), kNoCheck);
}

AlgElem commutator(const AlgElem& x, const AlgElem& y) {
  require_same_shape(x, y);
  std::vector<MatrixXd> out;
  for (std::size_t i = 0; i < x.num_factors(); ++i) {
    out.push_back(x.block(i) * y.block(i) - y.block(i) * x.block(i));
  }
  return AlgElem(std::move(out), kNoCheck);
}

AlgElem adjoint(const GroupElem& g, const AlgElem& x) {
  require_same_shape(g, x);
  std::vector<MatrixXd> out;
  for (std::size_t i = 0; i < x.num_factors(); ++i) {
    const MatrixXd& gi = g.block(i);
    out.push_back(gi * x.block(i) * gi.inverse());
  }
  return AlgElem(std::move(out), kNoCheck);
}

double cartan_inner(const AlgElem& x, const AlgElem& y) {
  if (!(x.spec() == y.spec())) throw Error(ErrorCode::SpecMismatch, "cartan_inner on different specs");
  double s = 0.0;
  for (std::size_t i = 0; i < x.num_factors(); ++i) s += x.block(i).cwiseProduct(y.block(i)).sum();
  return s;
}

double cartan_norm(const AlgElem& x) { return x.norm(); }

}  // namespace flagflow
