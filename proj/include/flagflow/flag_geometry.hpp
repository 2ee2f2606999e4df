#pragma once

// Points of real flag manifolds, the left action of the group, induced tangent
// vectors and the K-invariant metric determined at the base point by the
// Cartan inner product on the strictly block-lower subalgebra.

#include "flagflow/lie_core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flagflow {

/// Per factor, strictly increasing subspace dimensions 0 < d_1 < ... < d_k < n.
class FlagType {
 public:
  FlagType() = default;
  FlagType(SemisimpleSpec spec, std::vector<std::vector<int>> dims);

  /// Maximal flags (1, 2, ..., n-1) in every factor.
  static FlagType full(const SemisimpleSpec& spec);

  const SemisimpleSpec& spec() const { return spec_; }
  std::size_t num_factors() const { return dims_.size(); }
  const std::vector<int>& dims(std::size_t factor) const { return dims_[factor]; }
  /// Step sizes c_1, ..., c_{k+1} including the complement step.
  std::vector<int> steps(std::size_t factor) const;
  /// Step index of a frame column.
  int step_of(std::size_t factor, int column) const;
  /// dim F = sum over factors of sum_{i > i'} c_i c_i'.
  int manifold_dim() const;
  int manifold_dim(std::size_t factor) const;

  bool operator==(const FlagType&) const = default;

 private:
  SemisimpleSpec spec_;
  std::vector<std::vector<int>> dims_;
};

/// dim of the flag manifold with the given step sizes.
int flag_manifold_dim(const std::vector<int>& steps);

/// A point of F_Theta: per factor an orthonormal frame whose first d_i columns
/// span the i-th subspace. Frames are canonical: each step block is the
/// canonical basis of its orthogonal step space.
class Flag {
 public:
  Flag() = default;
  Flag(FlagType type, std::vector<MatrixXd> frames);

  const FlagType& type() const { return type_; }
  const std::vector<MatrixXd>& frames() const { return frames_; }
  const MatrixXd& frame(std::size_t factor) const { return frames_[factor]; }

  /// Orthogonal projector onto V_i (1-based step index i = 1..k).
  MatrixXd projector(std::size_t factor, std::size_t step) const;

 private:
  FlagType type_;
  std::vector<MatrixXd> frames_;
};

/// Flag spanned by the leading columns of invertible bases. Throws
/// SingularBasis.
Flag flag_from_basis(const std::vector<MatrixXd>& bases, const FlagType& type);

/// The base point b_Theta (identity frame).
Flag base_flag(const FlagType& type);

Flag act(const GroupElem& g, const Flag& x);

/// Left action of arbitrary invertible blocks (e.g. chamber conjugators).
Flag act_linear(const std::vector<MatrixXd>& maps, const Flag& x);

/// Equality of flags: all step projectors agree within `tol` in operator norm.
bool same_flag(const Flag& a, const Flag& b, double tol = 1e-8);

/// Largest operator-norm difference among step projectors.
double flag_distance(const Flag& a, const Flag& b);

/// Tangent vector v = Y . x carried by a representative Y and its reduced
/// form: per factor the strictly block-lower part of Q^T Y Q.
struct TangentVec {
  Flag base;
  AlgElem rep;
  std::vector<MatrixXd> reduced;
};

TangentVec induced_vector(const AlgElem& x_gen, const Flag& x);

double tangent_norm(const TangentVec& v);

/// (g_* v): base moves to g x, representative to Ad(g) Y.
TangentVec pushforward(const GroupElem& g, const TangentVec& v);

/// Reduced form flattened over the strictly block-lower positions, factor by
/// factor. Vectors at the same base share coordinates.
Eigen::VectorXd tangent_coordinates(const TangentVec& v);

/// Derivative of the i-th step projector along v (1-based step).
MatrixXd projector_derivative(const TangentVec& v, std::size_t factor, std::size_t step);

/// True when Q^T Y Q is block upper triangular at x, i.e. Y . x = 0.
bool in_isotropy(const AlgElem& y, const Flag& x, double tol);

}  // namespace flagflow
