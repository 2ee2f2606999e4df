#pragma once

// Dense linear-algebra helpers shared by the geometry modules.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace flagflow::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Orthonormal basis of the column space of `m`, keeping exactly `rank`
/// directions (the leading left singular vectors).
MatrixXd orthonormal_range(const MatrixXd& m, int rank);

/// Orthonormal basis of the null space of `m` with exactly `dim` columns
/// (right singular vectors of the `dim` smallest singular values).
MatrixXd null_space(const MatrixXd& m, int dim);

/// Orthogonal projector onto the column span of an orthonormal `basis`.
MatrixXd projector(const MatrixXd& basis);

/// Deterministic orthonormal basis of the `dim`-dimensional range of the
/// orthogonal projector `p`. The basis depends only on the subspace: standard
/// basis vectors are selected by pivoting, then orthonormalized in ascending
/// index order, so each column has a positive component on its pivot.
MatrixXd canonical_basis(const MatrixXd& p, int dim);

/// Cosines of the principal angles between the spans of two orthonormal
/// bases, sorted decreasing.
VectorXd principal_cosines(const MatrixXd& a, const MatrixXd& b);

/// dim(span(a) ∩ span(b)) for orthonormal bases, counting principal angles
/// whose cosine exceeds 1 - tol.
int intersection_dim(const MatrixXd& a, const MatrixXd& b, double tol);

/// Householder QR of a square matrix with the sign convention diag(R) >= 0.
/// Returns Q; `min_abs_diag` receives min |R_ii| / ||m||.
MatrixXd positive_qr(const MatrixXd& m, double* min_abs_diag = nullptr);

/// Haar-distributed orthogonal matrix.
MatrixXd random_orthogonal(int n, std::mt19937_64& rng);

MatrixXd random_gaussian(int rows, int cols, std::mt19937_64& rng);

/// Spectral norm (largest singular value).
double op_norm(const MatrixXd& m);

}  // namespace flagflow::linalg
