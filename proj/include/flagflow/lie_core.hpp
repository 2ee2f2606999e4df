#pragma once

// Matrix-level Lie theory for products of sl(n, R): Jordan decompositions,
// Weyl-chamber normalization of hyperbolic elements, restricted roots and the
// Cartan inner product.

#include "flagflow/errors.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <vector>

namespace flagflow {

using Eigen::MatrixXd;

enum class Sign { Plus, Minus };

/// Pass as the tolerance of AlgElem / GroupElem to skip validation of blocks
/// produced internally by exact algebraic operations.
inline constexpr double kNoCheck = std::numeric_limits<double>::infinity();

inline const char* to_string(Sign s) { return s == Sign::Plus ? "+" : "-"; }

/// Numerical tolerances. All are relative to the natural scale of the
/// quantity being tested unless stated otherwise.
struct Tolerances {
  double num = 1e-9;      // algebraic identities
  double cluster = 1e-8;  // floor for merging eigenvalues
  double fix = 1e-7;      // invariance and principal-angle tests on fixed flags
  double limit = 1e-4;    // classification of asymptotic limits
  double rank = 1e-7;     // smallest admissible singular value in rank tests
  double fd = 1e-6;       // finite-difference comparisons
};

/// The group SL(n_1, R) x ... x SL(n_p, R).
class SemisimpleSpec {
 public:
  SemisimpleSpec() = default;
  explicit SemisimpleSpec(std::vector<int> factors);

  std::size_t num_factors() const { return factors_.size(); }
  int size(std::size_t factor) const { return factors_[factor]; }
  const std::vector<int>& factors() const { return factors_; }

  bool operator==(const SemisimpleSpec&) const = default;

 private:
  std::vector<int> factors_;
};

/// One square block per factor. Shared storage for algebra and group elements.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(std::vector<MatrixXd> blocks);

  const std::vector<MatrixXd>& blocks() const { return blocks_; }
  const MatrixXd& block(std::size_t factor) const { return blocks_[factor]; }
  std::size_t num_factors() const { return blocks_.size(); }
  SemisimpleSpec spec() const;

  /// Frobenius norm over all factors.
  double norm() const;

 protected:
  std::vector<MatrixXd> blocks_;
};

/// Element of the Lie algebra: traceless blocks.
class AlgElem : public BlockMatrix {
 public:
  AlgElem() = default;
  /// Throws InvalidElement when a block has |trace| > tol * max(1, |block|).
  explicit AlgElem(std::vector<MatrixXd> blocks, double tol = 1e-9);

  static AlgElem zero(const SemisimpleSpec& spec);
  /// Embeds a single block into factor `factor`, zero elsewhere.
  static AlgElem embed(const SemisimpleSpec& spec, std::size_t factor, const MatrixXd& block);

  AlgElem& operator+=(const AlgElem& o);
  AlgElem& operator-=(const AlgElem& o);
  AlgElem& operator*=(double s);
};

AlgElem operator+(AlgElem a, const AlgElem& b);
AlgElem operator-(AlgElem a, const AlgElem& b);
AlgElem operator*(double s, AlgElem a);

/// Element of the group: unimodular blocks.
class GroupElem : public BlockMatrix {
 public:
  GroupElem() = default;
  /// Throws InvalidElement unless |det - 1| <= tol * n * cond(block) per block.
  explicit GroupElem(std::vector<MatrixXd> blocks, double tol = 1e-9);

  static GroupElem identity(const SemisimpleSpec& spec);

  GroupElem inverse() const;
  /// Integer power; negative exponents use the inverse.
  GroupElem pow(long k) const;
};

GroupElem operator*(const GroupElem& a, const GroupElem& b);

/// Blockwise matrix exponential.
GroupElem exp(const AlgElem& x);

/// [X, Y] blockwise.
AlgElem commutator(const AlgElem& x, const AlgElem& y);

/// Ad(g) X = g X g^{-1}.
AlgElem adjoint(const GroupElem& g, const AlgElem& x);

/// Cartan inner product: sum over factors of trace(X Y^T).
double cartan_inner(const AlgElem& x, const AlgElem& y);
double cartan_norm(const AlgElem& x);

// ---------------------------------------------------------------------------
// Jordan decompositions

struct JordanOptions {
  double cluster = 1e-8;
  double num = 1e-9;
};

/// X = E + H + N with commuting elliptic, hyperbolic and nilpotent parts.
struct AdditiveJordan {
  AlgElem elliptic;
  AlgElem hyperbolic;
  AlgElem nilpotent;
};

/// g = e h u with commuting elliptic, hyperbolic (h = exp H) and unipotent
/// (u = exp N) parts.
struct MultiplicativeJordan {
  GroupElem elliptic;
  GroupElem hyperbolic;
  GroupElem unipotent;
  AlgElem hyperbolic_log;
  AlgElem nilpotent_log;
};

AdditiveJordan additive_jordan(const AlgElem& x, const JordanOptions& opts = {});
MultiplicativeJordan multiplicative_jordan(const GroupElem& g, const JordanOptions& opts = {});

// ---------------------------------------------------------------------------
// Weyl chamber data of a hyperbolic element

/// Sorted spectrum of one factor of H together with an eigenbasis.
struct FactorChamber {
  std::vector<double> eigenvalues;  // strictly decreasing
  std::vector<int> multiplicities;
  MatrixXd conjugator;              // columns grouped by eigenvalue; V^{-1} H V diagonal
  MatrixXd conjugator_inv;

  int dim() const { return static_cast<int>(conjugator.rows()); }
  int num_groups() const { return static_cast<int>(eigenvalues.size()); }
  int group_offset(int group) const;
  /// Eigenvalue group of a column of the conjugator.
  int group_of(int column) const;
  /// Diagonal of V^{-1} H V in sorted order.
  Eigen::VectorXd diagonal() const;
};

class Chamber {
 public:
  Chamber() = default;
  Chamber(AlgElem generator, std::vector<FactorChamber> factors);

  const AlgElem& generator() const { return generator_; }
  const std::vector<FactorChamber>& factors() const { return factors_; }
  const FactorChamber& factor(std::size_t i) const { return factors_[i]; }
  std::size_t num_factors() const { return factors_.size(); }
  SemisimpleSpec spec() const { return generator_.spec(); }

  /// Conjugation into adapted coordinates, X -> V^{-1} X V per factor.
  AlgElem to_adapted(const AlgElem& x) const;
  AlgElem from_adapted(const AlgElem& x) const;

  /// The chamber of V^{-1} H V: diagonal sorted generator with V = I. In
  /// these coordinates the standard orthogonal group acts isometrically on
  /// every ad(H)-eigenspace.
  Chamber adapted() const;

  bool is_zero() const;

 private:
  AlgElem generator_;
  std::vector<FactorChamber> factors_;
};

/// Throws NotHyperbolic for complex or defective spectra.
Chamber chamber_normalize(const AlgElem& h, const JordanOptions& opts = {});

/// Smallest positive restricted root value alpha(H). Throws NoPositiveRoot
/// when H vanishes in every factor.
double mu_gap(const Chamber& c);

/// Basis of n^+_H (sign Plus) or n^-_H (sign Minus): the elementary matrices
/// E_ab of adapted coordinates with lambda_a > lambda_b (resp. <), conjugated
/// back to the original coordinates.
std::vector<AlgElem> ad_eigenspaces(const Chamber& c, Sign sign);

/// Restricted root values matching ad_eigenspaces(c, sign) element by element.
std::vector<double> ad_eigenvalues(const Chamber& c, Sign sign);

}  // namespace flagflow
