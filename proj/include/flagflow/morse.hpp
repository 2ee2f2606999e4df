#pragma once

// Minimal Morse components fix(H, w) of translation flows on F_Theta, indexed
// by dimension profiles, and the stable/unstable normal fibers over them.

#include "flagflow/flag_geometry.hpp"
#include "flagflow/lie_core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace flagflow {

/// Per factor an s x (k+1) table: entry (j, i) counts how many dimensions of
/// step i lie in the j-th eigenspace of H (groups sorted by decreasing
/// eigenvalue). Row sums are multiplicities, column sums are step sizes.
class DimensionProfile {
 public:
  DimensionProfile() = default;
  explicit DimensionProfile(std::vector<Eigen::MatrixXi> tables) : tables_(std::move(tables)) {}

  const std::vector<Eigen::MatrixXi>& tables() const { return tables_; }
  const Eigen::MatrixXi& table(std::size_t factor) const { return tables_[factor]; }
  std::size_t num_factors() const { return tables_.size(); }

  /// e.g. "[[1,0],[0,2]]", factors joined by " x ".
  std::string to_string() const;

  bool operator==(const DimensionProfile& o) const;

 private:
  std::vector<Eigen::MatrixXi> tables_;
};

/// Flag type carried by each eigenvalue group of H on a component, per factor.
using FactorStructure = std::vector<std::vector<std::vector<int>>>;

struct MorseComponent {
  DimensionProfile profile;
  Flag base_point;
  int dim_fix = 0;
  int dim_vplus = 0;   // n_w, rank of the unstable bundle
  int dim_vminus = 0;
  FactorStructure factor_structure;

  bool is_attractor() const { return dim_vplus == 0; }
  bool is_repeller() const { return dim_vminus == 0; }
};

/// All nonnegative integer tables with the given row and column sums.
std::vector<Eigen::MatrixXi> contingency_tables(const std::vector<int>& row_sums, const std::vector<int>& col_sums);

std::vector<MorseComponent> enumerate_components(const Chamber& c, const FlagType& type);

struct FixOptions {
  double invariance = 1e-7;  // ||(I - P) H P|| relative to ||H||
  double angle = 1e-7;       // principal angle threshold on 1 - cos
};

/// Profile of x when every step of x is H-invariant, nullopt otherwise.
std::optional<DimensionProfile> classify_flag(const Flag& x, const Chamber& c, const FixOptions& opts = {});

/// Point of the component given, per factor and eigenvalue group, an
/// orthogonal m_j x m_j frame of the group's eigenspace in adapted
/// coordinates. Identity frames give the base point.
Flag component_point(const DimensionProfile& p, const Chamber& c, const FlagType& type,
                     const std::vector<std::vector<MatrixXd>>& group_frames);

Flag base_point(const DimensionProfile& p, const Chamber& c, const FlagType& type);

/// Orthonormal frame of x in adapted coordinates whose columns lie in single
/// eigenspaces, with the step and group of each column.
struct AdaptedFrame {
  std::vector<MatrixXd> frames;
  std::vector<std::vector<int>> step;
  std::vector<std::vector<int>> group;
};

AdaptedFrame adapted_frame(const Flag& x, const DimensionProfile& p, const Chamber& c);

/// Cartan-orthonormal basis of l^+_x (Plus) or l^-_x (Minus). Throws
/// NotOnComponent if x does not carry profile p.
std::vector<AlgElem> normal_fiber(const Flag& x, const DimensionProfile& p, const Chamber& c, Sign sign);

/// Representatives whose induced vectors span T_x fix(H, w).
std::vector<AlgElem> fix_tangent_basis(const Flag& x, const DimensionProfile& p, const Chamber& c);

struct WhitneyReport {
  bool ok = false;
  int dim_tangent = 0;
  int dim_plus = 0;
  int dim_minus = 0;
  int dim_manifold = 0;
  int rank = 0;
  double sigma_min = 0.0;
};

WhitneyReport whitney_check(const Flag& x, const DimensionProfile& p, const Chamber& c, double eps_rank = 1e-7);

/// n_w: rank of V^+ over the component.
int conley_shift(const DimensionProfile& p);
int unstable_dim(const DimensionProfile& p);
int stable_dim(const DimensionProfile& p);
int fix_dim(const DimensionProfile& p);

FactorStructure factor_structure(const DimensionProfile& p, const Chamber& c, const FlagType& type);

/// e.g. "pt", "RP^1", "Gr(2,4)", "Fl(1,2;3)", products joined with " x ".
std::string describe_structure(const FactorStructure& s, const Chamber& c);

}  // namespace flagflow
