#pragma once

// Translation flows g^t on flag manifolds and numerical verification of the
// normal hyperbolicity of their minimal Morse components.

#include "flagflow/flag_geometry.hpp"
#include "flagflow/lie_core.hpp"
#include "flagflow/morse.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace flagflow {

enum class FlowMode { Continuous, Discrete };

/// g^t = exp(tX) for real t, or g^t for integer t, together with its Jordan
/// data and the Weyl chamber of the hyperbolic part.
class FlowSpec {
 public:
  static FlowSpec continuous(const AlgElem& x, const JordanOptions& opts = {});
  static FlowSpec discrete(const GroupElem& g, const JordanOptions& opts = {});

  FlowMode mode() const { return mode_; }
  SemisimpleSpec spec() const { return chamber_.spec(); }
  const Chamber& chamber() const { return chamber_; }
  const AlgElem& hyperbolic() const { return hyperbolic_; }
  const AlgElem& nilpotent() const { return nilpotent_; }
  const std::optional<AdditiveJordan>& additive() const { return additive_; }
  const std::optional<MultiplicativeJordan>& multiplicative() const { return multiplicative_; }
  const AlgElem& generator() const { return generator_; }
  const GroupElem& group_generator() const { return group_generator_; }

  /// g^t as a matrix. Discrete mode rounds t to the nearest integer.
  GroupElem at(double t) const;

  /// Ad(g^t) Y for Y in n^{sign}_H. Evaluated through the commuting Jordan
  /// factors in adapted coordinates, where the hyperbolic factor acts by the
  /// exact weights exp(t alpha(H)) on root coordinates; this keeps the
  /// relative accuracy of exponentially small results.
  AlgElem transport_fiber(const AlgElem& y, double t, Sign sign) const;

 private:
  FlowMode mode_ = FlowMode::Continuous;
  AlgElem generator_;
  GroupElem group_generator_;
  std::optional<AdditiveJordan> additive_;
  std::optional<MultiplicativeJordan> multiplicative_;
  AlgElem hyperbolic_;
  AlgElem nilpotent_;
  Chamber chamber_;
  // Adapted coordinates, masked to be block diagonal by eigenvalue group.
  std::vector<MatrixXd> elliptic_adapted_;  // log in continuous mode, the element in discrete mode
  std::vector<MatrixXd> nilpotent_adapted_;
};

/// x -> g^t x, evaluated in short re-orthonormalized steps.
Flag flow(const FlowSpec& fs, double t, const Flag& x);

struct DecayOptions {
  int samples = 8;
  double horizon = 10.0;  // continuous default; 20 for discrete flows
  int grid = 50;
  double slope_fraction = 0.1;  // eps_slope = slope_fraction * mu
  std::uint64_t seed = 1;
};

struct DecaySample {
  std::vector<double> times;        // |t|, strictly increasing
  std::vector<double> log_norms;    // log(|g^t v| / |v|)
  std::vector<double> rep_log_norms;  // log(|Ad(g^t) Y| / |v|)
  double slope = 0.0;        // least-squares slope of log_norms vs times
  double intercept = 0.0;    // log c
  double rate = 0.0;         // -slope
  double constant = 0.0;     // c = exp(intercept)
  double residual = 0.0;     // max |fit - data|
  double final_slope = 0.0;  // log_norms.back() / times.back()
  bool pass = false;
};

struct DecayReport {
  double mu = 0.0;
  double eps_slope = 0.0;
  Sign sign = Sign::Minus;
  std::vector<DecaySample> samples;
  bool all_pass = false;
};

/// Samples points on the component and unit vectors of the fiber V^{sign};
/// follows |g^t v| forward in time for Minus and backward for Plus. A sample
/// passes when its final slope is <= -mu + eps_slope.
DecayReport decay_verify(const FlowSpec& fs, const MorseComponent& comp, Sign sign, const DecayOptions& opts = {});

/// Least-squares line through (times, log_norms); fills slope, intercept,
/// rate, constant and residual.
void fit_decay_line(DecaySample& s);

/// Times used by decay_verify: `grid` log-spaced values in [horizon/10,
/// horizon]; integers without repetition in discrete mode.
std::vector<double> decay_grid(FlowMode mode, double horizon, int grid);

struct InvarianceReport {
  bool ok = false;
  double max_residual = 0.0;
};

/// Pushes the fibers at sampled points forward by g^t for each t and checks
/// that they land in the fibers at the image points.
InvarianceReport fiber_invariance_check(const FlowSpec& fs, const MorseComponent& comp,
                                        const std::vector<double>& times = {1.0, 2.5}, int samples = 3,
                                        std::uint64_t seed = 7, double tol = 1e-9);

/// Random point of a component: random orthogonal frames per eigenvalue group.
Flag random_component_point(const MorseComponent& comp, const Chamber& c, std::mt19937_64& rng);

/// Profile reached by x after time T, classified at relaxed tolerance.
std::optional<DimensionProfile> classify_limit(const FlowSpec& fs, const Flag& x, double horizon,
                                               double tol = 1e-4);

/// True when every step of x is invariant under N, i.e. x is fixed by u^t.
bool unipotent_fixed(const FlowSpec& fs, const Flag& x, double tol = 1e-7);

}  // namespace flagflow
