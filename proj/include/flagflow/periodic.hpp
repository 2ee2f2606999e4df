#pragma once

// Linear equations g'(t) = X(t) g(t) with periodic traceless coefficients:
// monodromy, Morse components of the induced skew flow, and decay checks.

#include "flagflow/dynamics.hpp"
#include "flagflow/lie_core.hpp"
#include "flagflow/morse.hpp"

#include <string>
#include <vector>

namespace flagflow {

/// cos_block * cos(2 pi k t / T) + sin_block * sin(2 pi k t / T) in one factor.
struct TrigTerm {
  std::size_t factor = 0;
  int harmonic = 0;
  MatrixXd cos_block;
  MatrixXd sin_block;
};

class PeriodicSpec {
 public:
  PeriodicSpec() = default;
  PeriodicSpec(SemisimpleSpec spec, double period, std::vector<TrigTerm> terms);

  /// Constant coefficients X(t) = x.
  static PeriodicSpec constant(const AlgElem& x, double period);

  const SemisimpleSpec& spec() const { return spec_; }
  double period() const { return period_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

  AlgElem coefficient(double t) const;

 private:
  SemisimpleSpec spec_;
  double period_ = 1.0;
  std::vector<TrigTerm> terms_;
};

/// Fundamental solution at time t >= 0 by classical RK4 with `steps` steps.
/// `det_drift` receives max |det - 1| over the grid.
GroupElem fundamental_solution(const PeriodicSpec& ps, double t, int steps, double* det_drift = nullptr);

struct MonodromyResult {
  GroupElem monodromy;
  MultiplicativeJordan jordan;
  Chamber chamber;
  double richardson_diff = 0.0;  // relative change when the step is halved
  double det_drift = 0.0;
  int steps = 0;
};

/// Throws StepTooCoarse when steps < 100, when halving the step changes M by
/// more than 1e-6, or when the determinant drifts by more than 1e-8.
MonodromyResult monodromy(const PeriodicSpec& ps, int steps = 1000);

struct PeriodicComponent {
  MorseComponent component;  // fiber over the phase 0 section
  std::string topology;      // "S^1 x <fiber>"
};

std::vector<PeriodicComponent> periodic_components(const PeriodicSpec& ps, const FlagType& type, int steps = 1000);

/// Decay verification along the skew flow. Times are real; the verdict uses
/// a horizon rounded up to whole periods and mu = mu_gap(monodromy) / T.
DecayReport periodic_decay_verify(const PeriodicSpec& ps, const MorseComponent& comp, Sign sign,
                                  const DecayOptions& opts = {}, int steps = 1000);

}  // namespace flagflow
