#include "flagflow/periodic.hpp"
#include "flagflow/linalg.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace flagflow {

PeriodicSpec::PeriodicSpec(SemisimpleSpec spec, double period, std::vector<TrigTerm> terms)
    : spec_(std::move(spec)), period_(period), terms_(std::move(terms)) {
  if (!(period_ > 0)) throw Error(ErrorCode::InvalidConfig, "period must be positive");
  for (auto& term : terms_) {
    if (term.factor >= spec_.num_factors()) throw Error(ErrorCode::SpecMismatch, "term refers to a missing factor");
    if (term.harmonic < 0) throw Error(ErrorCode::InvalidConfig, "harmonics must be nonnegative");
    const int n = spec_.size(term.factor);
    if (term.cos_block.size() == 0) term.cos_block = MatrixXd::Zero(n, n);
    if (term.sin_block.size() == 0) term.sin_block = MatrixXd::Zero(n, n);
    for (const MatrixXd* b : {&term.cos_block, &term.sin_block}) {
      if (b->rows() != n || b->cols() != n) throw Error(ErrorCode::SpecMismatch, "coefficient block has wrong size");
      if (std::abs(b->trace()) > 1e-9 * std::max(1.0, b->norm())) {
        throw Error(ErrorCode::InvalidElement, "coefficient blocks must be traceless");
      }
    }
  }
}

PeriodicSpec PeriodicSpec::constant(const AlgElem& x, double period) {
  std::vector<TrigTerm> terms;
  for (std::size_t f = 0; f < x.num_factors(); ++f) {
    terms.push_back(TrigTerm{f, 0, x.block(f), MatrixXd()});
  }
  return PeriodicSpec(x.spec(), period, std::move(terms));
}

AlgElem PeriodicSpec::coefficient(double t) const {
  std::vector<MatrixXd> blocks;
  for (int n : spec_.factors()) blocks.push_back(MatrixXd::Zero(n, n));
  const double w = 2.0 * std::numbers::pi / period_;
  for (const auto& term : terms_) {
    const double arg = w * term.harmonic * t;
    blocks[term.factor] += std::cos(arg) * term.cos_block;
    if (term.harmonic != 0) blocks[term.factor] += std::sin(arg) * term.sin_block;
  }
  return AlgElem(std::move(blocks), kNoCheck);
}

GroupElem fundamental_solution(const PeriodicSpec& ps, double t, int steps, double* det_drift) {
  std::vector<MatrixXd> g;
  for (int n : ps.spec().factors()) g.push_back(MatrixXd::Identity(n, n));
  double drift = 0.0;
  if (t > 0 && steps > 0) {
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
      const double t0 = s * h;
      const AlgElem x0 = ps.coefficient(t0);
      const AlgElem xm = ps.coefficient(t0 + 0.5 * h);
      const AlgElem x1 = ps.coefficient(t0 + h);
      for (std::size_t f = 0; f < g.size(); ++f) {
        const MatrixXd& y = g[f];
        const MatrixXd k1 = x0.block(f) * y;
        const MatrixXd k2 = xm.block(f) * (y + 0.5 * h * k1);
        const MatrixXd k3 = xm.block(f) * (y + 0.5 * h * k2);
        const MatrixXd k4 = x1.block(f) * (y + h * k3);
        g[f] = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        drift = std::max(drift, std::abs(g[f].determinant() - 1.0));
      }
    }
  }
  if (det_drift) *det_drift = drift;
  return GroupElem(std::move(g), kNoCheck);
}

MonodromyResult monodromy(const PeriodicSpec& ps, int steps) {
  if (steps < 100) throw Error(ErrorCode::StepTooCoarse, "at least 100 steps per period required");
  double drift_coarse = 0.0, drift_fine = 0.0;
  const GroupElem coarse = fundamental_solution(ps, ps.period(), steps, &drift_coarse);
  const GroupElem fine = fundamental_solution(ps, ps.period(), 2 * steps, &drift_fine);

  MonodromyResult r;
  r.steps = 2 * steps;
  r.det_drift = std::max(drift_coarse, drift_fine);
  for (std::size_t f = 0; f < fine.num_factors(); ++f) {
    const double scale = std::max(1.0, fine.block(f).norm());
    r.richardson_diff = std::max(r.richardson_diff, (coarse.block(f) - fine.block(f)).norm() / scale);
  }
  if (r.richardson_diff > 1e-6) throw Error(ErrorCode::StepTooCoarse, "halving the step changes the monodromy");
  if (r.det_drift > 1e-8) throw Error(ErrorCode::StepTooCoarse, "determinant drift exceeds 1e-8");
  r.monodromy = fine;
  r.jordan = multiplicative_jordan(fine);
  r.chamber = chamber_normalize(r.jordan.hyperbolic_log);
  return r;
}

std::vector<PeriodicComponent> periodic_components(const PeriodicSpec& ps, const FlagType& type, int steps) {
  const MonodromyResult m = monodromy(ps, steps);
  std::vector<PeriodicComponent> out;
  for (auto& comp : enumerate_components(m.chamber, type)) {
    const std::string fiber = describe_structure(comp.factor_structure, m.chamber);
    out.push_back(PeriodicComponent{std::move(comp), "S^1 x " + fiber});
  }
  return out;
}

DecayReport periodic_decay_verify(const PeriodicSpec& ps, const MorseComponent& comp, Sign sign,
                                  const DecayOptions& opts, int steps) {
  const MonodromyResult m = monodromy(ps, steps);
  const FlowSpec discrete = FlowSpec::discrete(m.monodromy);
  const Chamber& c = discrete.chamber();
  const double period = ps.period();

  DecayReport report;
  report.mu = mu_gap(c) / period;
  report.eps_slope = opts.slope_fraction * report.mu;
  report.sign = sign;
  const int fiber_dim = sign == Sign::Plus ? comp.dim_vplus : comp.dim_vminus;
  if (fiber_dim == 0) throw Error(ErrorCode::EmptyFiber, "component has no normal directions of this sign");

  const double periods = std::max(1.0, std::ceil(opts.horizon / period - 1e-9));
  const std::vector<double> times = decay_grid(FlowMode::Continuous, periods * period, opts.grid);
  const double direction = sign == Sign::Minus ? 1.0 : -1.0;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  report.all_pass = true;
  for (int s = 0; s < opts.samples; ++s) {
    const Flag x = random_component_point(comp, c, rng);
    const auto basis = normal_fiber(x, comp.profile, c, sign);
    Eigen::VectorXd coef(static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index k = 0; k < coef.size(); ++k) coef(k) = normal(rng);
    coef.normalize();
    AlgElem y = AlgElem::zero(c.spec());
    for (std::size_t k = 0; k < basis.size(); ++k) y += coef(static_cast<Eigen::Index>(k)) * basis[k];
    const double n0 = tangent_norm(induced_vector(y, x));

    DecaySample sample;
    sample.times = times;
    for (double t : times) {
      // Phi(k T + s) = Phi(s) M^k with 0 <= s < T.
      const double tau = direction * t;
      double k = std::floor(tau / period);
      double phase = tau - k * period;
      if (period - phase < 1e-9 * period) {
        k += 1.0;
        phase = 0.0;
      }
      const int phase_steps = static_cast<int>(std::ceil(steps * phase / period));
      const GroupElem phi = fundamental_solution(ps, phase, phase_steps);
      const Flag xk = flow(discrete, k, x);
      const Flag xt = act(phi, xk);
      const AlgElem yt = adjoint(phi, discrete.transport_fiber(y, k, sign));
      sample.log_norms.push_back(std::log(tangent_norm(induced_vector(yt, xt)) / n0));
      sample.rep_log_norms.push_back(std::log(cartan_norm(yt) / n0));
    }
    fit_decay_line(sample);
    sample.final_slope = sample.log_norms.back() / sample.times.back();
    sample.pass = sample.final_slope <= -report.mu + report.eps_slope;
    report.all_pass = report.all_pass && sample.pass;
    report.samples.push_back(std::move(sample));
  }
  return report;
}

}  // namespace flagflow
