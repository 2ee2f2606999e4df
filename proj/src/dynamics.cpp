#include "flagflow/dynamics.hpp"
#include "flagflow/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <set>

namespace flagflow {

namespace {

// Zero every entry coupling different eigenvalue groups.
MatrixXd mask_block_diagonal(const MatrixXd& m, const FactorChamber& f) {
  MatrixXd out = MatrixXd::Zero(m.rows(), m.cols());
  for (int j = 0; j < f.num_groups(); ++j) {
    const int o = f.group_offset(j);
    const int s = f.multiplicities[static_cast<std::size_t>(j)];
    out.block(o, o, s, s) = m.block(o, o, s, s);
  }
  return out;
}

// Keep only root coordinates of n^{sign}_H.
MatrixXd mask_roots(const MatrixXd& m, const FactorChamber& f, Sign sign) {
  MatrixXd out = MatrixXd::Zero(m.rows(), m.cols());
  for (int b = 0; b < f.dim(); ++b) {
    for (int a = 0; a < f.dim(); ++a) {
      const int ga = f.group_of(a), gb = f.group_of(b);
      if (sign == Sign::Plus ? ga < gb : ga > gb) out(a, b) = m(a, b);
    }
  }
  return out;
}

std::vector<MatrixXd> adapted_blocks(const Chamber& c, const AlgElem& x) {
  std::vector<MatrixXd> out;
  const AlgElem a = c.to_adapted(x);
  for (std::size_t f = 0; f < c.num_factors(); ++f) out.push_back(mask_block_diagonal(a.block(f), c.factor(f)));
  return out;
}

}  // namespace

FlowSpec FlowSpec::continuous(const AlgElem& x, const JordanOptions& opts) {
  FlowSpec fs;
  fs.mode_ = FlowMode::Continuous;
  fs.generator_ = x;
  fs.additive_ = additive_jordan(x, opts);
  fs.hyperbolic_ = fs.additive_->hyperbolic;
  fs.nilpotent_ = fs.additive_->nilpotent;
  fs.chamber_ = chamber_normalize(fs.hyperbolic_, opts);
  fs.elliptic_adapted_ = adapted_blocks(fs.chamber_, fs.additive_->elliptic);
  fs.nilpotent_adapted_ = adapted_blocks(fs.chamber_, fs.nilpotent_);
  return fs;
}

FlowSpec FlowSpec::discrete(const GroupElem& g, const JordanOptions& opts) {
  FlowSpec fs;
  fs.mode_ = FlowMode::Discrete;
  fs.group_generator_ = g;
  fs.multiplicative_ = multiplicative_jordan(g, opts);
  fs.hyperbolic_ = fs.multiplicative_->hyperbolic_log;
  fs.nilpotent_ = fs.multiplicative_->nilpotent_log;
  fs.chamber_ = chamber_normalize(fs.hyperbolic_, opts);
  for (std::size_t f = 0; f < fs.chamber_.num_factors(); ++f) {
    const FactorChamber& fc = fs.chamber_.factor(f);
    const MatrixXd e = fc.conjugator_inv * fs.multiplicative_->elliptic.block(f) * fc.conjugator;
    fs.elliptic_adapted_.push_back(mask_block_diagonal(e, fc));
  }
  fs.nilpotent_adapted_ = adapted_blocks(fs.chamber_, fs.nilpotent_);
  return fs;
}

GroupElem FlowSpec::at(double t) const {
  if (mode_ == FlowMode::Discrete) return group_generator_.pow(std::lround(t));
  return exp(t * generator_);
}

AlgElem FlowSpec::transport_fiber(const AlgElem& y, double t, Sign sign) const {
  const AlgElem ya = chamber_.to_adapted(y);
  std::vector<MatrixXd> out;
  for (std::size_t f = 0; f < chamber_.num_factors(); ++f) {
    const FactorChamber& fc = chamber_.factor(f);
    const MatrixXd z = mask_roots(ya.block(f), fc, sign);
    MatrixXd e;
    if (mode_ == FlowMode::Continuous) {
      e = (t * elliptic_adapted_[f]).exp();
    } else {
      const long k = std::lround(t);
      MatrixXd base = k < 0 ? MatrixXd(elliptic_adapted_[f].inverse()) : elliptic_adapted_[f];
      e = MatrixXd::Identity(fc.dim(), fc.dim());
      for (long i = 0; i < std::labs(k); ++i) e = e * base;
    }
    const MatrixXd u = (t * nilpotent_adapted_[f]).exp();
    const MatrixXd g = e * u;
    MatrixXd moved = mask_roots(g * z * g.inverse(), fc, sign);
    const Eigen::VectorXd lam = fc.diagonal();
    for (int b = 0; b < fc.dim(); ++b)
      for (int a = 0; a < fc.dim(); ++a) moved(a, b) *= std::exp(t * (lam(a) - lam(b)));
    out.push_back(fc.conjugator * moved * fc.conjugator_inv);
  }
  return AlgElem(std::move(out), kNoCheck);
}

Flag flow(const FlowSpec& fs, double t, const Flag& x) {
  if (t == 0.0) return x;
  std::vector<MatrixXd> frames = x.frames();
  std::vector<MatrixXd> step;
  long count = 0;
  if (fs.mode() == FlowMode::Continuous) {
    const double scale = std::max(1.0, fs.generator().norm());
    count = std::max(1L, static_cast<long>(std::ceil(std::abs(t) * scale / 2.0)));
    step = exp((t / static_cast<double>(count)) * fs.generator()).blocks();
  } else {
    const long k = std::lround(t);
    count = std::labs(k);
    step = (k < 0 ? fs.group_generator().inverse() : fs.group_generator()).blocks();
  }
  for (long s = 0; s < count; ++s) {
    for (std::size_t f = 0; f < frames.size(); ++f) {
      MatrixXd m = step[f] * frames[f];
      for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j).normalize();
      frames[f] = linalg::positive_qr(m);
    }
  }
  return flag_from_basis(frames, x.type());
}

std::vector<double> decay_grid(FlowMode mode, double horizon, int grid) {
  std::vector<double> times;
  const double lo = horizon / 10.0;
  for (int k = 0; k < grid; ++k) {
    const double frac = grid > 1 ? static_cast<double>(k) / (grid - 1) : 1.0;
    times.push_back(lo * std::pow(horizon / lo, frac));
  }
  if (mode == FlowMode::Discrete) {
    std::set<long> ints;
    for (double t : times) ints.insert(std::max(1L, std::lround(t)));
    times.assign(ints.begin(), ints.end());
  }
  return times;
}

Flag random_component_point(const MorseComponent& comp, const Chamber& c, std::mt19937_64& rng) {
  std::vector<std::vector<MatrixXd>> frames;
  for (const auto& fc : c.factors()) {
    std::vector<MatrixXd> g;
    for (int m : fc.multiplicities) g.push_back(linalg::random_orthogonal(m, rng));
    frames.push_back(std::move(g));
  }
  return component_point(comp.profile, c, comp.base_point.type(), frames);
}

void fit_decay_line(DecaySample& s) {
  const std::size_t n = s.times.size();
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += s.times[i];
    my += s.log_norms[i];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (s.times[i] - mt) * (s.times[i] - mt);
    sty += (s.times[i] - mt) * (s.log_norms[i] - my);
  }
  s.slope = stt > 0 ? sty / stt : 0.0;
  s.intercept = my - s.slope * mt;
  s.rate = -s.slope;
  s.constant = std::exp(s.intercept);
  s.residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.residual = std::max(s.residual, std::abs(s.intercept + s.slope * s.times[i] - s.log_norms[i]));
  }
}

DecayReport decay_verify(const FlowSpec& fs, const MorseComponent& comp, Sign sign, const DecayOptions& opts) {
  const Chamber& c = fs.chamber();
  DecayReport report;
  report.mu = mu_gap(c);
  report.eps_slope = opts.slope_fraction * report.mu;
  report.sign = sign;
  const int fiber_dim = sign == Sign::Plus ? comp.dim_vplus : comp.dim_vminus;
  if (fiber_dim == 0) throw Error(ErrorCode::EmptyFiber, "component has no normal directions of this sign");

  const std::vector<double> times = decay_grid(fs.mode(), opts.horizon, opts.grid);
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
    Flag xt = x;
    double prev = 0.0;
    for (double t : times) {
      xt = flow(fs, direction * (t - prev), xt);
      prev = t;
      const AlgElem yt = fs.transport_fiber(y, direction * t, sign);
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

InvarianceReport fiber_invariance_check(const FlowSpec& fs, const MorseComponent& comp,
                                        const std::vector<double>& times, int samples, std::uint64_t seed,
                                        double tol) {
  const Chamber& c = fs.chamber();
  std::mt19937_64 rng(seed);
  InvarianceReport report;
  for (int s = 0; s < samples; ++s) {
    const Flag x = random_component_point(comp, c, rng);
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const auto basis = normal_fiber(x, comp.profile, c, sign);
      if (basis.empty()) continue;
      for (double t : times) {
        const GroupElem g = fs.at(t);
        const Flag xt = act(g, x);
        const auto target = normal_fiber(xt, comp.profile, c, sign);
        MatrixXd span(xt.type().manifold_dim(), static_cast<Eigen::Index>(target.size()));
        for (std::size_t k = 0; k < target.size(); ++k) {
          span.col(static_cast<Eigen::Index>(k)) = tangent_coordinates(induced_vector(target[k], xt));
        }
        const MatrixXd q = linalg::orthonormal_range(span, static_cast<int>(target.size()));
        for (const auto& y : basis) {
          const Eigen::VectorXd v = tangent_coordinates(induced_vector(adjoint(g, y), xt));
          const Eigen::VectorXd unit = v / v.norm();
          const double r = (unit - q * (q.transpose() * unit)).norm();
          report.max_residual = std::max(report.max_residual, r);
        }
      }
    }
  }
  report.ok = report.max_residual <= tol;
  return report;
}

std::optional<DimensionProfile> classify_limit(const FlowSpec& fs, const Flag& x, double horizon, double tol) {
  const Flag xt = flow(fs, horizon, x);
  return classify_flag(xt, fs.chamber(), FixOptions{tol, tol});
}

bool unipotent_fixed(const FlowSpec& fs, const Flag& x, double tol) {
  const AlgElem& n = fs.nilpotent();
  for (std::size_t f = 0; f < n.num_factors(); ++f) {
    const MatrixXd& nb = n.block(f);
    const double scale = std::max(1.0, nb.norm());
    for (int d : x.type().dims(f)) {
      const MatrixXd basis = x.frame(f).leftCols(d);
      const MatrixXd leak = nb * basis - basis * (basis.transpose() * nb * basis);
      if (leak.norm() > tol * scale) return false;
    }
  }
  return true;
}

}  // namespace flagflow
