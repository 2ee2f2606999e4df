#include "common.hpp"
#include "flagflow/linalg.hpp"
#include "flagflow/morse.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace flagflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Supported charts: RP^1 and RP^1 x RP^1 by angles in [0, pi); RP^2 and
// Gr(2,3) by the upper-hemisphere polar chart of a line (the normal line
// for planes), c1 = angle from e3 in [0, pi/2], c2 = azimuth.
enum class Chart { RP1, Torus, RP2, Gr23 };

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::RP1: return "RP1";
    case Chart::Torus: return "RP1xRP1";
    case Chart::RP2: return "RP2";
    case Chart::Gr23: return "Gr23";
  }
  return "?";
}

Chart pick_chart(const FlagType& type) {
  const auto& n = type.spec().factors();
  if (type.manifold_dim() <= 2) {
    if (n.size() == 1 && n[0] == 2) return Chart::RP1;
    if (n.size() == 2 && n[0] == 2 && n[1] == 2) return Chart::Torus;
    if (n.size() == 1 && n[0] == 3) return type.dims(0)[0] == 1 ? Chart::RP2 : Chart::Gr23;
  }
  throw Error(ErrorCode::DimensionTooLarge,
              "portrait needs RP^1, RP^2, Gr(2,3) or RP^1 x RP^1; flag manifold has dimension " +
                  std::to_string(type.manifold_dim()));
}

double line_angle(const Eigen::Vector2d& v) {
  double a = std::atan2(v(1), v(0));
  if (a < 0) a += kPi;
  if (a >= kPi - 1e-13) a = 0.0;
  return a;
}

std::pair<double, double> hemisphere(Eigen::Vector3d v) {
  v.normalize();
  if (v(2) < 0) v = -v;
  double phi = std::atan2(v(1), v(0));
  // On the equator v and -v are the same line; keep the azimuth in (-pi/2, pi/2].
  if (std::abs(v(2)) < 1e-13) {
    if (phi > kPi / 2 + 1e-13) phi -= kPi;
    else if (phi <= -kPi / 2 + 1e-13) phi += kPi;
  }
  return {std::acos(std::min(1.0, v(2))), phi};
}

std::pair<double, double> chart_of(Chart chart, const Flag& x) {
  switch (chart) {
    case Chart::RP1: return {line_angle(x.frame(0).col(0)), 0.0};
    case Chart::Torus: return {line_angle(x.frame(0).col(0)), line_angle(x.frame(1).col(0))};
    case Chart::RP2: return hemisphere(x.frame(0).col(0));
    case Chart::Gr23: return hemisphere(x.frame(0).col(2));
  }
  return {0, 0};
}

MatrixXd complete(const Eigen::VectorXd& v) {
  Eigen::HouseholderQR<MatrixXd> qr(v.normalized());
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(v.size(), v.size());
  q.col(0) = v.normalized();
  return q;
}

Eigen::Vector2d unit_angle(double a) { return {std::cos(a), std::sin(a)}; }

Flag chart_point(Chart chart, const FlagType& type, double c1, double c2) {
  switch (chart) {
    case Chart::RP1: return flag_from_basis({complete(unit_angle(c1))}, type);
    case Chart::Torus: return flag_from_basis({complete(unit_angle(c1)), complete(unit_angle(c2))}, type);
    case Chart::RP2:
    case Chart::Gr23: {
      const Eigen::Vector3d v(std::sin(c1) * std::cos(c2), std::sin(c1) * std::sin(c2), std::cos(c1));
      MatrixXd q = complete(v);
      if (chart == Chart::Gr23) {
        MatrixXd b(3, 3);
        b << q.col(1), q.col(2), q.col(0);
        q = b;
      }
      return flag_from_basis({q}, type);
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown chart");
}

std::vector<std::pair<double, double>> initial_grid(Chart chart, int grid) {
  std::vector<std::pair<double, double>> out;
  const double g = grid;
  switch (chart) {
    case Chart::RP1:
      for (int i = 0; i < 2 * grid; ++i) out.emplace_back(kPi * (i + 0.5) / (2 * g), 0.0);
      break;
    case Chart::Torus:
      for (int i = 0; i < grid; ++i)
        for (int k = 0; k < grid; ++k) out.emplace_back(kPi * (i + 0.5) / g, kPi * (k + 0.5) / g);
      break;
    case Chart::RP2:
    case Chart::Gr23:
      for (int i = 0; i < grid; ++i)
        for (int k = 0; k < grid; ++k) out.emplace_back(0.5 * kPi * (i + 0.5) / g, 2 * kPi * (k + 0.5) / g - kPi);
      break;
  }
  return out;
}

// Group (factor, group) whose eigenspace carries a nontrivial flag on the
// component, with the sizes of its nonzero pieces.
struct FreeGroup {
  std::size_t factor;
  int group;
  std::vector<int> pieces;
};

std::vector<FreeGroup> free_groups(const MorseComponent& comp) {
  std::vector<FreeGroup> out;
  for (std::size_t f = 0; f < comp.profile.num_factors(); ++f) {
    const auto& d = comp.profile.table(f);
    for (int j = 0; j < d.rows(); ++j) {
      std::vector<int> pieces;
      for (int i = 0; i < d.cols(); ++i)
        if (d(j, i) > 0) pieces.push_back(d(j, i));
      if (pieces.size() > 1) out.push_back({f, j, pieces});
    }
  }
  return out;
}

std::vector<std::vector<MatrixXd>> identity_frames(const Chamber& c) {
  std::vector<std::vector<MatrixXd>> frames;
  for (const auto& fc : c.factors()) {
    std::vector<MatrixXd> g;
    for (int m : fc.multiplicities) g.push_back(MatrixXd::Identity(m, m));
    frames.push_back(std::move(g));
  }
  return frames;
}

MatrixXd rotation(double a) {
  MatrixXd r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

std::vector<Flag> locus(const MorseComponent& comp, const Chamber& c, int count, std::mt19937_64& rng) {
  const auto fg = free_groups(comp);
  if (fg.empty()) return {comp.base_point};
  std::vector<Flag> out;
  const FlagType& type = comp.base_point.type();
  if (fg.size() == 1 && fg[0].pieces.size() == 2 && fg[0].pieces[0] + fg[0].pieces[1] == 2) {
    // a circle: sweep the line through the 2-dimensional eigenspace
    for (int k = 0; k <= count; ++k) {
      auto frames = identity_frames(c);
      frames[fg[0].factor][static_cast<std::size_t>(fg[0].group)] = rotation(kPi * k / count);
      out.push_back(component_point(comp.profile, c, type, frames));
    }
    return out;
  }
  for (int k = 0; k < count; ++k) out.push_back(random_component_point(comp, c, rng));
  return out;
}

// Candidate frames of one free group whose within-group flag is invariant
// under the nilpotent block. Covers a line or a hyperplane in its eigenspace,
// which is everything a two-dimensional portrait can carry.
std::vector<MatrixXd> invariant_frames(const FreeGroup& g, const MatrixXd& n_block, int count, std::mt19937_64& rng) {
  const int m = static_cast<int>(n_block.rows());
  const bool line = g.pieces.front() == 1;
  const bool hyperplane = g.pieces.back() == 1 && g.pieces.size() == 2;
  if (!line && !hyperplane) return {};
  const double scale = std::max(1.0, n_block.norm());
  const MatrixXd a = line ? n_block : MatrixXd(n_block.transpose());
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * scale) ++rank;
  const MatrixXd ker = svd.matrixV().rightCols(m - rank);

  auto frame_for = [&](const Eigen::VectorXd& v) {
    MatrixXd q = complete(v);
    if (!line) {  // v is the normal of the hyperplane; it goes last
      MatrixXd b(m, m);
      b << q.rightCols(m - 1), q.col(0);
      q = b;
    }
    return q;
  };
  std::vector<MatrixXd> out;
  if (ker.cols() == 1) {
    out.push_back(frame_for(ker.col(0)));
  } else {
    std::normal_distribution<double> normal;
    for (int k = 0; k < count; ++k) {
      Eigen::VectorXd coef(ker.cols());
      for (Eigen::Index i = 0; i < coef.size(); ++i) coef(i) = normal(rng);
      out.push_back(frame_for(ker * coef.normalized()));
    }
  }
  return out;
}

std::vector<Flag> recurrent_points(const MorseComponent& comp, const FlowSpec& fsp, int count, std::mt19937_64& rng) {
  const Chamber& c = fsp.chamber();
  const auto fg = free_groups(comp);
  std::vector<Flag> candidates;
  if (fg.empty()) {
    candidates.push_back(comp.base_point);
  } else {
    const AlgElem n_adapted = c.to_adapted(fsp.nilpotent());
    std::vector<std::vector<MatrixXd>> options;
    for (const auto& g : fg) {
      const FactorChamber& fc = c.factor(g.factor);
      const int off = fc.group_offset(g.group);
      const int m = fc.multiplicities[static_cast<std::size_t>(g.group)];
      options.push_back(invariant_frames(g, n_adapted.block(g.factor).block(off, off, m, m), count, rng));
    }
    std::vector<std::size_t> idx(fg.size(), 0);
    for (;;) {
      auto frames = identity_frames(c);
      bool empty = false;
      for (std::size_t k = 0; k < fg.size(); ++k) {
        if (options[k].empty()) {
          empty = true;
          break;
        }
        frames[fg[k].factor][static_cast<std::size_t>(fg[k].group)] = options[k][idx[k]];
      }
      if (empty) break;
      candidates.push_back(component_point(comp.profile, c, comp.base_point.type(), frames));
      if (static_cast<int>(candidates.size()) >= count) break;
      std::size_t k = 0;
      while (k < fg.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
      if (k == fg.size()) break;
    }
  }
  std::vector<Flag> out;
  for (const auto& x : candidates)
    if (unipotent_fixed(fsp, x)) out.push_back(x);
  return out;
}

}  // namespace

int cmd_portrait(const ProblemConfig& cfg, const fs::path& out, std::ostream& err) {
  return guarded(err, [&] {
    const Chart chart = pick_chart(cfg.flag_type);
    const Analysis a = analyze(cfg);
    const FlowSpec& fsp = a.flow;
    const Chamber& c = fsp.chamber();
    const auto comps = enumerate_components(c, cfg.flag_type);
    const PortraitSettings& ps = cfg.portrait;
    std::mt19937_64 rng(cfg.seed);

    std::ostringstream csv;
    csv << "kind,id,t,c1,c2,label\n";
    auto row = [&](const char* kind, std::size_t id, double t, const Flag& x, const std::string& label) {
      const auto [c1, c2] = chart_of(chart, x);
      csv << kind << ',' << id << ',' << csv_number(t) << ',' << csv_number(c1) << ',' << csv_number(c2) << ','
          << csv_field(label) << '\n';
    };

    json loci = json::array();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const std::string label = comps[k].profile.to_string();
      const auto pts = locus(comps[k], c, ps.locus_points, rng);
      for (const auto& x : pts) row("locus", k, 0.0, x, label);
      const auto rec = recurrent_points(comps[k], fsp, ps.locus_points, rng);
      for (const auto& x : rec) row("recurrent", k, 0.0, x, label);
      loci.push_back(json{{"index", k},
                          {"profile", label},
                          {"dim_fix", comps[k].dim_fix},
                          {"attractor", comps[k].is_attractor()},
                          {"repeller", comps[k].is_repeller()},
                          {"locus_points", pts.size()},
                          {"recurrent_points", rec.size()}});
    }

    // Trajectories. Discrete flows and monodromies step by whole iterates.
    const bool discrete = fsp.mode() == FlowMode::Discrete;
    const int steps = discrete ? std::max(1, static_cast<int>(std::lround(ps.horizon))) : std::max(1, ps.points - 1);
    const double dt = discrete ? 1.0 : ps.horizon / steps;
    std::map<std::string, int> label_counts;
    const auto starts = initial_grid(chart, ps.grid);
    for (std::size_t id = 0; id < starts.size(); ++id) {
      Flag x = chart_point(chart, cfg.flag_type, starts[id].first, starts[id].second);
      const auto limit = classify_limit(fsp, x, cfg.limit_horizon, cfg.tol.limit);
      const std::string label = limit ? limit->to_string() : "none";
      ++label_counts[label];
      for (int s = 0; s <= steps; ++s) {
        if (s > 0) x = flow(fsp, dt, x);
        row("trajectory", id, s * dt, x, label);
      }
    }

    json counts = json::object();
    for (const auto& [label, n] : label_counts) counts[label] = n;
    json summary{{"command", "portrait"},
                 {"mode", mode_name(cfg.mode)},
                 {"chart", chart_name(chart)},
                 {"components", loci},
                 {"trajectories", starts.size()},
                 {"limit_labels", counts},
                 {"status", "ok"}};
    fs::create_directories(out);
    write_file(out / "portrait.csv", csv.str());
    write_json(out / "portrait_summary.json", summary);
    return kExitOk;
  });
}

}  // namespace flagflow::cli
