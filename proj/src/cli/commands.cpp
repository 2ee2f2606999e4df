#include "flagflow/cli.hpp"
#include "common.hpp"
#include "flagflow/dynamics.hpp"
#include "flagflow/morse.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace flagflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

json chamber_json(const Chamber& c) {
  json eig = json::array(), mult = json::array();
  for (const auto& f : c.factors()) {
    eig.push_back(f.eigenvalues);
    mult.push_back(f.multiplicities);
  }
  return json{{"eigenvalues", eig}, {"multiplicities", mult}};
}

// mu for flows; periodic flows report per unit time.
std::optional<double> try_mu(const Analysis& a, const ProblemConfig& cfg) {
  try {
    double mu = mu_gap(a.flow.chamber());
    if (cfg.mode == Mode::Periodic) mu /= cfg.periodic->period();
    return mu;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPositiveRoot) throw;
    return std::nullopt;
  }
}

std::string structure_string(const MorseComponent& comp, const Chamber& c) {
  return describe_structure(comp.factor_structure, c);
}

std::string components_csv(const std::vector<MorseComponent>& comps, const Chamber& c,
                           const std::vector<std::string>* topology) {
  std::ostringstream csv;
  csv << "index,profile,dim_fix,n_w,dim_vminus,structure,attractor,repeller";
  if (topology) csv << ",topology";
  csv << '\n';
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& comp = comps[k];
    csv << k << ',' << csv_field(comp.profile.to_string()) << ',' << comp.dim_fix << ',' << comp.dim_vplus << ','
        << comp.dim_vminus << ',' << csv_field(structure_string(comp, c)) << ',' << (comp.is_attractor() ? 1 : 0)
        << ',' << (comp.is_repeller() ? 1 : 0);
    if (topology) csv << ',' << csv_field((*topology)[k]);
    csv << '\n';
  }
  return csv.str();
}

json components_json(const std::vector<MorseComponent>& comps, const Chamber& c) {
  json rows = json::array();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& comp = comps[k];
    rows.push_back(json{{"index", k},
                        {"profile", comp.profile.to_string()},
                        {"dim_fix", comp.dim_fix},
                        {"n_w", comp.dim_vplus},
                        {"dim_vminus", comp.dim_vminus},
                        {"structure", structure_string(comp, c)},
                        {"attractor", comp.is_attractor()},
                        {"repeller", comp.is_repeller()}});
  }
  return rows;
}

struct DecayRun {
  std::string csv;
  json summary = json::array();
  bool all_pass = true;
};

DecayRun run_decay(const ProblemConfig& cfg, const Analysis& a, const std::vector<MorseComponent>& comps) {
  DecayOptions opts;
  opts.samples = cfg.samples;
  opts.horizon = cfg.horizon;
  opts.grid = cfg.grid;
  opts.slope_fraction = cfg.slope_fraction;
  opts.seed = cfg.seed;

  DecayRun run;
  std::ostringstream csv;
  csv << "component,sign,sample,t,log_norm\n";
  for (std::size_t k = 0; k < comps.size(); ++k) {
    for (Sign sign : {Sign::Minus, Sign::Plus}) {
      const int dim = sign == Sign::Plus ? comps[k].dim_vplus : comps[k].dim_vminus;
      if (dim == 0) continue;
      const DecayReport r = cfg.mode == Mode::Periodic
                                ? periodic_decay_verify(*cfg.periodic, comps[k], sign, opts, cfg.periodic_steps)
                                : decay_verify(a.flow, comps[k], sign, opts);
      json samples = json::array();
      for (std::size_t s = 0; s < r.samples.size(); ++s) {
        const DecaySample& ds = r.samples[s];
        for (std::size_t i = 0; i < ds.times.size(); ++i) {
          csv << k << ',' << to_string(sign) << ',' << s << ',' << csv_number(ds.times[i]) << ','
              << csv_number(ds.log_norms[i]) << '\n';
        }
        samples.push_back(json{{"sample", s},
                               {"lambda_emp", ds.rate},
                               {"c", ds.constant},
                               {"final_slope", ds.final_slope},
                               {"fit_residual", ds.residual},
                               {"pass", ds.pass}});
      }
      run.all_pass = run.all_pass && r.all_pass;
      run.summary.push_back(json{{"component", k},
                                 {"profile", comps[k].profile.to_string()},
                                 {"sign", to_string(sign)},
                                 {"mu", r.mu},
                                 {"eps_slope", r.eps_slope},
                                 {"pass", r.all_pass},
                                 {"samples", samples}});
    }
  }
  run.csv = csv.str();
  return run;
}

}  // namespace

int cmd_decompose(const ProblemConfig& cfg, const fs::path& out, std::ostream& err) {
  return guarded(err, [&] {
    const Analysis a = analyze(cfg);
    std::ostringstream csv;
    csv << "part,factor,row,col,value\n";
    json summary{{"command", "decompose"}, {"mode", mode_name(cfg.mode)}};
    if (cfg.mode == Mode::Continuous) {
      const AdditiveJordan& j = *a.flow.additive();
      matrix_rows(csv, "X", a.flow.generator());
      matrix_rows(csv, "E", j.elliptic);
      matrix_rows(csv, "H", j.hyperbolic);
      matrix_rows(csv, "N", j.nilpotent);
      summary["E"] = blocks_json(j.elliptic);
      summary["H"] = blocks_json(j.hyperbolic);
      summary["N"] = blocks_json(j.nilpotent);
    } else {
      const MultiplicativeJordan& j = *a.flow.multiplicative();
      matrix_rows(csv, "g", a.flow.group_generator());
      matrix_rows(csv, "e", j.elliptic);
      matrix_rows(csv, "h", j.hyperbolic);
      matrix_rows(csv, "u", j.unipotent);
      matrix_rows(csv, "H", j.hyperbolic_log);
      matrix_rows(csv, "N", j.nilpotent_log);
      summary["e"] = blocks_json(j.elliptic);
      summary["H"] = blocks_json(j.hyperbolic_log);
      summary["N"] = blocks_json(j.nilpotent_log);
      if (a.monodromy) {
        summary["monodromy"] = blocks_json(a.monodromy->monodromy);
        summary["richardson_diff"] = a.monodromy->richardson_diff;
        summary["det_drift"] = a.monodromy->det_drift;
      }
    }
    std::vector<MatrixXd> conj;
    for (const auto& f : a.flow.chamber().factors()) conj.push_back(f.conjugator);
    matrix_rows(csv, "V", BlockMatrix(conj));
    summary["chamber"] = chamber_json(a.flow.chamber());
    json warnings = json::array();
    if (const auto mu = try_mu(a, cfg)) {
      summary["mu"] = *mu;
    } else {
      summary["mu"] = nullptr;
      warnings.push_back("NoPositiveRoot: H vanishes in every factor");
      err << "flagflow: warning: NoPositiveRoot, H vanishes in every factor\n";
    }
    summary["warnings"] = warnings;
    summary["status"] = "ok";
    fs::create_directories(out);
    write_file(out / "decompose.csv", csv.str());
    write_json(out / "decompose_summary.json", summary);
    return kExitOk;
  });
}

int cmd_components(const ProblemConfig& cfg, const fs::path& out, std::ostream& err) {
  return guarded(err, [&] {
    const Analysis a = analyze(cfg);
    const Chamber& c = a.flow.chamber();
    const auto comps = enumerate_components(c, cfg.flag_type);
    json summary{{"command", "components"},
                 {"mode", mode_name(cfg.mode)},
                 {"count", comps.size()},
                 {"manifold_dim", cfg.flag_type.manifold_dim()},
                 {"components", components_json(comps, c)},
                 {"status", "ok"}};
    fs::create_directories(out);
    write_file(out / "components.csv", components_csv(comps, c, nullptr));
    write_json(out / "components_summary.json", summary);
    return kExitOk;
  });
}

int cmd_decay(const ProblemConfig& cfg, const fs::path& out, std::ostream& err) {
  return guarded(err, [&] {
    const Analysis a = analyze(cfg);
    const Chamber& c = a.flow.chamber();
    if (!try_mu(a, cfg)) throw Error(ErrorCode::NoPositiveRoot, "H vanishes in every factor; nothing to verify");
    const auto comps = enumerate_components(c, cfg.flag_type);
    const DecayRun run = run_decay(cfg, a, comps);
    json summary{{"command", "decay"},
                 {"mode", mode_name(cfg.mode)},
                 {"reports", run.summary},
                 {"pass", run.all_pass},
                 {"status", run.all_pass ? "ok" : "verification_failed"}};
    fs::create_directories(out);
    write_file(out / "decay.csv", run.csv);
    write_json(out / "decay_summary.json", summary);
    if (!run.all_pass) {
      err << "flagflow: decay verification failed\n";
      return kExitVerification;
    }
    return kExitOk;
  });
}

int cmd_periodic(const ProblemConfig& cfg, const fs::path& out, std::ostream& err) {
  if (cfg.mode != Mode::Periodic) {
    err << "flagflow: periodic command requires mode \"periodic\"\n";
    return kExitPrecondition;
  }
  return guarded(err, [&] {
    const Analysis a = analyze(cfg);
    const MonodromyResult& m = *a.monodromy;
    const Chamber& c = a.flow.chamber();
    const auto comps = enumerate_components(c, cfg.flag_type);
    std::vector<std::string> topology;
    for (const auto& comp : comps) topology.push_back("S^1 x " + describe_structure(comp.factor_structure, c));

    json summary{{"command", "periodic"},
                 {"period", cfg.periodic->period()},
                 {"monodromy", blocks_json(m.monodromy)},
                 {"richardson_diff", m.richardson_diff},
                 {"det_drift", m.det_drift},
                 {"e", blocks_json(m.jordan.elliptic)},
                 {"H", blocks_json(m.jordan.hyperbolic_log)},
                 {"N", blocks_json(m.jordan.nilpotent_log)},
                 {"chamber", chamber_json(c)},
                 {"components", components_json(comps, c)}};
    bool pass = true;
    if (const auto mu = try_mu(a, cfg)) {
      summary["mu"] = *mu;
      const DecayRun run = run_decay(cfg, a, comps);
      summary["decay"] = run.summary;
      pass = run.all_pass;
    } else {
      summary["mu"] = nullptr;
      summary["decay"] = json::array();
      summary["warnings"] = json::array({"NoPositiveRoot: monodromy has no hyperbolic part"});
    }
    summary["pass"] = pass;
    summary["status"] = pass ? "ok" : "verification_failed";
    fs::create_directories(out);
    write_file(out / "periodic.csv", components_csv(comps, c, &topology));
    write_json(out / "periodic_summary.json", summary);
    if (!pass) {
      err << "flagflow: decay verification failed\n";
      return kExitVerification;
    }
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morse decompositions and normal hyperbolicity of translation flows on flag manifolds", "flagflow"};
  std::string command, config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  app.add_option("command", command, "decompose | components | decay | portrait | periodic")
      ->required()
      ->check(CLI::IsMember({"decompose", "components", "decay", "portrait", "periodic"}));
  app.add_option("config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed (overrides config)");
  app.add_option("--tol", tol, "algebraic tolerance (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitPrecondition;
  }

  ProblemConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    err << "flagflow: " << e.what() << '\n';
    return kExitPrecondition;
  }
  if (seed) cfg.seed = *seed;
  if (tol) {
    if (!(*tol > 0)) {
      err << "flagflow: --tol must be positive\n";
      return kExitPrecondition;
    }
    cfg.tol.num = *tol;
  }

  if (command == "decompose") return cmd_decompose(cfg, out_dir, err);
  if (command == "components") return cmd_components(cfg, out_dir, err);
  if (command == "decay") return cmd_decay(cfg, out_dir, err);
  if (command == "portrait") return cmd_portrait(cfg, out_dir, err);
  return cmd_periodic(cfg, out_dir, err);
}

}  // namespace flagflow::cli
