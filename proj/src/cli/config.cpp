#include "flagflow/cli.hpp"

#include <fstream>
#include <sstream>

namespace flagflow::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

MatrixXd parse_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(where + ": expected " + std::to_string(n) + " rows");
  MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) bad(where + ": row of wrong length");
    for (int c = 0; c < n; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) bad(where + ": non-numeric entry");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

std::vector<MatrixXd> parse_blocks(const json& j, const SemisimpleSpec& spec, const std::string& where) {
  if (!j.is_array() || j.size() != spec.num_factors()) bad(where + ": one block per factor required");
  std::vector<MatrixXd> blocks;
  for (std::size_t f = 0; f < spec.num_factors(); ++f) {
    blocks.push_back(parse_matrix(j[f], spec.size(f), where + "[" + std::to_string(f) + "]"));
  }
  return blocks;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

ProblemConfig parse_config(const json& j) {
  if (!j.is_object()) bad("configuration must be an object");
  ProblemConfig cfg;
  if (!j.contains("factors")) bad("missing 'factors'");
  try {
    cfg.spec = SemisimpleSpec(j.at("factors").get<std::vector<int>>());
  } catch (const json::exception& e) {
    bad(std::string("factors: ") + e.what());
  } catch (const Error& e) {
    bad(e.what());
  }

  const std::string mode = get_or<std::string>(j, "mode", "continuous");
  if (mode == "continuous") cfg.mode = Mode::Continuous;
  else if (mode == "discrete") cfg.mode = Mode::Discrete;
  else if (mode == "periodic") cfg.mode = Mode::Periodic;
  else bad("mode must be continuous, discrete or periodic");

  if (j.contains("generator")) cfg.generator = parse_blocks(j.at("generator"), cfg.spec, "generator");

  if (cfg.mode == Mode::Periodic) {
    if (!j.contains("periodic")) bad("periodic mode requires a 'periodic' block");
    const json& p = j.at("periodic");
    const double period = get_or<double>(p, "period", 1.0);
    cfg.periodic_steps = get_or<int>(p, "steps", 1000);
    std::vector<TrigTerm> terms;
    if (p.contains("terms")) {
      for (const json& t : p.at("terms")) {
        TrigTerm term;
        term.factor = get_or<std::size_t>(t, "factor", 0);
        if (term.factor >= cfg.spec.num_factors()) bad("periodic term refers to a missing factor");
        term.harmonic = get_or<int>(t, "harmonic", 0);
        const int n = cfg.spec.size(term.factor);
        if (t.contains("cos")) term.cos_block = parse_matrix(t.at("cos"), n, "periodic.cos");
        if (t.contains("sin")) term.sin_block = parse_matrix(t.at("sin"), n, "periodic.sin");
        terms.push_back(std::move(term));
      }
    } else if (!cfg.generator.empty()) {
      for (std::size_t f = 0; f < cfg.generator.size(); ++f) terms.push_back(TrigTerm{f, 0, cfg.generator[f], {}});
    }
    try {
      cfg.periodic = PeriodicSpec(cfg.spec, period, std::move(terms));
    } catch (const Error& e) {
      bad(e.what());
    }
  } else if (cfg.generator.empty()) {
    bad("missing 'generator'");
  }

  if (!j.contains("flag_type")) bad("missing 'flag_type'");
  try {
    cfg.flag_type = FlagType(cfg.spec, j.at("flag_type").get<std::vector<std::vector<int>>>());
  } catch (const json::exception& e) {
    bad(std::string("flag_type: ") + e.what());
  } catch (const Error& e) {
    bad(e.what());
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    cfg.tol.num = get_or<double>(t, "num", cfg.tol.num);
    cfg.tol.cluster = get_or<double>(t, "cluster", cfg.tol.cluster);
    cfg.tol.fix = get_or<double>(t, "fix", cfg.tol.fix);
    cfg.tol.limit = get_or<double>(t, "limit", cfg.tol.limit);
    cfg.tol.rank = get_or<double>(t, "rank", cfg.tol.rank);
    cfg.tol.fd = get_or<double>(t, "fd", cfg.tol.fd);
  }
  for (double v : {cfg.tol.num, cfg.tol.cluster, cfg.tol.fix, cfg.tol.limit, cfg.tol.rank, cfg.tol.fd}) {
    if (!(v > 0)) bad("tolerances must be positive");
  }

  cfg.horizon = cfg.mode == Mode::Discrete ? 20.0 : 10.0;
  if (j.contains("decay")) {
    const json& d = j.at("decay");
    cfg.horizon = get_or<double>(d, "horizon", cfg.horizon);
    cfg.grid = get_or<int>(d, "grid", cfg.grid);
    cfg.samples = get_or<int>(d, "samples", cfg.samples);
    cfg.slope_fraction = get_or<double>(d, "slope_fraction", cfg.slope_fraction);
  }
  if (!(cfg.horizon > 0) || cfg.grid < 2 || cfg.samples < 1) bad("decay settings out of range");
  cfg.limit_horizon = get_or<double>(j, "limit_horizon", cfg.limit_horizon);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);

  if (j.contains("portrait")) {
    const json& p = j.at("portrait");
    cfg.portrait.grid = get_or<int>(p, "grid", cfg.portrait.grid);
    cfg.portrait.horizon = get_or<double>(p, "horizon", cfg.portrait.horizon);
    cfg.portrait.points = get_or<int>(p, "points", cfg.portrait.points);
    cfg.portrait.locus_points = get_or<int>(p, "locus_points", cfg.portrait.locus_points);
  }
  if (cfg.portrait.grid < 1 || cfg.portrait.points < 2 || cfg.portrait.locus_points < 1) bad("portrait settings out of range");
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace flagflow::cli
