#pragma once

// Configuration ingestion and the analysis commands behind the flagflow CLI.

#include "flagflow/flag_geometry.hpp"
#include "flagflow/lie_core.hpp"
#include "flagflow/periodic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flagflow::cli {

enum class Mode { Continuous, Discrete, Periodic };

struct PortraitSettings {
  int grid = 8;          // initial points per chart axis
  double horizon = 6.0;  // trajectory length
  int points = 60;       // samples per trajectory
  int locus_points = 96;
};

struct ProblemConfig {
  SemisimpleSpec spec;
  Mode mode = Mode::Continuous;
  std::vector<MatrixXd> generator;  // X (continuous) or g (discrete)
  std::optional<PeriodicSpec> periodic;
  int periodic_steps = 1000;
  FlagType flag_type;
  Tolerances tol;
  double horizon = 10.0;  // decay horizon
  int grid = 50;
  int samples = 8;
  double slope_fraction = 0.1;
  double limit_horizon = 30.0;
  std::uint64_t seed = 1;
  PortraitSettings portrait;
};

/// Throws Error(InvalidConfig) on malformed input.
ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::filesystem::path& path);

/// Exit codes: 0 success, 2 input or numerical precondition failure,
/// 3 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitVerification = 3;

int cmd_decompose(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& err);
int cmd_components(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& err);
int cmd_decay(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& err);
int cmd_portrait(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& err);
int cmd_periodic(const ProblemConfig& cfg, const std::filesystem::path& out, std::ostream& err);

/// Full command-line entry point: `flagflow <command> <config> [--out DIR]
/// [--seed N] [--tol EPS]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// CSV helpers (RFC 4180 quoting).
std::string csv_field(const std::string& s);
std::string csv_number(double v);

}  // namespace flagflow::cli
