#pragma once

// Pieces shared by the command implementations.

#include "flagflow/cli.hpp"
#include "flagflow/dynamics.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace flagflow::cli {

void write_file(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json matrix_json(const MatrixXd& m);
nlohmann::json blocks_json(const BlockMatrix& b);
void matrix_rows(std::ostringstream& csv, const std::string& part, const BlockMatrix& b);

const char* mode_name(Mode m);

/// Flow driving the analysis; periodic problems use their monodromy.
struct Analysis {
  FlowSpec flow;
  std::optional<MonodromyResult> monodromy;
};

Analysis analyze(const ProblemConfig& cfg);

/// Runs body, mapping library errors to exit code 2 with a message on err.
int guarded(std::ostream& err, const std::function<int()>& body);

}  // namespace flagflow::cli
