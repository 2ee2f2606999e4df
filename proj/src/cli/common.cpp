#include "common.hpp"

#include <fstream>

namespace flagflow::cli {

using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  o << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c) == 0.0 ? 0.0 : m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json blocks_json(const BlockMatrix& b) {
  json out = json::array();
  for (const auto& m : b.blocks()) out.push_back(matrix_json(m));
  return out;
}

void matrix_rows(std::ostringstream& csv, const std::string& part, const BlockMatrix& b) {
  for (std::size_t f = 0; f < b.num_factors(); ++f) {
    const MatrixXd& m = b.block(f);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        csv << part << ',' << f << ',' << r << ',' << c << ',' << csv_number(m(r, c)) << '\n';
  }
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Continuous: return "continuous";
    case Mode::Discrete: return "discrete";
    case Mode::Periodic: return "periodic";
  }
  return "?";
}

Analysis analyze(const ProblemConfig& cfg) {
  const JordanOptions jo{cfg.tol.cluster, cfg.tol.num};
  switch (cfg.mode) {
    case Mode::Continuous:
      return Analysis{FlowSpec::continuous(AlgElem(cfg.generator, cfg.tol.num), jo), std::nullopt};
    case Mode::Discrete:
      return Analysis{FlowSpec::discrete(GroupElem(cfg.generator, cfg.tol.num), jo), std::nullopt};
    case Mode::Periodic: {
      MonodromyResult m = monodromy(*cfg.periodic, cfg.periodic_steps);
      FlowSpec fsp = FlowSpec::discrete(m.monodromy, jo);
      return Analysis{std::move(fsp), std::move(m)};
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown mode");
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "flagflow: " << e.what() << '\n';
    return kExitPrecondition;
  }
}

}  // namespace flagflow::cli
