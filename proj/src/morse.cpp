#include "flagflow/morse.hpp"
#include "flagflow/linalg.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace flagflow {

std::string DimensionProfile::to_string() const {
  std::ostringstream os;
  for (std::size_t f = 0; f < tables_.size(); ++f) {
    if (f) os << " x ";
    const auto& t = tables_[f];
    os << '[';
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      if (r) os << ',';
      os << '[';
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        if (c) os << ',';
        os << t(r, c);
      }
      os << ']';
    }
    os << ']';
  }
  return os.str();
}

bool DimensionProfile::operator==(const DimensionProfile& o) const {
  if (tables_.size() != o.tables_.size()) return false;
  for (std::size_t f = 0; f < tables_.size(); ++f) {
    if (tables_[f].rows() != o.tables_[f].rows() || tables_[f].cols() != o.tables_[f].cols()) return false;
    if (tables_[f] != o.tables_[f]) return false;
  }
  return true;
}

std::vector<Eigen::MatrixXi> contingency_tables(const std::vector<int>& row_sums, const std::vector<int>& col_sums) {
  const int rows = static_cast<int>(row_sums.size());
  const int cols = static_cast<int>(col_sums.size());
  std::vector<Eigen::MatrixXi> out;
  Eigen::MatrixXi cur = Eigen::MatrixXi::Zero(rows, cols);
  std::vector<int> col_left = col_sums;

  std::function<void(int, int, int)> fill = [&](int r, int c, int row_left) {
    if (r == rows) {
      if (std::all_of(col_left.begin(), col_left.end(), [](int v) { return v == 0; })) out.push_back(cur);
      return;
    }
    if (c == cols - 1) {
      if (row_left > col_left[static_cast<std::size_t>(c)]) return;
      cur(r, c) = row_left;
      col_left[static_cast<std::size_t>(c)] -= row_left;
      const int next = r + 1 < rows ? row_sums[static_cast<std::size_t>(r + 1)] : 0;
      fill(r + 1, 0, next);
      col_left[static_cast<std::size_t>(c)] += row_left;
      cur(r, c) = 0;
      return;
    }
    const int hi = std::min(row_left, col_left[static_cast<std::size_t>(c)]);
    for (int v = hi; v >= 0; --v) {
      cur(r, c) = v;
      col_left[static_cast<std::size_t>(c)] -= v;
      fill(r, c + 1, row_left - v);
      col_left[static_cast<std::size_t>(c)] += v;
    }
    cur(r, c) = 0;
  };
  if (rows > 0 && cols > 0) fill(0, 0, row_sums[0]);
  return out;
}

namespace {

int pair_count(const Eigen::MatrixXi& d, const std::function<bool(int, int, int, int)>& keep) {
  int total = 0;
  for (int j = 0; j < d.rows(); ++j)
    for (int i = 0; i < d.cols(); ++i)
      for (int jj = 0; jj < d.rows(); ++jj)
        for (int ii = 0; ii < d.cols(); ++ii)
          if (keep(j, i, jj, ii)) total += d(j, i) * d(jj, ii);
  return total;
}

// Pairs (a, b) of adapted-frame columns with step(a) > step(b); a in group j,
// b in group jj.
int profile_sum(const DimensionProfile& p, const std::function<bool(int, int)>& group_rel) {
  int total = 0;
  for (const auto& d : p.tables()) {
    total += pair_count(d, [&](int j, int i, int jj, int ii) { return i > ii && group_rel(j, jj); });
  }
  return total;
}

}  // namespace

int fix_dim(const DimensionProfile& p) {
  return profile_sum(p, [](int j, int jj) { return j == jj; });
}

int unstable_dim(const DimensionProfile& p) {
  return profile_sum(p, [](int j, int jj) { return j < jj; });
}

int stable_dim(const DimensionProfile& p) {
  return profile_sum(p, [](int j, int jj) { return j > jj; });
}

int conley_shift(const DimensionProfile& p) { return unstable_dim(p); }

FactorStructure factor_structure(const DimensionProfile& p, const Chamber& c, const FlagType& type) {
  (void)c;
  (void)type;
  FactorStructure out;
  for (const auto& d : p.tables()) {
    std::vector<std::vector<int>> groups;
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
      std::vector<int> sums;
      int acc = 0;
      for (Eigen::Index i = 0; i < d.cols(); ++i) {
        if (d(j, i) == 0) continue;
        acc += d(j, i);
        sums.push_back(acc);
      }
      if (!sums.empty()) sums.pop_back();
      groups.push_back(std::move(sums));
    }
    out.push_back(std::move(groups));
  }
  return out;
}

std::string describe_structure(const FactorStructure& s, const Chamber& c) {
  std::vector<std::string> parts;
  for (std::size_t f = 0; f < s.size(); ++f) {
    for (std::size_t j = 0; j < s[f].size(); ++j) {
      const auto& dims = s[f][j];
      const int m = c.factor(f).multiplicities[j];
      if (dims.empty()) continue;
      std::ostringstream os;
      if (dims.size() == 1 && (dims[0] == 1 || dims[0] == m - 1)) {
        os << "RP^" << (m - 1);
      } else if (dims.size() == 1) {
        os << "Gr(" << dims[0] << ',' << m << ')';
      } else {
        os << "Fl(";
        for (std::size_t k = 0; k < dims.size(); ++k) os << (k ? "," : "") << dims[k];
        os << ';' << m << ')';
      }
      parts.push_back(os.str());
    }
  }
  if (parts.empty()) return "pt";
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? " x " : "") + parts[k];
  return out;
}

namespace {

MatrixXd group_basis(const FactorChamber& f, int j) {
  const MatrixXd cols = f.conjugator.middleCols(f.group_offset(j), f.multiplicities[static_cast<std::size_t>(j)]);
  return linalg::orthonormal_range(cols, static_cast<int>(cols.cols()));
}

}  // namespace

std::optional<DimensionProfile> classify_flag(const Flag& x, const Chamber& c, const FixOptions& opts) {
  const FlagType& type = x.type();
  if (type.num_factors() != c.num_factors()) throw Error(ErrorCode::SpecMismatch, "flag and chamber specs differ");
  std::vector<Eigen::MatrixXi> tables;
  for (std::size_t f = 0; f < c.num_factors(); ++f) {
    const FactorChamber& fc = c.factor(f);
    const MatrixXd& h = c.generator().block(f);
    const int n = fc.dim();
    const double scale = std::max(1.0, h.norm());
    const MatrixXd& q = x.frame(f);
    const auto& dims = type.dims(f);

    for (int d : dims) {
      const MatrixXd basis = q.leftCols(d);
      const MatrixXd leak = h * basis - basis * (basis.transpose() * h * basis);
      if (leak.norm() > opts.invariance * scale) return std::nullopt;
    }

    const int s = fc.num_groups();
    const int k1 = static_cast<int>(dims.size()) + 1;
    Eigen::MatrixXi table(s, k1);
    for (int j = 0; j < s; ++j) {
      const MatrixXd e = group_basis(fc, j);
      int prev = 0;
      for (int i = 0; i < k1; ++i) {
        const int d = i < k1 - 1 ? dims[static_cast<std::size_t>(i)] : n;
        const int cum = i < k1 - 1 ? linalg::intersection_dim(q.leftCols(d), e, opts.angle)
                                   : fc.multiplicities[static_cast<std::size_t>(j)];
        table(j, i) = cum - prev;
        prev = cum;
      }
    }
    const std::vector<int> steps = type.steps(f);
    for (int j = 0; j < s; ++j) {
      if (table.row(j).minCoeff() < 0 || table.row(j).sum() != fc.multiplicities[static_cast<std::size_t>(j)]) {
        return std::nullopt;
      }
    }
    for (int i = 0; i < k1; ++i) {
      if (table.col(i).sum() != steps[static_cast<std::size_t>(i)]) return std::nullopt;
    }
    tables.push_back(std::move(table));
  }
  return DimensionProfile(std::move(tables));
}

namespace {

void check_profile(const DimensionProfile& p, const Chamber& c, const FlagType& type) {
  if (p.num_factors() != c.num_factors() || type.num_factors() != c.num_factors()) {
    throw Error(ErrorCode::InconsistentProfile, "factor count mismatch");
  }
  for (std::size_t f = 0; f < c.num_factors(); ++f) {
    const auto& d = p.table(f);
    const FactorChamber& fc = c.factor(f);
    const std::vector<int> steps = type.steps(f);
    if (d.rows() != fc.num_groups() || d.cols() != static_cast<Eigen::Index>(steps.size())) {
      throw Error(ErrorCode::InconsistentProfile, "table shape does not match chamber and flag type");
    }
    if (d.minCoeff() < 0) throw Error(ErrorCode::InconsistentProfile, "negative entry");
    for (int j = 0; j < d.rows(); ++j) {
      if (d.row(j).sum() != fc.multiplicities[static_cast<std::size_t>(j)]) {
        throw Error(ErrorCode::InconsistentProfile, "row sum differs from multiplicity");
      }
    }
    for (int i = 0; i < d.cols(); ++i) {
      if (d.col(i).sum() != steps[static_cast<std::size_t>(i)]) {
        throw Error(ErrorCode::InconsistentProfile, "column sum differs from step size");
      }
    }
  }
}

}  // namespace

Flag component_point(const DimensionProfile& p, const Chamber& c, const FlagType& type,
                     const std::vector<std::vector<MatrixXd>>& group_frames) {
  check_profile(p, c, type);
  std::vector<MatrixXd> bases;
  for (std::size_t f = 0; f < c.num_factors(); ++f) {
    const FactorChamber& fc = c.factor(f);
    const auto& d = p.table(f);
    const int n = fc.dim();
    MatrixXd frame = MatrixXd::Zero(n, n);
    std::vector<int> used(static_cast<std::size_t>(fc.num_groups()), 0);
    int col = 0;
    for (int i = 0; i < d.cols(); ++i) {
      for (int j = 0; j < d.rows(); ++j) {
        const int m = fc.multiplicities[static_cast<std::size_t>(j)];
        const MatrixXd& o = group_frames.at(f).at(static_cast<std::size_t>(j));
        if (o.rows() != m || o.cols() != m) throw Error(ErrorCode::SpecMismatch, "group frame has wrong size");
        for (int r = 0; r < d(j, i); ++r) {
          frame.block(fc.group_offset(j), col, m, 1) = o.col(used[static_cast<std::size_t>(j)]++);
          ++col;
        }
      }
    }
    bases.push_back(fc.conjugator * frame);
  }
  return flag_from_basis(bases, type);
}

Flag base_point(const DimensionProfile& p, const Chamber& c, const FlagType& type) {
  std::vector<std::vector<MatrixXd>> frames;
  for (const auto& fc : c.factors()) {
    std::vector<MatrixXd> g;
    for (int m : fc.multiplicities) g.push_back(MatrixXd::Identity(m, m));
    frames.push_back(std::move(g));
  }
  return component_point(p, c, type, frames);
}

std::vector<MorseComponent> enumerate_components(const Chamber& c, const FlagType& type) {
  if (type.num_factors() != c.num_factors()) throw Error(ErrorCode::SpecMismatch, "flag type and chamber differ");
  std::vector<std::vector<Eigen::MatrixXi>> per_factor;
  for (std::size_t f = 0; f < c.num_factors(); ++f) {
    per_factor.push_back(contingency_tables(c.factor(f).multiplicities, type.steps(f)));
  }

  std::vector<MorseComponent> out;
  std::vector<Eigen::MatrixXi> cur(c.num_factors());
  std::function<void(std::size_t)> rec = [&](std::size_t f) {
    if (f == c.num_factors()) {
      MorseComponent comp;
      comp.profile = DimensionProfile(cur);
      comp.base_point = base_point(comp.profile, c, type);
      comp.dim_fix = fix_dim(comp.profile);
      comp.dim_vplus = unstable_dim(comp.profile);
      comp.dim_vminus = stable_dim(comp.profile);
      comp.factor_structure = factor_structure(comp.profile, c, type);
      out.push_back(std::move(comp));
      return;
    }
    for (const auto& t : per_factor[f]) {
      cur[f] = t;
      rec(f + 1);
    }
  };
  rec(0);
  return out;
}

AdaptedFrame adapted_frame(const Flag& x, const DimensionProfile& p, const Chamber& c) {
  const auto found = classify_flag(x, c);
  if (!found || !(*found == p)) throw Error(ErrorCode::NotOnComponent, "flag does not lie on the component");

  std::vector<MatrixXd> inv;
  for (const auto& fc : c.factors()) inv.push_back(fc.conjugator_inv);
  const Flag xa = act_linear(inv, x);

  AdaptedFrame out;
  for (std::size_t f = 0; f < c.num_factors(); ++f) {
    const FactorChamber& fc = c.factor(f);
    const auto& d = p.table(f);
    const int n = fc.dim();
    const MatrixXd& q = xa.frame(f);
    const auto& dims = x.type().dims(f);

    // Orthonormal bases of the successive pieces (V_i ∩ E_j) ⊖ (V_{i-1} ∩ E_j).
    std::vector<std::vector<MatrixXd>> pieces(static_cast<std::size_t>(d.rows()));
    for (int j = 0; j < d.rows(); ++j) {
      const int m = fc.multiplicities[static_cast<std::size_t>(j)];
      const MatrixXd rows = q.middleRows(fc.group_offset(j), m);
      MatrixXd acc(m, 0);
      for (int i = 0; i < d.cols(); ++i) {
        const int dim_i = i < d.cols() - 1 ? dims[static_cast<std::size_t>(i)] : n;
        const MatrixXd span = rows.leftCols(dim_i);
        const MatrixXd residual = span - acc * (acc.transpose() * span);
        MatrixXd piece = linalg::orthonormal_range(residual, d(j, i));
        // re-orthogonalize against the accumulated basis
        piece -= acc * (acc.transpose() * piece);
        if (piece.cols() > 0) {
          Eigen::HouseholderQR<MatrixXd> qr(piece);
          piece = qr.householderQ() * MatrixXd::Identity(m, piece.cols());
        }
        MatrixXd next(m, acc.cols() + piece.cols());
        next << acc, piece;
        acc = std::move(next);
        pieces[static_cast<std::size_t>(j)].push_back(piece);
      }
    }

    MatrixXd frame = MatrixXd::Zero(n, n);
    std::vector<int> step(static_cast<std::size_t>(n)), group(static_cast<std::size_t>(n));
    int col = 0;
    for (int i = 0; i < d.cols(); ++i) {
      for (int j = 0; j < d.rows(); ++j) {
        const MatrixXd& piece = pieces[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        for (Eigen::Index r = 0; r < piece.cols(); ++r) {
          frame.block(fc.group_offset(j), col, piece.rows(), 1) = piece.col(r);
          step[static_cast<std::size_t>(col)] = i;
          group[static_cast<std::size_t>(col)] = j;
          ++col;
        }
      }
    }
    out.frames.push_back(std::move(frame));
    out.step.push_back(std::move(step));
    out.group.push_back(std::move(group));
  }
  return out;
}

namespace {

std::vector<AlgElem> frame_pairs(const Flag& x, const DimensionProfile& p, const Chamber& c,
                                 const std::function<bool(int, int)>& group_rel) {
  const AdaptedFrame af = adapted_frame(x, p, c);
  const SemisimpleSpec spec = c.spec();
  std::vector<AlgElem> out;
  for (std::size_t f = 0; f < c.num_factors(); ++f) {
    const FactorChamber& fc = c.factor(f);
    const MatrixXd& fr = af.frames[f];
    const auto& st = af.step[f];
    const auto& gr = af.group[f];
    for (int b = 0; b < fc.dim(); ++b) {
      for (int a = 0; a < fc.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (st[ua] > st[ub] && group_rel(gr[ua], gr[ub])) {
          const MatrixXd y = fc.conjugator * (fr.col(a) * fr.col(b).transpose()) * fc.conjugator_inv;
          out.push_back(AlgElem::embed(spec, f, y));
        }
      }
    }
  }
  // Cartan-orthonormalize (exact no-op when the conjugator is orthogonal).
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) out[k] -= cartan_inner(out[j], out[k]) * out[j];
    }
    out[k] *= 1.0 / cartan_norm(out[k]);
  }
  return out;
}

}  // namespace

std::vector<AlgElem> normal_fiber(const Flag& x, const DimensionProfile& p, const Chamber& c, Sign sign) {
  if (sign == Sign::Plus) return frame_pairs(x, p, c, [](int ga, int gb) { return ga < gb; });
  return frame_pairs(x, p, c, [](int ga, int gb) { return ga > gb; });
}

std::vector<AlgElem> fix_tangent_basis(const Flag& x, const DimensionProfile& p, const Chamber& c) {
  return frame_pairs(x, p, c, [](int ga, int gb) { return ga == gb; });
}

WhitneyReport whitney_check(const Flag& x, const DimensionProfile& p, const Chamber& c, double eps_rank) {
  const auto tangent = fix_tangent_basis(x, p, c);
  const auto plus = normal_fiber(x, p, c, Sign::Plus);
  const auto minus = normal_fiber(x, p, c, Sign::Minus);

  WhitneyReport r;
  r.dim_tangent = static_cast<int>(tangent.size());
  r.dim_plus = static_cast<int>(plus.size());
  r.dim_minus = static_cast<int>(minus.size());
  r.dim_manifold = x.type().manifold_dim();
  const int total = r.dim_tangent + r.dim_plus + r.dim_minus;

  if (r.dim_manifold == 0) {
    r.ok = total == 0;
    r.sigma_min = 0.0;
    return r;
  }
  MatrixXd cols(r.dim_manifold, total);
  int k = 0;
  for (const auto* set : {&tangent, &plus, &minus}) {
    for (const auto& y : *set) {
      const Eigen::VectorXd v = tangent_coordinates(induced_vector(y, x));
      cols.col(k++) = v / v.norm();
    }
  }
  Eigen::JacobiSVD<MatrixXd> svd(cols);
  const Eigen::VectorXd sv = svd.singularValues();
  r.rank = static_cast<int>((sv.array() > eps_rank).count());
  r.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  r.ok = total == r.dim_manifold && r.rank == r.dim_manifold && r.sigma_min > eps_rank;
  return r;
}

}  // namespace flagflow
