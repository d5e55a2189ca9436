#pragma once

/// @file
/// Dependence coefficients between two (or three) finite discrete
/// observables given their exact joint law.
///
/// * maximal correlation rho: sup |Corr(f(R), g(C))|, computed as the second
///   singular value of Q[r][c] = P(r,c) / sqrt(P(r) P(c));
/// * lambda: sup over events A, B of |P(A B) - P(A) P(B)| / sqrt(P(A) P(B)),
///   computed by full enumeration of unions of atoms;
/// * the Markov-triplet residual max |P(a,c|b) - P(a|b) P(c|b)|.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/error.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/svd.hpp"

namespace inarlab {

inline constexpr std::size_t kDefaultLambdaAlphabetCap = 12;

class JointPmf {
 public:
  JointPmf(std::vector<std::string> rows, std::vector<std::string> cols, std::vector<double> mass)
      : rows_(std::move(rows)), cols_(std::move(cols)), mass_(std::move(mass)) {
    if (rows_.empty() || cols_.empty()) throw invalid_parameter("JointPmf: empty alphabet");
    if (mass_.size() != rows_.size() * cols_.size()) throw invalid_parameter("JointPmf: shape mismatch");
    for (double m : mass_) {
      if (!(m >= 0.0)) throw invalid_parameter("JointPmf: negative or NaN mass");
    }
    const double total = detail::compensated_sum(mass_);
    if (std::abs(total - 1.0) > kMassTolerance) throw invalid_parameter("JointPmf: total mass differs from 1");
  }

  JointPmf(std::vector<std::string> rows, std::vector<std::string> cols,
           const std::vector<std::vector<double>>& mass)
      : JointPmf(std::move(rows), std::move(cols), flatten(mass)) {}

  /// Labels "0", "1", ... on both sides.
  static JointPmf from_matrix(const std::vector<std::vector<double>>& mass) {
    if (mass.empty()) throw invalid_parameter("JointPmf: empty matrix");
    return JointPmf(numbered(mass.size()), numbered(mass.front().size()), mass);
  }

  [[nodiscard]] std::size_t row_count() const { return rows_.size(); }
  [[nodiscard]] std::size_t col_count() const { return cols_.size(); }
  [[nodiscard]] const std::vector<std::string>& rows() const { return rows_; }
  [[nodiscard]] const std::vector<std::string>& cols() const { return cols_; }
  [[nodiscard]] const std::vector<double>& mass() const { return mass_; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return mass_[r * cols_.size() + c]; }

  [[nodiscard]] std::vector<double> row_marginal() const {
    std::vector<double> out(rows_.size(), 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t c = 0; c < cols_.size(); ++c) out[r] += at(r, c);
    }
    return out;
  }

  [[nodiscard]] std::vector<double> col_marginal() const {
    std::vector<double> out(cols_.size(), 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t c = 0; c < cols_.size(); ++c) out[c] += at(r, c);
    }
    return out;
  }

  [[nodiscard]] JointPmf transpose() const {
    std::vector<double> t(mass_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t c = 0; c < cols_.size(); ++c) t[c * rows_.size() + r] = at(r, c);
    }
    return JointPmf(cols_, rows_, std::move(t));
  }

  /// Copy without zero-mass rows and columns.
  [[nodiscard]] JointPmf drop_null_atoms() const {
    const auto rm = row_marginal();
    const auto cm = col_marginal();
    std::vector<std::size_t> keep_r;
    std::vector<std::size_t> keep_c;
    for (std::size_t r = 0; r < rm.size(); ++r) {
      if (rm[r] > 0.0) keep_r.push_back(r);
    }
    for (std::size_t c = 0; c < cm.size(); ++c) {
      if (cm[c] > 0.0) keep_c.push_back(c);
    }
    std::vector<std::string> rl;
    std::vector<std::string> cl;
    std::vector<double> m;
    m.reserve(keep_r.size() * keep_c.size());
    for (auto r : keep_r) rl.push_back(rows_[r]);
    for (auto c : keep_c) cl.push_back(cols_[c]);
    for (auto r : keep_r) {
      for (auto c : keep_c) m.push_back(at(r, c));
    }
    return JointPmf(std::move(rl), std::move(cl), std::move(m), unchecked_tag{});
  }

 private:
  struct unchecked_tag {};
  JointPmf(std::vector<std::string> rows, std::vector<std::string> cols, std::vector<double> mass, unchecked_tag)
      : rows_(std::move(rows)), cols_(std::move(cols)), mass_(std::move(mass)) {}

  static std::vector<double> flatten(const std::vector<std::vector<double>>& mass) {
    std::vector<double> out;
    for (const auto& row : mass) {
      if (row.size() != mass.front().size()) throw invalid_parameter("JointPmf: ragged mass matrix");
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }

  static std::vector<std::string> numbered(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
  }

  std::vector<std::string> rows_;
  std::vector<std::string> cols_;
  std::vector<double> mass_;
};

/// All singular values of the normalized matrix Q (null atoms removed).
/// The largest one is 1 for every joint law.
inline std::vector<double> normalized_singular_values(const JointPmf& joint) {
  const JointPmf j = joint.drop_null_atoms();
  const auto rm = j.row_marginal();
  const auto cm = j.col_marginal();
  std::vector<double> q(j.mass().size());
  for (std::size_t r = 0; r < j.row_count(); ++r) {
    for (std::size_t c = 0; c < j.col_count(); ++c) {
      q[r * j.col_count() + c] = j.at(r, c) / (std::sqrt(rm[r]) * std::sqrt(cm[c]));
    }
  }
  return singular_values(q, j.row_count(), j.col_count());
}

/// Maximal correlation of the row and column observables. Zero when either
/// side has a single atom of positive mass.
inline double maximal_correlation(const JointPmf& joint) {
  const auto sv = normalized_singular_values(joint);
  if (sv.size() < 2) return 0.0;
  return std::clamp(sv[1], 0.0, 1.0);
}

/// Exact lambda coefficient over all unions of atoms. Both alphabets, after
/// dropping null atoms, must have at most `alphabet_cap` atoms.
inline double lambda_coefficient(const JointPmf& joint, std::size_t alphabet_cap = kDefaultLambdaAlphabetCap) {
  const JointPmf j = joint.drop_null_atoms();
  const std::size_t nr = j.row_count();
  const std::size_t nc = j.col_count();
  if (nr > alphabet_cap || nc > alphabet_cap || alphabet_cap > 20) {
    throw resource_limit("lambda_coefficient: alphabet of " + std::to_string(std::max(nr, nc)) +
                         " atoms exceeds the enumeration cap of " + std::to_string(alphabet_cap));
  }
  const std::uint32_t row_sets = 1u << nr;
  const std::uint32_t col_sets = 1u << nc;
  const auto rm = j.row_marginal();
  const auto cm = j.col_marginal();

  std::vector<double> p_col_set(col_sets, 0.0);
  for (std::uint32_t b = 1; b < col_sets; ++b) {
    const auto low = static_cast<std::size_t>(std::countr_zero(b));
    p_col_set[b] = p_col_set[b & (b - 1)] + cm[low];
  }
  // col_in_a[c] = P(A, column c), built incrementally over A.
  std::vector<std::vector<double>> col_in(row_sets, std::vector<double>(nc, 0.0));
  std::vector<double> p_row_set(row_sets, 0.0);
  std::vector<double> joint_set(col_sets, 0.0);
  double best = 0.0;
  for (std::uint32_t a = 1; a < row_sets; ++a) {
    const auto low = static_cast<std::size_t>(std::countr_zero(a));
    const std::uint32_t rest = a & (a - 1);
    p_row_set[a] = p_row_set[rest] + rm[low];
    for (std::size_t c = 0; c < nc; ++c) col_in[a][c] = col_in[rest][c] + j.at(low, c);
    const double pa = p_row_set[a];
    for (std::uint32_t b = 1; b < col_sets; ++b) {
      const auto lc = static_cast<std::size_t>(std::countr_zero(b));
      joint_set[b] = joint_set[b & (b - 1)] + col_in[a][lc];
      const double pb = p_col_set[b];
      const double v = std::abs(joint_set[b] - pa * pb) / (std::sqrt(pa) * std::sqrt(pb));
      best = std::max(best, v);
    }
  }
  return best;
}

/// Joint law of three finite observables (A, B, C) stored as a list of
/// atoms (a, b, c, mass); alphabets are 0..size-1 on each side. `tail`
/// records mass excluded by truncation.
class TripletPmf {
 public:
  struct Atom {
    std::size_t a;
    std::size_t b;
    std::size_t c;
    double mass;
  };

  TripletPmf(std::size_t na, std::size_t nb, std::size_t nc, std::vector<Atom> atoms, double tail = 0.0)
      : na_(na), nb_(nb), nc_(nc), atoms_(std::move(atoms)), tail_(tail) {
    if (na_ == 0 || nb_ == 0 || nc_ == 0) throw invalid_parameter("TripletPmf: empty alphabet");
    detail::CompensatedSum total;
    for (const auto& x : atoms_) {
      if (x.a >= na_ || x.b >= nb_ || x.c >= nc_) throw invalid_parameter("TripletPmf: atom outside alphabet");
      if (!(x.mass >= 0.0)) throw invalid_parameter("TripletPmf: negative or NaN mass");
      total.add(x.mass);
    }
    if (!(tail_ >= 0.0)) throw invalid_parameter("TripletPmf: negative tail");
    if (std::abs(total.value() + tail_ - 1.0) > kMassTolerance) {
      throw invalid_parameter("TripletPmf: total mass differs from 1");
    }
  }

  /// From a dense row-major (a, b, c) array.
  static TripletPmf dense(std::size_t na, std::size_t nb, std::size_t nc, const std::vector<double>& mass,
                          double tail = 0.0) {
    if (mass.size() != na * nb * nc) throw invalid_parameter("TripletPmf: shape mismatch");
    std::vector<Atom> atoms;
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t c = 0; c < nc; ++c) {
          const double m = mass[(a * nb + b) * nc + c];
          if (m != 0.0) atoms.push_back({a, b, c, m});
        }
      }
    }
    return TripletPmf(na, nb, nc, std::move(atoms), tail);
  }

  [[nodiscard]] std::size_t size_a() const { return na_; }
  [[nodiscard]] std::size_t size_b() const { return nb_; }
  [[nodiscard]] std::size_t size_c() const { return nc_; }
  [[nodiscard]] double tail() const { return tail_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::size_t na_, nb_, nc_;
  std::vector<Atom> atoms_;
  double tail_;
};

/// max over atoms (a, b, c) with P(b) > 0 of |P(a,c|b) - P(a|b) P(c|b)|,
/// including pairs (a, c) of zero joint mass. Conditionals are taken within
/// the tabulated mass. Zero exactly when (A, B, C) is a Markov triplet.
inline double markov_triplet_residual(const TripletPmf& t) {
  std::vector<std::vector<std::size_t>> by_b(t.size_b());
  const auto& atoms = t.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) by_b[atoms[i].b].push_back(i);
  double worst = 0.0;
  std::map<std::size_t, double> pa;
  std::map<std::size_t, double> pc;
  std::map<std::pair<std::size_t, std::size_t>, double> pac;
  for (std::size_t b = 0; b < by_b.size(); ++b) {
    pa.clear();
    pc.clear();
    pac.clear();
    double pb = 0.0;
    for (auto i : by_b[b]) {
      const auto& x = atoms[i];
      pa[x.a] += x.mass;
      pc[x.c] += x.mass;
      pac[{x.a, x.c}] += x.mass;
      pb += x.mass;
    }
    if (!(pb > 0.0)) continue;
    for (const auto& [a, ma] : pa) {
      for (const auto& [c, mc] : pc) {
        const auto it = pac.find({a, c});
        const double joint = it == pac.end() ? 0.0 : it->second / pb;
        worst = std::max(worst, std::abs(joint - (ma / pb) * (mc / pb)));
      }
    }
  }
  return worst;
}

/// Joint law of (all row parts, all column parts) when the blocks are
/// independent of each other: the product measure on tuple alphabets.
inline JointPmf tensor_combine(const std::vector<JointPmf>& blocks, std::uint64_t atom_limit = 2'000'000) {
  if (blocks.empty()) throw invalid_parameter("tensor_combine: no blocks");
  double atoms = 1.0;
  for (const auto& b : blocks) atoms *= static_cast<double>(b.row_count() * b.col_count());
  if (atoms > static_cast<double>(atom_limit)) {
    throw resource_limit("tensor_combine: product alphabet exceeds the atom limit");
  }
  std::vector<std::string> rows = blocks.front().rows();
  std::vector<std::string> cols = blocks.front().cols();
  std::vector<double> mass = blocks.front().mass();
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    std::vector<std::string> nr;
    std::vector<std::string> nc;
    for (const auto& r1 : rows) {
      for (const auto& r2 : b.rows()) nr.push_back(r1 + "|" + r2);
    }
    for (const auto& c1 : cols) {
      for (const auto& c2 : b.cols()) nc.push_back(c1 + "|" + c2);
    }
    const std::size_t c1n = cols.size();
    const std::size_t c2n = b.col_count();
    std::vector<double> nm(nr.size() * nc.size());
    for (std::size_t r1 = 0; r1 < rows.size(); ++r1) {
      for (std::size_t r2 = 0; r2 < b.row_count(); ++r2) {
        const std::size_t r = r1 * b.row_count() + r2;
        for (std::size_t c1 = 0; c1 < c1n; ++c1) {
          for (std::size_t c2 = 0; c2 < c2n; ++c2) {
            nm[r * nc.size() + c1 * c2n + c2] = mass[r1 * c1n + c1] * b.at(r2, c2);
          }
        }
      }
    }
    rows = std::move(nr);
    cols = std::move(nc);
    mass = std::move(nm);
  }
  return JointPmf(std::move(rows), std::move(cols), std::move(mass));
}

}  // namespace inarlab
