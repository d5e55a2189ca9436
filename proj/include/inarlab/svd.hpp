#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace inarlab {

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr double kJacobiNegligible = 1e-30;

/// Singular values (descending) of a rows x cols row-major matrix by
/// one-sided Jacobi (Hestenes) rotations on the columns of the taller
/// orientation. Stops after a sweep in which every column pair satisfies
/// |<a_i, a_j>| <= max(tol * |a_i| |a_j|, kJacobiNegligible * max_k |a_k|^2).
inline std::vector<double> singular_values(std::span<const double> matrix, std::size_t rows, std::size_t cols,
                                           double tol = kJacobiTolerance, int max_sweeps = 100) {
  const bool transpose = cols > rows;
  const std::size_t m = transpose ? cols : rows;  // column length
  const std::size_t n = transpose ? rows : cols;  // number of columns
  std::vector<std::vector<double>> c(n, std::vector<double>(m));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      const double v = matrix[r * cols + k];
      if (transpose) {
        c[r][k] = v;
      } else {
        c[k][r] = v;
      }
    }
  }
  std::vector<double> norm2(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (double v : c[j]) s += v * v;
    norm2[j] = s;
  }
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    // Inner products below this floor move no singular value by more than
    // about 1e-15 * sigma_max; rotating on them only chases rounding noise.
    const double floor = kJacobiNegligible * *std::max_element(norm2.begin(), norm2.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = norm2[i];
        const double beta = norm2[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        double gamma = 0.0;
        const auto& ci = c[i];
        const auto& cj = c[j];
        for (std::size_t r = 0; r < m; ++r) gamma += ci[r] * cj[r];
        if (std::abs(gamma) <= std::max(tol * std::sqrt(alpha) * std::sqrt(beta), floor)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        auto& vi = c[i];
        auto& vj = c[j];
        double ni = 0.0;
        double nj = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          const double x = vi[r];
          const double y = vj[r];
          vi[r] = cs * x - sn * y;
          vj[r] = sn * x + cs * y;
          ni += vi[r] * vi[r];
          nj += vj[r] * vj[r];
        }
        norm2[i] = ni;
        norm2[j] = nj;
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(norm2[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace inarlab
