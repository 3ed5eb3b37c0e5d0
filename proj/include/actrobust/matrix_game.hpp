// Copyright 2026 The actrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "actrobust/errors.hpp"

namespace actrobust {

/// Duality gap accepted by solve_matrix_game.
inline constexpr double kMatrixGameTolerance = 1e-8;

/// Solution of a two-player zero-sum matrix game. The row player maximizes.
struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
  /// max_i (M y)_i - min_j (x^T M)_j for the returned strategies x, y.
  double duality_gap = 0.0;
};

namespace detail {

/// Dense tableau simplex for   max 1^T y  s.t.  B y <= 1, y >= 0
/// with B strictly positive. Bland's rule; returns the primal y and the duals
/// of the m constraints.
inline void simplex_unit_packing(const Eigen::MatrixXd& B, std::vector<double>& primal,
                                 std::vector<double>& dual) {
  const Eigen::Index m = B.rows();
  const Eigen::Index n = B.cols();
  const Eigen::Index cols = n + m + 1;  // structural, slack, rhs
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  t.topLeftCorner(m, n) = B;
  t.block(0, n, m, m).setIdentity();
  t.col(cols - 1).head(m).setOnes();
  t.row(m).head(n).setConstant(-1.0);

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double eps = 1e-12 * std::max(1.0, B.maxCoeff());
  const int max_pivots = 50 * static_cast<int>(m + n) + 100;
  for (int pivots = 0;; ++pivots) {
    if (pivots > max_pivots) throw MatrixGameError("simplex: pivot limit exceeded");
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;

    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i)
      if (t(i, enter) > eps) best = std::min(best, t(i, cols - 1) / t(i, enter));
    if (!std::isfinite(best)) throw MatrixGameError("simplex: unbounded program");
    // Among minimum-ratio rows, the smallest basic variable leaves (Bland).
    Eigen::Index leave = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= eps || t(i, cols - 1) / t(i, enter) > best + eps) continue;
      if (leave < 0 ||
          basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])
        leave = i;
    }

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  primal.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < n) primal[static_cast<std::size_t>(b)] = t(i, cols - 1);
  }
  dual.assign(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) dual[static_cast<std::size_t>(i)] = t(m, n + i);
}

inline std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(x, 0.0);
    sum += x;
  }
  if (!(sum > 0.0)) throw MatrixGameError("simplex: degenerate strategy");
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace detail

/**
 * Minimax value and optimal mixed strategies of the matrix game `M`
 * (rows maximize, columns minimize).
 *
 * The payoff is shifted to be strictly positive and the column player's
 * program  max 1^T y  s.t.  M y <= 1  is solved with a dense simplex; the row
 * strategy is read off the optimal duals. The result is certified: the gap
 * between the payoff the column strategy concedes and the payoff the row
 * strategy guarantees must be at most `tolerance`, otherwise MatrixGameError.
 */
inline MatrixGameSolution solve_matrix_game(const Eigen::MatrixXd& M,
                                            double tolerance = kMatrixGameTolerance) {
  if (M.rows() == 0 || M.cols() == 0) throw MatrixGameError("empty payoff matrix");
  if (!M.allFinite()) throw MatrixGameError("payoff matrix has non-finite entries");

  MatrixGameSolution sol;
  if (M.rows() == 1 || M.cols() == 1) {
    // One player has a single action: the other best-responds.
    Eigen::Index best = 0;
    if (M.rows() == 1) {
      M.row(0).minCoeff(&best);
      sol.row_strategy = {1.0};
      sol.col_strategy.assign(static_cast<std::size_t>(M.cols()), 0.0);
      sol.col_strategy[static_cast<std::size_t>(best)] = 1.0;
      sol.value = M(0, best);
    } else {
      M.col(0).maxCoeff(&best);
      sol.col_strategy = {1.0};
      sol.row_strategy.assign(static_cast<std::size_t>(M.rows()), 0.0);
      sol.row_strategy[static_cast<std::size_t>(best)] = 1.0;
      sol.value = M(best, 0);
    }
    return sol;
  }

  const double shift = 1.0 - M.minCoeff();
  Eigen::MatrixXd B = M.array() + shift;
  std::vector<double> y, x;
  detail::simplex_unit_packing(B, y, x);
  sol.col_strategy = detail::normalized(std::move(y));
  sol.row_strategy = detail::normalized(std::move(x));

  Eigen::Map<const Eigen::VectorXd> xs(sol.row_strategy.data(), M.rows());
  Eigen::Map<const Eigen::VectorXd> ys(sol.col_strategy.data(), M.cols());
  const double guaranteed = (xs.transpose() * M).minCoeff();
  const double conceded = (M * ys).maxCoeff();
  sol.duality_gap = std::max(0.0, conceded - guaranteed);
  sol.value = 0.5 * (guaranteed + conceded);
  if (!(sol.duality_gap <= tolerance))
    throw MatrixGameError(
        fmt::format("matrix game: duality gap {:.3e} exceeds {:.3e}", sol.duality_gap, tolerance));
  return sol;
}

}  // namespace actrobust
