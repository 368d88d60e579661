// Copyright 2026 The taprecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/explorer.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace taprecon
{

const char * policy_name(Policy policy)
{
  switch (policy) {
    case Policy::kActive:
      return "active";
    case Policy::kPureUncertainty:
      return "pure_uncertainty";
    case Policy::kRandom:
      return "random";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view name)
{
  if (name == "active") {
    return Policy::kActive;
  }
  if (name == "pure_uncertainty" || name == "uncertainty") {
    return Policy::kPureUncertainty;
  }
  if (name == "random") {
    return Policy::kRandom;
  }
  return std::nullopt;
}

Eigen::VectorXd normalized_gradient_magnitude(const Eigen::VectorXd & mean, const GradientOperators & state_ops)
{
  require(
    mean.size() == state_ops.gx.cols(), ErrorCode::kDimensionMismatch,
    "gradient operators do not match the state grid");
  const Eigen::VectorXd gx = state_ops.gx * mean;
  const Eigen::VectorXd gy = state_ops.gy * mean;
  Eigen::VectorXd mag = (gx.array().square() + gy.array().square()).sqrt().matrix();
  const double peak = mag.maxCoeff();
  // cancellation residue on a flat mean must not be stretched to 1
  const double floor = 1e-12 * state_ops.scale * mean.cwiseAbs().maxCoeff();
  if (peak > floor && peak > 0.0) {
    mag /= peak;
  } else {
    mag.setZero();
  }
  return mag;
}

Eigen::VectorXd gradient_map(
  const StateEstimate & state, double lambda, long t, const GradientOperators & state_ops)
{
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be >= 0");
  require(t >= 0, ErrorCode::kInvalidArgument, "tap index must be >= 0");
  const double explore = std::exp(-lambda * static_cast<double>(t));
  if (explore == 1.0) {
    return Eigen::VectorXd::Ones(state.mean.size());
  }
  const Eigen::VectorXd grad = normalized_gradient_magnitude(state.mean, state_ops);
  return ((1.0 - explore) * grad.array() + explore).matrix();
}

Eigen::VectorXd uncertain_map(const StateEstimate & state)
{
  const auto var = state.covariance.diagonal();
  Eigen::VectorXd u(var.size());
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    require(
      std::isfinite(var[i]) && var[i] > 0.0, ErrorCode::kNumerical,
      "non-positive posterior variance at cell " + std::to_string(i) + "; covariance is corrupted");
    u[i] = 0.5 * std::log(2.0 * std::numbers::pi * var[i]) + 0.5;
  }
  return u;
}

DecisionMaps decision_maps(
  const StateEstimate & state, double lambda, long t, const GradientOperators & state_ops)
{
  DecisionMaps maps;
  maps.lambda = lambda;
  maps.t = t;
  maps.gradient = gradient_map(state, lambda, t, state_ops);
  maps.uncertainty = uncertain_map(state);
  maps.decision = maps.gradient.cwiseProduct(maps.uncertainty);
  return maps;
}

namespace
{

struct CellWeight
{
  int row;
  int col;
  double weight;
};

// Normalised 1-D Gaussian weights of the lattice cells around `coord`. The
// lattice is unbounded; callers clamp indices to the region.
void axis_weights(
  double coord, int count, double side, double beta, double slack, std::vector<std::pair<int, double>> & out)
{
  out.clear();
  const double pitch = side / count;
  const double f = (coord + 0.5 * side) / pitch;
  const auto nearest = static_cast<int>(std::floor(f));
  const double d0 = coord - cell_center_coordinate(nearest, count, side);
  const double reach = std::sqrt(d0 * d0 + slack) / pitch;
  const auto lo = static_cast<int>(std::floor(f - reach));
  const auto hi = static_cast<int>(std::floor(f + reach));
  double sum = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double d = coord - cell_center_coordinate(k, count, side);
    const double w = std::exp(-(d * d - d0 * d0) / beta);
    out.emplace_back(k, w);
    sum += w;
  }
  for (auto & kw : out) {
    kw.second /= sum;
  }
}

struct SoftSampler
{
  int count;
  double side;
  double beta;
  double tol;
  std::vector<std::pair<int, double>> wx, wy;
  std::vector<CellWeight> cells;

  const std::vector<CellWeight> & operator()(const Eigen::Vector2d & u)
  {
    const double slack = beta * std::log(1.0 / tol);
    axis_weights(u.x(), count, side, beta, slack, wx);
    axis_weights(u.y(), count, side, beta, slack, wy);
    cells.clear();
    double kept = 0.0;
    for (const auto & [r, a] : wy) {
      for (const auto & [c, b] : wx) {
        const double w = a * b;
        if (w >= tol) {
          cells.push_back({r, c, w});
          kept += w;
        }
      }
    }
    for (auto & cw : cells) {
      cw.weight /= kept;
    }
    return cells;
  }
};

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn && fn)
{
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        fn(i);
      }
    });
  }
  for (auto & th : pool) {
    th.join();
  }
}

}  // namespace

FootprintScorer::FootprintScorer(
  const GridSpec & grid, const ActionSpace & actions, double beta_c, double drop_tolerance)
: grid_(grid),
  actions_(actions),
  sensor_cells_(cell_center_matrix(grid, GridKind::kHrSensor)),
  beta_c_(beta_c),
  drop_tolerance_(drop_tolerance)
{
  require(std::isfinite(beta_c) && beta_c > 0.0, ErrorCode::kInvalidArgument, "beta_c must be positive");
  require(
    drop_tolerance > 0.0 && drop_tolerance < 1.0, ErrorCode::kInvalidArgument,
    "scorer drop tolerance must be in (0, 1)");
  const double pitch = grid_.hr_pitch();
  const double origin = -0.5 * grid_.state_side();
  const double steps = actions_.x_step() / pitch;
  const double start = (actions_.xs().front() - origin) / pitch;
  lattice_aligned_ = near_integer(steps) && std::round(steps) >= 1.0 && near_integer(start);
  if (!lattice_aligned_) {
    return;
  }
  step_cells_ = static_cast<int>(std::round(steps));

  // On an aligned lattice, shifting the pose by one action step shifts every
  // footprint weight by exactly step_cells_, so each rotation reduces to one
  // weighted stencil slid across a replicate-padded copy of the map.
  SoftSampler sample{grid_.state_taxels(), grid_.state_side(), beta_c_, drop_tolerance_, {}, {}, {}};
  const double x0 = actions_.xs().front();
  const double y0 = actions_.ys().front();
  int row_lo = 0, row_hi = 0, col_lo = 0, col_hi = 0;
  bool first = true;
  std::vector<CellWeight> cells;
  for (double theta : actions_.thetas()) {
    const MotionParams m{x0, y0, theta};
    const Eigen::Matrix2d rot = m.rotation();
    cells.clear();
    for (Eigen::Index k = 0; k < sensor_cells_.cols(); ++k) {
      const auto & soft = sample(rot * sensor_cells_.col(k) + m.translation());
      cells.insert(cells.end(), soft.begin(), soft.end());
    }
    std::sort(cells.begin(), cells.end(), [](const CellWeight & a, const CellWeight & b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    Footprint fp;
    for (std::size_t i = 0; i < cells.size();) {
      double weight = 0.0;
      std::size_t j = i;
      for (; j < cells.size() && cells[j].row == cells[i].row && cells[j].col == cells[i].col; ++j) {
        weight += cells[j].weight;
      }
      fp.rows.push_back(cells[i].row);
      fp.cols.push_back(cells[i].col);
      fp.weights.push_back(weight);
      if (first) {
        row_lo = row_hi = cells[i].row;
        col_lo = col_hi = cells[i].col;
        first = false;
      }
      row_lo = std::min(row_lo, cells[i].row);
      row_hi = std::max(row_hi, cells[i].row);
      col_lo = std::min(col_lo, cells[i].col);
      col_hi = std::max(col_hi, cells[i].col);
      i = j;
    }
    footprints_.push_back(std::move(fp));
  }
  const int span_x = static_cast<int>(actions_.xs().size() - 1) * step_cells_;
  const int span_y = static_cast<int>(actions_.ys().size() - 1) * step_cells_;
  pad_row_lo_ = row_lo;
  pad_col_lo_ = col_lo;
  pad_rows_ = row_hi + span_y - row_lo + 1;
  pad_cols_ = col_hi + span_x - col_lo + 1;
}

double FootprintScorer::score(const Eigen::VectorXd & map, const MotionParams & m) const
{
  const int side = grid_.state_taxels();
  require(
    map.size() == grid_.cell_count(GridKind::kState), ErrorCode::kDimensionMismatch,
    "map does not match the state grid");
  SoftSampler sample{side, grid_.state_side(), beta_c_, drop_tolerance_, {}, {}, {}};
  const Eigen::Matrix2d rot = m.rotation();
  double total = 0.0;
  for (Eigen::Index k = 0; k < sensor_cells_.cols(); ++k) {
    for (const auto & cw : sample(rot * sensor_cells_.col(k) + m.translation())) {
      const int r = std::clamp(cw.row, 0, side - 1);
      const int c = std::clamp(cw.col, 0, side - 1);
      total += cw.weight * map[flat_index(r, c, side)];
    }
  }
  return total;
}

std::vector<double> FootprintScorer::score_all_direct(const Eigen::VectorXd & map, int threads) const
{
  std::vector<double> scores(actions_.size());
  const std::size_t per_theta = actions_.xs().size() * actions_.ys().size();
  parallel_for(actions_.thetas().size(), threads, [&](std::size_t it) {
    for (std::size_t i = it * per_theta; i < (it + 1) * per_theta; ++i) {
      scores[i] = score(map, actions_.at(i));
    }
  });
  return scores;
}

void FootprintScorer::score_rotation(const std::vector<double> & padded, std::size_t itheta, double * out) const
{
  const Footprint & fp = footprints_[itheta];
  const std::size_t nx = actions_.xs().size();
  const std::size_t ny = actions_.ys().size();
  std::fill(out, out + nx * ny, 0.0);
  const auto stride = static_cast<std::size_t>(pad_cols_);
  const auto step = static_cast<std::size_t>(step_cells_);
  for (std::size_t k = 0; k < fp.weights.size(); ++k) {
    const double weight = fp.weights[k];
    const auto row0 = static_cast<std::size_t>(fp.rows[k] - pad_row_lo_);
    const auto col0 = static_cast<std::size_t>(fp.cols[k] - pad_col_lo_);
    for (std::size_t sy = 0; sy < ny; ++sy) {
      const double * src = padded.data() + (row0 + sy * step) * stride + col0;
      double * dst = out + sy * nx;
      if (step == 1) {
        for (std::size_t sx = 0; sx < nx; ++sx) {
          dst[sx] += weight * src[sx];
        }
      } else {
        for (std::size_t sx = 0; sx < nx; ++sx) {
          dst[sx] += weight * src[sx * step];
        }
      }
    }
  }
}

std::vector<double> FootprintScorer::score_all(const Eigen::VectorXd & map, int threads) const
{
  require(
    map.size() == grid_.cell_count(GridKind::kState), ErrorCode::kDimensionMismatch,
    "map does not match the state grid");
  if (!lattice_aligned_) {
    return score_all_direct(map, threads);
  }

  const int side = grid_.state_taxels();
  std::vector<double> padded(static_cast<std::size_t>(pad_rows_) * pad_cols_);
  for (int r = 0; r < pad_rows_; ++r) {
    const int sr = std::clamp(r + pad_row_lo_, 0, side - 1);
    for (int c = 0; c < pad_cols_; ++c) {
      const int sc = std::clamp(c + pad_col_lo_, 0, side - 1);
      padded[static_cast<std::size_t>(r) * pad_cols_ + c] = map[flat_index(sr, sc, side)];
    }
  }

  std::vector<double> scores(actions_.size());
  const std::size_t per_theta = actions_.xs().size() * actions_.ys().size();
  parallel_for(actions_.thetas().size(), threads, [&](std::size_t it) {
    score_rotation(padded, it, scores.data() + it * per_theta);
  });
  return scores;
}

std::size_t argmax_first(const std::vector<double> & scores)
{
  require(!scores.empty(), ErrorCode::kInvalidArgument, "no candidates to choose from");
  double peak = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isnan(scores[i]) && (!found || scores[i] > peak)) {
      peak = scores[i];
      best = i;
      found = true;
    }
  }
  if (!std::isfinite(peak)) {
    return best;
  }
  const double floor = peak - kScoreTieTolerance * std::abs(peak);
  for (std::size_t i = 0; i < best; ++i) {
    if (scores[i] >= floor) {
      return i;
    }
  }
  return best;
}

Selection select_action(
  const DecisionMaps & maps, const FootprintScorer & scorer, Policy policy, std::mt19937_64 & rng, int threads)
{
  const ActionSpace & actions = scorer.actions();
  require(actions.size() > 0, ErrorCode::kInvalidArgument, "empty action space");
  Selection pick;
  if (policy == Policy::kRandom) {
    std::uniform_int_distribution<std::size_t> draw(0, actions.size() - 1);
    pick.index = draw(rng);
    pick.motion = actions.at(pick.index);
    pick.score = std::nan("");
    return pick;
  }
  const Eigen::VectorXd & map = policy == Policy::kActive ? maps.decision : maps.uncertainty;
  const std::vector<double> scores = scorer.score_all(map, threads);
  pick.index = argmax_first(scores);
  pick.motion = actions.at(pick.index);
  pick.score = scores[pick.index];
  return pick;
}

}  // namespace taprecon
