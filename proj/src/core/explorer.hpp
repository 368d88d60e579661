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

#ifndef TAPRECON_CORE_EXPLORER_HPP_
#define TAPRECON_CORE_EXPLORER_HPP_

#include "core/grid.hpp"
#include "core/kalman.hpp"
#include "core/sensor_model.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace taprecon
{

enum class Policy { kActive, kPureUncertainty, kRandom };

const char * policy_name(Policy policy);
std::optional<Policy> parse_policy(std::string_view name);

inline constexpr double kDefaultLambda = 0.7;

/// Per-cell maps over the state grid used to rank candidate taps.
struct DecisionMaps
{
  Eigen::VectorXd gradient;     // (1 - e^{-lambda t}) |grad mu|/max + e^{-lambda t}
  Eigen::VectorXd uncertainty;  // 1/2 log(2 pi sigma_ii^2) + 1/2
  Eigen::VectorXd decision;     // gradient .* uncertainty
  double lambda = kDefaultLambda;
  long t = 0;
};

/// Sobel gradient magnitude of the mean, scaled so its maximum is 1 (all zeros
/// for a flat mean).
Eigen::VectorXd normalized_gradient_magnitude(const Eigen::VectorXd & mean, const GradientOperators & state_ops);

Eigen::VectorXd gradient_map(
  const StateEstimate & state, double lambda, long t, const GradientOperators & state_ops);

/// Differential entropy of each cell's marginal. Throws on a non-positive
/// variance.
Eigen::VectorXd uncertain_map(const StateEstimate & state);

DecisionMaps decision_maps(
  const StateEstimate & state, double lambda, long t, const GradientOperators & state_ops);

/// Scores a candidate pose as the sum over rows of C(m) * map. Each
/// transformed HR cell centre spreads over the few state cells its Gaussian
/// weights reach (usually one); weights are evaluated on the unbounded
/// lattice and then clamped to the region edge.
class FootprintScorer
{
public:
  FootprintScorer(
    const GridSpec & grid, const ActionSpace & actions, double beta_c = kDefaultBetaC,
    double drop_tolerance = kDefaultClipDropTolerance);

  double score(const Eigen::VectorXd & map, const MotionParams & m) const;

  /// Scores for every action, in enumeration order. Work is split by
  /// rotation across `threads`; the result does not depend on the split.
  std::vector<double> score_all(const Eigen::VectorXd & map, int threads = 1) const;

  const ActionSpace & actions() const { return actions_; }

private:
  struct Footprint
  {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> weights;
  };

  std::vector<double> score_all_direct(const Eigen::VectorXd & map, int threads) const;
  void score_rotation(const std::vector<double> & padded, std::size_t itheta, double * out) const;

  GridSpec grid_;
  ActionSpace actions_;
  Eigen::Matrix2Xd sensor_cells_;
  double beta_c_;
  double drop_tolerance_;
  bool lattice_aligned_ = false;
  int step_cells_ = 0;
  std::vector<Footprint> footprints_;  // per rotation, at the first x/y
  int pad_row_lo_ = 0, pad_col_lo_ = 0, pad_rows_ = 0, pad_cols_ = 0;
};

struct Selection
{
  MotionParams motion;
  std::size_t index = 0;
  double score = 0.0;
};

/// Highest-scoring action (lowest index on ties) for the active and
/// pure-uncertainty policies; a uniform draw for the random policy.
Selection select_action(
  const DecisionMaps & maps, const FootprintScorer & scorer, Policy policy, std::mt19937_64 & rng,
  int threads = 1);

/// Scores within this relative distance of the maximum count as tied.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Index of the first score tied with the maximum; NaN scores never win.
/// Mirror-image poses (theta = +-90 degrees) cover identical cells, so exact
/// ties only survive rounding with a tolerance.
std::size_t argmax_first(const std::vector<double> & scores);

}  // namespace taprecon

#endif  // TAPRECON_CORE_EXPLORER_HPP_
