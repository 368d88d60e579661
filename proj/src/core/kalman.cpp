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

#include "core/kalman.hpp"

#include "core/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace taprecon
{

namespace
{

Eigen::MatrixXd kernel_1d(const GridSpec & grid, double length_scale)
{
  const int side = grid.state_taxels();
  Eigen::MatrixXd k(side, side);
  for (int a = 0; a < side; ++a) {
    const double xa = cell_center_coordinate(a, side, grid.state_side());
    for (int b = 0; b < side; ++b) {
      const double d = xa - cell_center_coordinate(b, side, grid.state_side());
      k(a, b) = std::exp(-(d * d) / (length_scale * length_scale));
    }
  }
  return k;
}

void validate_prior(const PriorConfig & prior)
{
  require(
    std::isfinite(prior.amplitude) && prior.amplitude > 0.0, ErrorCode::kInvalidArgument,
    "prior amplitude must be positive");
  require(
    std::isfinite(prior.length_scale) && prior.length_scale > 0.0, ErrorCode::kInvalidArgument,
    "prior length scale must be positive");
  require(std::isfinite(prior.mean), ErrorCode::kInvalidArgument, "prior mean must be finite");
}

}  // namespace

double prior_min_eigenvalue(const GridSpec & grid, const PriorConfig & prior)
{
  validate_prior(prior);
  const Eigen::VectorXd lambda =
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(kernel_1d(grid, prior.length_scale), Eigen::EigenvaluesOnly)
      .eigenvalues();
  // eigenvalues of K (x) K are all pairwise products
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  const double smallest = std::min({lo * lo, lo * hi, hi * hi});
  return prior.amplitude * (smallest + kPriorJitter);
}

StateEstimate init_state(const GridSpec & grid, const PriorConfig & prior)
{
  validate_prior(prior);
  const double min_eig = prior_min_eigenvalue(grid, prior);
  if (!(min_eig > 0.0)) {
    std::ostringstream msg;
    msg << "prior covariance is not positive definite after jitter (smallest eigenvalue " << min_eig << ")";
    fail(ErrorCode::kNumerical, msg.str());
  }

  const int side = grid.state_taxels();
  const Eigen::Index n = grid.cell_count(GridKind::kState);
  const Eigen::MatrixXd k = kernel_1d(grid, prior.length_scale);

  StateEstimate state;
  state.mean = Eigen::VectorXd::Constant(n, prior.mean);
  state.covariance.resize(n, n);
  for (int rj = 0; rj < side; ++rj) {
    for (int cj = 0; cj < side; ++cj) {
      double * column = state.covariance.col(flat_index(rj, cj, side)).data();
      for (int ri = 0; ri < side; ++ri) {
        const double factor = prior.amplitude * k(ri, rj);
        for (int ci = 0; ci < side; ++ci) {
          column[flat_index(ri, ci, side)] = factor * k(ci, cj);
        }
      }
    }
  }
  state.covariance.diagonal().array() += kPriorJitter * prior.amplitude;
  state.taps = 0;
  return state;
}

void mirror_lower(Eigen::MatrixXd & m)
{
  constexpr Eigen::Index kBlock = 64;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; j += kBlock) {
    const Eigen::Index bj = std::min(kBlock, n - j);
    // diagonal block
    for (Eigen::Index c = 0; c < bj; ++c) {
      for (Eigen::Index r = c + 1; r < bj; ++r) {
        m(j + c, j + r) = m(j + r, j + c);
      }
    }
    for (Eigen::Index i = j + kBlock; i < n; i += kBlock) {
      const Eigen::Index bi = std::min(kBlock, n - i);
      m.block(j, i, bj, bi) = m.block(i, j, bi, bj).transpose();
    }
  }
}

AxisUpdateStats update_axis(
  StateEstimate & state, const Eigen::VectorXd & obs, const Eigen::MatrixXd & observation_matrix,
  const Eigen::VectorXd & noise_variance)
{
  const Eigen::Index n = state.mean.size();
  const Eigen::Index k = obs.size();
  require(
    state.covariance.rows() == n && state.covariance.cols() == n, ErrorCode::kDimensionMismatch,
    "state covariance does not match the mean");
  require(
    observation_matrix.rows() == k && observation_matrix.cols() == n, ErrorCode::kDimensionMismatch,
    "observation matrix must be " + std::to_string(k) + " x " + std::to_string(n));
  require(noise_variance.size() == k, ErrorCode::kDimensionMismatch, "noise covariance size mismatch");
  require(obs.allFinite(), ErrorCode::kInvalidArgument, "observation contains non-finite values");

  const Eigen::MatrixXd & a = observation_matrix;
  Eigen::MatrixXd & sigma = state.covariance;

  AxisUpdateStats stats;
  stats.trace_before = sigma.trace();

  // A Sigma == P^T because Sigma is kept exactly symmetric
  const Eigen::MatrixXd pt = a * sigma;
  Eigen::MatrixXd s = pt * a.transpose();
  s.diagonal() += noise_variance;
  s = 0.5 * (s + s.transpose()).eval();

  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    fail(
      ErrorCode::kNumerical,
      "innovation covariance is not positive definite; use a strictly positive noise floor");
  }
  const Eigen::MatrixXd kt = llt.solve(pt);  // K^T

  const Eigen::VectorXd innovation = obs - a * state.mean;
  state.mean.noalias() += kt.transpose() * innovation;

  // Joseph form: (I - KA) Sigma (I - KA)^T + K Q K^T
  //            = Sigma + K B + B^T K^T,  B = S K^T / 2 - P^T
  const Eigen::MatrixXd b = 0.5 * s * kt - pt;
  sigma.triangularView<Eigen::Lower>() += kt.transpose() * b;
  sigma.triangularView<Eigen::Lower>() += b.transpose() * kt;
  mirror_lower(sigma);

  stats.trace_after = sigma.trace();
  return stats;
}

TapUpdateStats update_tap(
  StateEstimate & state, const ObservationFrame & frame, const SensorModel & sensor,
  const TapUpdateOptions & options)
{
  const Eigen::Index lr_cells = sensor.grid().cell_count(GridKind::kLrSensor);
  for (Axis axis : kAllAxes) {
    const auto & v = frame.axis(axis);
    require(
      !options.enabled[static_cast<int>(axis)] || v.size() == lr_cells, ErrorCode::kDimensionMismatch,
      std::string("LR reading for axis ") + axis_name(axis) + " has the wrong length");
  }

  const ClipMatrix clip = sensor.clip(frame.motion);
  TapUpdateStats stats;
  stats.clip_fallback_rows = clip.fallback_rows;
  for (Axis axis : options.order) {
    if (!options.enabled[static_cast<int>(axis)]) {
      continue;
    }
    const Eigen::MatrixXd a = sensor.composite(axis, clip);
    stats.axes[stats.updated_axes++] =
      update_axis(state, frame.axis(axis), a, sensor.noise().covariance_diagonal(axis, lr_cells));
  }
  ++state.taps;
  return stats;
}

Eigen::VectorXd predict_hr(const StateEstimate & state, const ClipMatrix & clip)
{
  require(
    clip.weights.cols() == state.mean.size(), ErrorCode::kDimensionMismatch,
    "clip matrix does not match the state");
  return clip.weights * state.mean;
}

Eigen::VectorXd predict_hr(const StateEstimate & state, const MotionParams & m, const SensorModel & sensor)
{
  return predict_hr(state, sensor.clip(m));
}

Eigen::VectorXd predict_hr_variance(const StateEstimate & state, const ClipMatrix & clip)
{
  require(
    clip.weights.cols() == state.mean.size(), ErrorCode::kDimensionMismatch,
    "clip matrix does not match the state");
  Eigen::VectorXd var(clip.weights.rows());
  for (Eigen::Index i = 0; i < clip.weights.outerSize(); ++i) {
    double acc = 0.0;
    for (SparseRowMatrix::InnerIterator a(clip.weights, i); a; ++a) {
      for (SparseRowMatrix::InnerIterator b(clip.weights, i); b; ++b) {
        acc += a.value() * b.value() * state.covariance(a.col(), b.col());
      }
    }
    var[i] = acc;
  }
  return var;
}

}  // namespace taprecon
