#pragma once

// Scaled unscented transform for the 5-dimensional person state
// [x, y, vx, vy, neck height].

#include <array>

#include <Eigen/Core>

namespace panotrack {

inline constexpr int kStateDim = 5;
inline constexpr int kSigmaCount = 2 * kStateDim + 1;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateCovariance = Eigen::Matrix<double, kStateDim, kStateDim>;
using SigmaPoints = Eigen::Matrix<double, kStateDim, kSigmaCount>;

struct UkfParams {
  double alpha = 1e-1;
  double beta = 2.0;
  double kappa = 0.0;
  // Variance rates per second for x, y, vx, vy, h_n.
  std::array<double, kStateDim> process_noise{0.05, 0.05, 0.5, 0.5, 0.01};
  // Per-coordinate pixel variance at full resolution.
  double measurement_noise = 4.0;
};

struct SigmaWeights {
  double lambda = 0.0;
  std::array<double, kSigmaCount> mean{};
  std::array<double, kSigmaCount> cov{};
};

/// Merwe scaled weights. Throws ConfigError for alpha <= 0 or n + lambda <= 0.
SigmaWeights sigma_weights(const UkfParams& params);

/// Smallest eigenvalue allowed after repair; covariances are nudged up to it.
inline constexpr double kCovarianceFloor = 1e-12;

/// Symmetrizes `p` and adds diagonal jitter until a Cholesky factorization
/// succeeds. Throws FilterDivergenceError when repair fails.
void repair_covariance(StateCovariance& p);

bool is_spd(const StateCovariance& p);

/// Column 0 is the mean; columns 1..n and n+1..2n are the +/- spreads along
/// the Cholesky factor of (n + lambda) P.
SigmaPoints make_sigma_points(const StateVector& mean, const StateCovariance& cov,
                              const SigmaWeights& w);

}  // namespace panotrack
