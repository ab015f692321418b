#include "panotrack/ukf.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "panotrack/errors.hpp"

namespace panotrack {

SigmaWeights sigma_weights(const UkfParams& params) {
  if (!(params.alpha > 0.0)) throw ConfigError("ukf alpha must be positive");
  constexpr double n = kStateDim;
  SigmaWeights w;
  w.lambda = params.alpha * params.alpha * (n + params.kappa) - n;
  if (!(n + w.lambda > 0.0)) throw ConfigError("ukf spread n + lambda must be positive");
  const double side = 1.0 / (2.0 * (n + w.lambda));
  w.mean.fill(side);
  w.cov.fill(side);
  w.mean[0] = w.lambda / (n + w.lambda);
  w.cov[0] = w.mean[0] + 1.0 - params.alpha * params.alpha + params.beta;
  return w;
}

bool is_spd(const StateCovariance& p) {
  if (!p.allFinite()) return false;
  Eigen::LLT<StateCovariance> llt(p);
  if (llt.info() != Eigen::Success) return false;
  Eigen::SelfAdjointEigenSolver<StateCovariance> eig(p, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > 0.0;
}

void repair_covariance(StateCovariance& p) {
  if (!p.allFinite()) throw FilterDivergenceError("covariance contains non-finite entries");
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<StateCovariance> eig(p);
  const double smallest = eig.eigenvalues().minCoeff();
  if (smallest >= kCovarianceFloor) return;
  // Lift the spectrum to the floor; bounded so a blown-up filter is reported
  // instead of silently reset.
  const double scale = std::max(1.0, p.diagonal().cwiseAbs().maxCoeff());
  if (smallest < -1e-6 * scale) throw FilterDivergenceError("covariance lost positive definiteness");
  p.diagonal().array() += (kCovarianceFloor - smallest);
  if (!is_spd(p)) throw FilterDivergenceError("covariance repair failed");
}

SigmaPoints make_sigma_points(const StateVector& mean, const StateCovariance& cov,
                              const SigmaWeights& w) {
  const StateCovariance scaled = (kStateDim + w.lambda) * cov;
  Eigen::LLT<StateCovariance> llt(scaled);
  if (llt.info() != Eigen::Success) throw FilterDivergenceError("covariance is not positive definite");
  const StateCovariance root = llt.matrixL();
  SigmaPoints pts;
  pts.col(0) = mean;
  for (int i = 0; i < kStateDim; ++i) {
    pts.col(1 + i) = mean + root.col(i);
    pts.col(1 + kStateDim + i) = mean - root.col(i);
  }
  return pts;
}

}  // namespace panotrack
