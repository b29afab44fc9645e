#pragma once

// Independent numerical oracles for the Gaussian Renyi divergence: adaptive
// quadrature in one dimension and importance-weighted Monte Carlo in any
// dimension. These deliberately avoid the closed forms they are used to
// check: they integrate p^alpha q^{1-alpha} directly and then apply
// (1/(alpha-1)) log.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "relbo/common.hpp"
#include "relbo/gaussian.hpp"
#include "relbo/order.hpp"

namespace relbo {

enum class OracleMode { quadrature, montecarlo };

/// Quadrature oracle for the 1-D Gaussian Renyi divergence. Integrates the
/// product density adaptively on an interval of +-12 pooled standard
/// deviations around the two means (tails below 1e-30 there) and reports
/// the propagated error estimate. Divergent integrals (alpha > 1 with a
/// non-positive combination variance) are reported as {+inf, +inf}.
inline ValueWithError oracle_renyi_divergence_quadrature(const Gaussian1& gi,
                                                         const Gaussian1& gj,
                                                         RenyiOrder order,
                                                         int max_depth = 15) {
  const double a = order.alpha();
  const double vstar = (1.0 - a) * gi.variance() + a * gj.variance();
  if (!(vstar > 0.0)) return {infinity(), infinity()};
  const double pooled =
      std::sqrt(std::max(gi.variance(), gj.variance()));
  const double lo = std::min(gi.mean(), gj.mean()) - 12.0 * pooled;
  const double hi = std::max(gi.mean(), gj.mean()) + 12.0 * pooled;
  auto integrand = [&](double x) {
    return std::exp(a * gi.log_pdf(x) + (1.0 - a) * gj.log_pdf(x));
  };
  double integral_error = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, lo, hi, max_depth, 1e-13, &integral_error);
  if (!(integral > 0.0)) return {infinity(), infinity()};
  const double value = std::log(integral) / (a - 1.0);
  const double error = integral_error / (integral * std::abs(a - 1.0));
  return {value, error};
}

/// Monte Carlo oracle for the Renyi divergence between Gaussians of any
/// dimension: E_{x ~ gi}[ (p_j(x)/p_i(x))^{1-alpha} ] estimated with
/// `budget` samples, then mapped through (1/(alpha-1)) log. The reported
/// error is the delta-method standard error of the log transform.
/// Deterministic for a fixed seed.
inline ValueWithError oracle_renyi_divergence_montecarlo(
    const GaussianN& gi, const GaussianN& gj, RenyiOrder order,
    std::uint64_t budget, std::uint64_t seed) {
  if (gi.dim() != gj.dim()) {
    throw std::invalid_argument("montecarlo oracle: dimension mismatch");
  }
  if (budget == 0) {
    throw std::invalid_argument("montecarlo oracle: budget must be positive");
  }
  const double a = order.alpha();
  Eigen::LLT<Eigen::MatrixXd> llt(gi.covariance());
  const Eigen::MatrixXd chol = llt.matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(gi.dim());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t s = 0; s < budget; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const Eigen::VectorXd x = gi.mean() + chol * z;
    const double w = std::exp((1.0 - a) * (gj.log_pdf(x) - gi.log_pdf(x)));
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(budget);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean) / (n - 1.0);
  if (!(mean > 0.0)) return {infinity(), infinity()};
  const double value = std::log(mean) / (a - 1.0);
  const double error = std::sqrt(var) / (mean * std::abs(a - 1.0));
  return {value, error};
}

/// Unified front end matching the two oracle modes. Quadrature is only
/// available in dimension 1.
inline ValueWithError oracle_renyi_divergence(const GaussianN& gi,
                                              const GaussianN& gj,
                                              RenyiOrder order, OracleMode mode,
                                              std::uint64_t budget,
                                              std::uint64_t seed = 0) {
  if (mode == OracleMode::quadrature) {
    if (gi.dim() != 1) {
      throw std::invalid_argument(
          "quadrature oracle: only dimension 1 is supported");
    }
    const Gaussian1 a1(gi.mean()(0), gi.covariance()(0, 0));
    const Gaussian1 b1(gj.mean()(0), gj.covariance()(0, 0));
    return oracle_renyi_divergence_quadrature(a1, b1, order);
  }
  return oracle_renyi_divergence_montecarlo(gi, gj, order, budget, seed);
}

}  // namespace relbo
