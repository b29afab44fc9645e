#pragma once

// Scalar and multivariate Gaussian distributions with closed-form KL and
// Renyi divergences.
//
// The Renyi divergence of order alpha between N(mu_i, S_i) and N(mu_j, S_j)
// uses the combination matrix S* = (1-alpha) S_i + alpha S_j:
//
//   D_alpha = (alpha/2) (mu_i-mu_j)^T S*^{-1} (mu_i-mu_j)
//             - (1/(2(alpha-1))) log( |S*| / (|S_i|^{1-alpha} |S_j|^alpha) ).
//
// For 0 < alpha < 1 the combination is always positive definite; for
// alpha > 1 it can fail to be, in which case the divergence is +infinity
// and the sentinel is returned.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "relbo/common.hpp"
#include "relbo/order.hpp"

namespace relbo {

/// A univariate Gaussian N(mean, variance), variance > 0.
class Gaussian1 {
 public:
  Gaussian1(double mean, double variance) : mean_(mean), variance_(variance) {
    if (!(variance > 0.0)) {
      throw std::invalid_argument("Gaussian1: variance must be > 0");
    }
  }

  double mean() const { return mean_; }
  double variance() const { return variance_; }

  double log_pdf(double x) const {
    const double d = x - mean_;
    return -0.5 * (std::log(2.0 * M_PI * variance_) + d * d / variance_);
  }

 private:
  double mean_;
  double variance_;
};

namespace detail {

constexpr double kRelativeEigFloor = 1e-12;

/// Positive definiteness test used everywhere: the smallest eigenvalue must
/// exceed 1e-12 times the largest; borderline matrices are rejected.
inline bool is_positive_definite(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const double largest = es.eigenvalues().maxCoeff();
  return largest > 0.0 &&
         es.eigenvalues().minCoeff() > kRelativeEigFloor * largest;
}

inline double log_det_positive_definite(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("log_det: matrix is not positive definite");
  }
  double ld = 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < m.rows(); ++i) ld += std::log(l(i, i));
  return 2.0 * ld;
}

}  // namespace detail

/// A multivariate Gaussian N(mean, covariance). The covariance must be
/// symmetric within 1e-12 relative and positive definite (smallest
/// eigenvalue > 1e-12 times the largest).
class GaussianN {
 public:
  GaussianN(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
      : mean_(std::move(mean)), cov_(std::move(covariance)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size()) {
      throw std::invalid_argument("GaussianN: inconsistent dimensions");
    }
    const double scale = cov_.cwiseAbs().maxCoeff();
    const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1e-300)) {
      throw std::invalid_argument("GaussianN: covariance is not symmetric");
    }
    // Symmetrize roundoff so downstream factorizations are exact about it.
    cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
    if (!detail::is_positive_definite(cov_)) {
      throw std::invalid_argument(
          "GaussianN: covariance is not positive definite");
    }
  }

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }

  double log_pdf(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) {
      throw std::invalid_argument("GaussianN::log_pdf: dimension mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    const Eigen::VectorXd d = x - mean_;
    const double quad = d.dot(llt.solve(d));
    return -0.5 * (dim() * std::log(2.0 * M_PI) +
                   detail::log_det_positive_definite(cov_) + quad);
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Closed-form Renyi divergence between univariate Gaussians; +infinity when
/// the combination variance (1-alpha) v_i + alpha v_j is not positive.
inline double renyi_divergence_gaussian(const Gaussian1& gi, const Gaussian1& gj,
                                        RenyiOrder order) {
  const double a = order.alpha();
  const double vi = gi.variance();
  const double vj = gj.variance();
  const double vstar = (1.0 - a) * vi + a * vj;
  if (!(vstar > 0.0)) return infinity();
  const double d = gi.mean() - gj.mean();
  const double quad = 0.5 * a * d * d / vstar;
  const double logdet =
      std::log(vstar) - (1.0 - a) * std::log(vi) - a * std::log(vj);
  return quad - logdet / (2.0 * (a - 1.0));
}

/// Closed-form KL divergence between univariate Gaussians; the alpha -> 1
/// limit of the Renyi divergence.
inline double kl_divergence_gaussian(const Gaussian1& gi, const Gaussian1& gj) {
  const double d = gi.mean() - gj.mean();
  const double r = gi.variance() / gj.variance();
  return 0.5 * (r + d * d / gj.variance() - 1.0 - std::log(r));
}

/// Closed-form Renyi divergence between multivariate Gaussians of equal
/// dimension; +infinity when the combination matrix is not positive definite
/// (possible only for alpha > 1).
inline double renyi_divergence_gaussian(const GaussianN& gi, const GaussianN& gj,
                                        RenyiOrder order) {
  if (gi.dim() != gj.dim()) {
    throw std::invalid_argument("renyi_divergence_gaussian: dimension mismatch");
  }
  const double a = order.alpha();
  const Eigen::MatrixXd sigma_star =
      (1.0 - a) * gi.covariance() + a * gj.covariance();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_star);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("renyi_divergence_gaussian: eigensolver failed");
  }
  const double largest = es.eigenvalues().maxCoeff();
  if (!(largest > 0.0) ||
      es.eigenvalues().minCoeff() <= detail::kRelativeEigFloor * largest) {
    return infinity();
  }
  const Eigen::VectorXd d = gi.mean() - gj.mean();
  const Eigen::VectorXd dr = es.eigenvectors().transpose() * d;
  const double quad =
      (dr.array().square() / es.eigenvalues().array()).sum();
  const double logdet_star = es.eigenvalues().array().log().sum();
  const double logdet_i = detail::log_det_positive_definite(gi.covariance());
  const double logdet_j = detail::log_det_positive_definite(gj.covariance());
  const double logdet_ratio =
      logdet_star - (1.0 - a) * logdet_i - a * logdet_j;
  return 0.5 * a * quad - logdet_ratio / (2.0 * (a - 1.0));
}

/// Closed-form KL divergence between multivariate Gaussians of equal
/// dimension.
inline double kl_divergence_gaussian(const GaussianN& gi, const GaussianN& gj) {
  if (gi.dim() != gj.dim()) {
    throw std::invalid_argument("kl_divergence_gaussian: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gj.covariance());
  const Eigen::VectorXd d = gi.mean() - gj.mean();
  const double quad = d.dot(llt.solve(d));
  const double trace = llt.solve(gi.covariance()).trace();
  const double logdet_i = detail::log_det_positive_definite(gi.covariance());
  const double logdet_j = detail::log_det_positive_definite(gj.covariance());
  return 0.5 * (trace + quad - static_cast<double>(gi.dim()) + logdet_j -
                logdet_i);
}

}  // namespace relbo
