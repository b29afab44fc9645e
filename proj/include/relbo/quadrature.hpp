#pragma once

// Gauss-Hermite quadrature for expectations under a Gaussian weight.
//
// Nodes and weights are obtained from the symmetric tridiagonal Jacobi
// matrix of the Hermite recurrence (Golub-Welsch): eigenvalues are the
// nodes, and the squared first eigenvector components scaled by sqrt(pi)
// are the weights for the weight function exp(-t^2).

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace relbo {

struct GaussHermiteRule {
  std::vector<double> nodes;    // roots t_i of the Hermite polynomial
  std::vector<double> weights;  // weights for integral f(t) exp(-t^2) dt
};

/// Returns the n-point Gauss-Hermite rule; rules are cached per size and
/// safe to request from multiple threads.
inline const GaussHermiteRule& gauss_hermite_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_rule: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("gauss_hermite_rule: eigensolver failed");
  }
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = sqrt_pi * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

/// n-point Gauss-Hermite approximation of E[f(X)] for X ~ N(mean, variance).
template <typename F>
double gauss_hermite_expectation(F&& f, double mean, double variance, int n) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument(
        "gauss_hermite_expectation: variance must be > 0");
  }
  const GaussHermiteRule& rule = gauss_hermite_rule(n);
  const double scale = std::sqrt(2.0 * variance);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += rule.weights[i] * f(mean + scale * rule.nodes[i]);
  }
  return inv_sqrt_pi * sum;
}

}  // namespace relbo
