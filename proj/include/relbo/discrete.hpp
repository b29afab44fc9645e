#pragma once

// Finite discrete distributions with Shannon and Renyi entropies,
// KL and Renyi divergences, the normalized geometric mixture, and the
// three-distribution decomposition identity used as a randomized test.
//
// Conventions: natural logarithms (nats) throughout; 0*log(0) and 0^a are
// treated as 0 by continuous extension; divergent values return the
// +infinity sentinel rather than raising.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "relbo/common.hpp"
#include "relbo/order.hpp"

namespace relbo {

/// A probability distribution on a finite support {0, ..., n-1}.
/// Entries must be non-negative and sum to 1 within 1e-12.
class DiscreteDist {
 public:
  explicit DiscreteDist(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw std::invalid_argument("DiscreteDist: empty support");
    }
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) {
        throw std::invalid_argument("DiscreteDist: negative entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("DiscreteDist: entries sum to " +
                                  std::to_string(sum) + ", expected 1");
    }
  }

  std::size_t support_size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

namespace detail {
inline void require_same_support(const DiscreteDist& p, const DiscreteDist& q) {
  if (p.support_size() != q.support_size()) {
    throw std::invalid_argument("discrete divergence: support sizes differ");
  }
}
}  // namespace detail

/// Shannon entropy sum_x p(x) * (-log p(x)) in nats.
inline double shannon_entropy_discrete(const DiscreteDist& p) {
  double h = 0.0;
  for (double pi : p.probs()) {
    if (pi > 0.0) h -= pi * std::log(pi);
  }
  return h;
}

/// Renyi entropy (1/(1-alpha)) * log sum_x p(x)^alpha.
inline double renyi_entropy_discrete(const DiscreteDist& p, RenyiOrder order) {
  const double a = order.alpha();
  double s = 0.0;
  for (double pi : p.probs()) {
    if (pi > 0.0) s += std::pow(pi, a);
  }
  return std::log(s) / (1.0 - a);
}

/// KL divergence sum_x p(x) log(p(x)/q(x)); +infinity when q vanishes
/// somewhere p does not (absolute continuity failure).
inline double kl_divergence_discrete(const DiscreteDist& p,
                                     const DiscreteDist& q) {
  detail::require_same_support(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.support_size(); ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    if (q[i] == 0.0) return infinity();
    d += pi * std::log(pi / q[i]);
  }
  return d;
}

/// Renyi divergence (1/(alpha-1)) * log sum_x p(x)^alpha q(x)^{1-alpha}.
///
/// Terms with p(x) = 0 drop out. Terms with q(x) = 0 and p(x) > 0 drop out
/// for alpha < 1 and force +infinity for alpha > 1. A vanishing sum (e.g.
/// disjoint supports at alpha < 1) also yields +infinity.
inline double renyi_divergence_discrete(const DiscreteDist& p,
                                        const DiscreteDist& q,
                                        RenyiOrder order) {
  detail::require_same_support(p, q);
  const double a = order.alpha();
  double s = 0.0;
  for (std::size_t i = 0; i < p.support_size(); ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    if (q[i] == 0.0) {
      if (a > 1.0) return infinity();
      continue;
    }
    s += std::pow(pi, a) * std::pow(q[i], 1.0 - a);
  }
  if (s <= 0.0) return infinity();
  return std::log(s) / (a - 1.0);
}

/// Normalized geometric mixture p_alpha(x) proportional to
/// p(x)^alpha q(x)^{1-alpha}.
inline DiscreteDist mixed_discrete(const DiscreteDist& p,
                                   const DiscreteDist& q, RenyiOrder order) {
  detail::require_same_support(p, q);
  const double a = order.alpha();
  std::vector<double> w(p.support_size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < p.support_size(); ++i) {
    double wi = 0.0;
    if (p[i] > 0.0 && q[i] > 0.0) {
      wi = std::pow(p[i], a) * std::pow(q[i], 1.0 - a);
    } else if (p[i] > 0.0 && a > 1.0) {
      throw std::domain_error("mixed_discrete: non-normalizable weight");
    }
    w[i] = wi;
    z += wi;
  }
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error("mixed_discrete: zero normalizer");
  }
  for (double& wi : w) wi /= z;
  return DiscreteDist(std::move(w));
}

/// Residual of the decomposition
///   alpha*D[R||P] + (1-alpha)*D[R||Q]
///     = D[R||p_alpha] + (1-alpha)*D_alpha[P||Q],
/// which holds exactly for all finite inputs; any divergent term propagates
/// the +infinity sentinel.
inline double identity_b1_residual(const DiscreteDist& r, const DiscreteDist& p,
                                   const DiscreteDist& q, RenyiOrder order) {
  const double a = order.alpha();
  const double drp = kl_divergence_discrete(r, p);
  const double drq = kl_divergence_discrete(r, q);
  const double dpq = renyi_divergence_discrete(p, q, order);
  if (is_divergent(drp) || is_divergent(drq) || is_divergent(dpq)) {
    return infinity();
  }
  const DiscreteDist pa = mixed_discrete(p, q, order);
  const double drpa = kl_divergence_discrete(r, pa);
  if (is_divergent(drpa)) return infinity();
  return a * drp + (1.0 - a) * drq - drpa - (1.0 - a) * dpq;
}

}  // namespace relbo
