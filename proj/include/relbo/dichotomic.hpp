#pragma once

// Two-by-two discrete counterexample machinery for the prior-minimizer
// question: the averaged divergence difference F_alpha, a scan over priors
// scaled off the true marginal, exhaustive grid minimization of the
// objective over priors, the Shannon chain-rule decomposition, and the
// variational representation of the Renyi divergence as a minimum over
// auxiliary distributions.

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "relbo/common.hpp"
#include "relbo/discrete.hpp"
#include "relbo/order.hpp"

namespace relbo {

/// Joint distribution p(x, y) on {0,1} x {0,1} with strictly positive
/// marginals so all conditionals exist.
class DichotomicJoint {
 public:
  /// joint[x][y] = p(x, y).
  explicit DichotomicJoint(std::array<std::array<double, 2>, 2> joint)
      : joint_(joint) {
    double sum = 0.0;
    for (const auto& row : joint_) {
      for (double v : row) {
        if (!(v >= 0.0)) {
          throw std::invalid_argument("DichotomicJoint: negative entry");
        }
        sum += v;
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("DichotomicJoint: entries must sum to 1");
    }
    if (!(p_x(0) > 0.0) || !(p_x(1) > 0.0) || !(p_y(0) > 0.0) ||
        !(p_y(1) > 0.0)) {
      throw std::invalid_argument(
          "DichotomicJoint: both marginals must be strictly positive");
    }
  }

  /// Joint built from the x-marginal and the conditional column w0(x) =
  /// W(y=0 | x).
  static DichotomicJoint from_conditional(double px0, double w0_given_x0,
                                          double w0_given_x1) {
    return DichotomicJoint({{{px0 * w0_given_x0, px0 * (1.0 - w0_given_x0)},
                             {(1.0 - px0) * w0_given_x1,
                              (1.0 - px0) * (1.0 - w0_given_x1)}}});
  }

  double joint(int x, int y) const { return joint_[x][y]; }
  double p_x(int x) const { return joint_[x][0] + joint_[x][1]; }
  double p_y(int y) const { return joint_[0][y] + joint_[1][y]; }
  double w(int y, int x) const { return joint_[x][y] / p_x(x); }

  DiscreteDist marginal_y() const { return DiscreteDist({p_y(0), p_y(1)}); }
  DiscreteDist conditional_given(int x) const {
    return DiscreteDist({w(0, x), w(1, x)});
  }

 private:
  std::array<std::array<double, 2>, 2> joint_;
};

/// The standard counterexample joint: p_x = (1/2, 1/2), W(0|0) = 0.01,
/// W(0|1) = 0.001, so the y-marginal puts mass 0.0055 on y = 0.
inline DichotomicJoint default_counterexample_joint() {
  return DichotomicJoint::from_conditional(0.5, 0.01, 0.001);
}

/// Averaged objective sum_x p(x) D_alpha(W(.|x) || q) minimized over priors
/// q in the departure study.
inline double renyi_mi_objective(const DichotomicJoint& joint,
                                 const DiscreteDist& prior, RenyiOrder order) {
  if (prior.support_size() != 2) {
    throw std::invalid_argument("renyi_mi_objective: prior must have size 2");
  }
  double obj = 0.0;
  for (int x = 0; x < 2; ++x) {
    obj += joint.p_x(x) *
           renyi_divergence_discrete(joint.conditional_given(x), prior, order);
  }
  return obj;
}

/// F_alpha(q) = sum_x p(x) [ D_alpha(W(.|x)||q) - D_alpha(W(.|x)||p_y) ]:
/// the objective relative to its value at the true marginal. Computed as a
/// direct divergence difference.
inline double f_alpha(const DichotomicJoint& joint, const DiscreteDist& prior,
                      RenyiOrder order) {
  if (prior.support_size() != 2 || !(prior[0] > 0.0) || !(prior[1] > 0.0)) {
    throw std::invalid_argument("f_alpha: prior must be strictly positive");
  }
  return renyi_mi_objective(joint, prior, order) -
         renyi_mi_objective(joint, joint.marginal_y(), order);
}

/// Same quantity through the algebraically rearranged route
///   -(1/(1-alpha)) sum_x p(x) log sum_y R(y|x) s(y)^{1-alpha}
/// with R(y|x) the normalized geometric mixture of W(.|x) and p_y, and
/// s(y) = q(y)/p_y(y). Used to cross-check the direct route to 1e-12.
inline double f_alpha_mixture_route(const DichotomicJoint& joint,
                                    const DiscreteDist& prior,
                                    RenyiOrder order) {
  if (prior.support_size() != 2 || !(prior[0] > 0.0) || !(prior[1] > 0.0)) {
    throw std::invalid_argument(
        "f_alpha_mixture_route: prior must be strictly positive");
  }
  const double a = order.alpha();
  const DiscreteDist py = joint.marginal_y();
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    const DiscreteDist r = mixed_discrete(joint.conditional_given(x), py, order);
    double s = 0.0;
    for (int y = 0; y < 2; ++y) {
      s += r[y] * std::pow(prior[y] / py[y], 1.0 - a);
    }
    total += joint.p_x(x) * std::log(s);
  }
  return -total / (1.0 - a);
}

struct LimitScanRow {
  double s0 = 0.0;
  double f_alpha = 0.0;
  double f_alpha_plus_log_s0 = 0.0;
};

/// Evaluates F_alpha along priors with q(0) = s0 * p_y(0) for each requested
/// scale s0. Requires q(0) <= 1 for every s0; a scale that pushes the prior
/// off the simplex is an error.
inline std::vector<LimitScanRow> limit_scan(const DichotomicJoint& joint,
                                            RenyiOrder order,
                                            const std::vector<double>& s0_values) {
  std::vector<LimitScanRow> rows;
  rows.reserve(s0_values.size());
  for (double s0 : s0_values) {
    if (!(s0 > 0.0)) {
      throw std::invalid_argument("limit_scan: s0 must be > 0");
    }
    const double q0 = s0 * joint.p_y(0);
    if (q0 >= 1.0) {
      throw std::invalid_argument(
          "limit_scan: requested s0 drives q(0) past 1");
    }
    const DiscreteDist prior({q0, 1.0 - q0});
    const double f = f_alpha(joint, prior, order);
    rows.push_back({s0, f, f + std::log(s0)});
  }
  return rows;
}

struct PriorSearchResult {
  double argmin_q0 = 0.0;
  double best_value = 0.0;         // objective at the grid argmin
  double value_at_marginal = 0.0;  // objective at q = p_y
  bool departs = false;
};

/// Exhaustive grid search over priors q(0) = i/(grid_size+1),
/// i = 1..grid_size, minimizing the averaged objective. `departs` is true
/// iff the argmin sits more than one grid step away from p_y(0) AND beats
/// the objective at p_y by more than 1e-9.
inline PriorSearchResult minimize_over_prior(const DichotomicJoint& joint,
                                             RenyiOrder order, int grid_size) {
  if (grid_size < 101) {
    throw std::invalid_argument("minimize_over_prior: grid_size must be >= 101");
  }
  const double a = order.alpha();
  // Precompute W(y|x)^alpha once; each grid point then costs two powers.
  double wa[2][2];
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      wa[x][y] = std::pow(joint.w(y, x), a);
    }
  }
  const double px0 = joint.p_x(0);
  auto objective = [&](double q0) {
    const double qa0 = std::pow(q0, 1.0 - a);
    const double qa1 = std::pow(1.0 - q0, 1.0 - a);
    const double lx0 = std::log(wa[0][0] * qa0 + wa[0][1] * qa1);
    const double lx1 = std::log(wa[1][0] * qa0 + wa[1][1] * qa1);
    return (px0 * lx0 + (1.0 - px0) * lx1) / (a - 1.0);
  };

  const double step = 1.0 / (grid_size + 1.0);
  PriorSearchResult res;
  res.best_value = infinity();
  for (int i = 1; i <= grid_size; ++i) {
    const double q0 = i * step;
    const double val = objective(q0);
    if (val < res.best_value) {
      res.best_value = val;
      res.argmin_q0 = q0;
    }
  }
  res.value_at_marginal = objective(joint.p_y(0));
  res.departs = std::abs(res.argmin_q0 - joint.p_y(0)) > step &&
                res.value_at_marginal - res.best_value > 1e-9;
  return res;
}

/// Residual of the Shannon chain rule
///   sum_x p(x) D(W(.|x)||q) = I(X;Y) + D(p_y||q),
/// which forces the Shannon-order minimizer to the true marginal.
inline double shannon_decomposition_residual(const DichotomicJoint& joint,
                                             const DiscreteDist& prior) {
  if (prior.support_size() != 2 || !(prior[0] > 0.0) || !(prior[1] > 0.0)) {
    throw std::invalid_argument(
        "shannon_decomposition_residual: prior must be strictly positive");
  }
  double lhs = 0.0;
  for (int x = 0; x < 2; ++x) {
    lhs += joint.p_x(x) *
           kl_divergence_discrete(joint.conditional_given(x), prior);
  }
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double pxy = joint.joint(x, y);
      if (pxy > 0.0) {
        mi += pxy * std::log(pxy / (joint.p_x(x) * joint.p_y(y)));
      }
    }
  }
  const double rhs = mi + kl_divergence_discrete(joint.marginal_y(), prior);
  return lhs - rhs;
}

/// Objective of the variational representation,
///   J(R) = (alpha/(1-alpha)) D(R||W(.|x)) + D(R||q),
/// whose minimum over R equals D_alpha(W(.|x)||q), attained at the
/// normalized geometric mixture of q and W.
inline double variational_objective(const DiscreteDist& r,
                                    const DiscreteDist& w,
                                    const DiscreteDist& q, RenyiOrder order) {
  return order.delta() * kl_divergence_discrete(r, w) +
         kl_divergence_discrete(r, q);
}

/// Max over x of |grid minimum of J - D_alpha(W(.|x)||q)|; bounded by the
/// grid resolution. Throws if the analytic minimizer fails to attain the
/// divergence to 1e-12, which would falsify the representation itself.
inline double variational_rep_residual(const DichotomicJoint& joint,
                                       const DiscreteDist& prior,
                                       RenyiOrder order, int grid_size) {
  if (grid_size < 101) {
    throw std::invalid_argument(
        "variational_rep_residual: grid_size must be >= 101");
  }
  double worst = 0.0;
  for (int x = 0; x < 2; ++x) {
    const DiscreteDist w = joint.conditional_given(x);
    const double target = renyi_divergence_discrete(w, prior, order);

    const DiscreteDist vstar = mixed_discrete(w, prior, order);
    const double at_vstar = variational_objective(vstar, w, prior, order);
    if (std::abs(at_vstar - target) > 1e-12) {
      throw std::logic_error(
          "variational_rep_residual: analytic minimizer misses the "
          "divergence beyond 1e-12");
    }

    double best = infinity();
    const double step = 1.0 / (grid_size + 1.0);
    for (int i = 1; i <= grid_size; ++i) {
      const double r0 = i * step;
      const DiscreteDist r({r0, 1.0 - r0});
      best = std::min(best, variational_objective(r, w, prior, order));
    }
    worst = std::max(worst, std::abs(best - target));
  }
  return worst;
}

/// Gap |J(V*) - D_alpha(W(.|x)||q)| maximized over x; exposes the exactness
/// of the analytic minimizer separately from the grid search.
inline double variational_rep_vstar_gap(const DichotomicJoint& joint,
                                        const DiscreteDist& prior,
                                        RenyiOrder order) {
  double worst = 0.0;
  for (int x = 0; x < 2; ++x) {
    const DiscreteDist w = joint.conditional_given(x);
    const double target = renyi_divergence_discrete(w, prior, order);
    const DiscreteDist vstar = mixed_discrete(w, prior, order);
    worst = std::max(worst,
                     std::abs(variational_objective(vstar, w, prior, order) -
                              target));
  }
  return worst;
}

/// Random joint with every cell in [0.15, 0.55]: cells are 0.15 plus 0.4
/// times a flat Dirichlet draw, keeping marginals and conditionals well
/// conditioned for near-Shannon-order scans.
inline DichotomicJoint random_interior_joint(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::array<double, 4> e;
  double sum = 0.0;
  for (double& v : e) {
    v = -std::log(1.0 - unif(rng));
    sum += v;
  }
  std::array<std::array<double, 2>, 2> cells;
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    cells[i / 2][i % 2] = 0.15 + 0.4 * e[i] / sum;
    total += cells[i / 2][i % 2];
  }
  // Remove the last-digit drift so the simplex check passes exactly.
  for (auto& row : cells) {
    for (double& v : row) v /= total;
  }
  return DichotomicJoint(cells);
}

}  // namespace relbo
