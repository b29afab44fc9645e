#pragma once

// Bivariate-Gaussian landscape for the prior-minimizer study: the averaged
// divergence difference
//
//   Ibar_alpha = E_{x ~ p_x} [ D_alpha(W(.|x) || q_y) - D_alpha(W(.|x) || p_y) ]
//
// with W(.|x) the conditional of y given x under a correlated bivariate
// Gaussian, p_y the true marginal and q_y a candidate prior. A closed form,
// a Gauss-Hermite quadrature oracle, the perfect-correlation limit, the
// feasibility constraint for alpha > 1, and deterministic grid sweeps that
// classify where the objective goes negative (so the minimizing prior
// departs from the true marginal).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "relbo/common.hpp"
#include "relbo/gaussian.hpp"
#include "relbo/order.hpp"
#include "relbo/quadrature.hpp"

namespace relbo {

/// Correlated bivariate Gaussian (x, y) with correlation |rho| < 1; the
/// perfect-correlation value has its own limit operation.
struct BivariateParams {
  double mu_x = 0.0;
  double sigma_x = 1.0;
  double mu_y = 0.0;
  double sigma_y = 1.0;
  double rho = 0.0;

  void validate() const {
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) {
      throw std::invalid_argument("BivariateParams: sigmas must be > 0");
    }
    if (!(std::abs(rho) < 1.0)) {
      throw std::invalid_argument("BivariateParams: requires |rho| < 1");
    }
  }
};

/// Candidate Gaussian prior q_y = N(mu_yq, sigma_yq^2).
struct PriorParams {
  double mu_yq = 0.0;
  double sigma_yq = 1.0;

  void validate() const {
    if (!(sigma_yq > 0.0)) {
      throw std::invalid_argument("PriorParams: sigma_yq must be > 0");
    }
  }
};

/// Conditional y | x: N(mu_y + (sigma_y/sigma_x) rho (x - mu_x),
/// (1 - rho^2) sigma_y^2); the variance does not depend on x.
inline Gaussian1 conditional(const BivariateParams& p, double x) {
  p.validate();
  const double mean = p.mu_y + (p.sigma_y / p.sigma_x) * p.rho * (x - p.mu_x);
  const double var = (1.0 - p.rho * p.rho) * p.sigma_y * p.sigma_y;
  return Gaussian1(mean, var);
}

/// True iff both combination variances (1-alpha) sigma_c^2 + alpha sigma^2
/// are positive for the prior and the marginal; automatic for alpha < 1.
inline bool feasibility(RenyiOrder order, const BivariateParams& p,
                        const PriorParams& prior) {
  p.validate();
  prior.validate();
  const double a = order.alpha();
  const double sc2 = (1.0 - p.rho * p.rho) * p.sigma_y * p.sigma_y;
  const double vs_prior = (1.0 - a) * sc2 + a * prior.sigma_yq * prior.sigma_yq;
  const double vs_marginal = (1.0 - a) * sc2 + a * p.sigma_y * p.sigma_y;
  return vs_prior > 0.0 && vs_marginal > 0.0;
}

/// Closed form of Ibar_alpha. The conditional mean is linear in x and its
/// variance constant, so both averaged divergences are Gaussian moments:
/// with g = mu_y - mu_yq, sc2 = (1-rho^2) sigma_y^2,
/// A = (1-alpha) sc2 + alpha sigma_yq^2, B = (1-alpha) sc2 + alpha sigma_y^2,
///
///   Ibar = (alpha/2) [ (g^2 + rho^2 sigma_y^2)/A - rho^2 sigma_y^2/B ]
///          + (1/(2(1-alpha))) log( (A/B) (sigma_y^2/sigma_yq^2)^alpha ).
inline double ibar_closed(RenyiOrder order, const BivariateParams& p,
                          const PriorParams& prior) {
  if (!feasibility(order, p, prior)) {
    throw std::domain_error("ibar_closed: infeasible parameters");
  }
  const double a = order.alpha();
  const double sy2 = p.sigma_y * p.sigma_y;
  const double sq2 = prior.sigma_yq * prior.sigma_yq;
  const double sc2 = (1.0 - p.rho * p.rho) * sy2;
  const double g = p.mu_y - prior.mu_yq;
  const double big_a = (1.0 - a) * sc2 + a * sq2;
  const double big_b = (1.0 - a) * sc2 + a * sy2;
  const double rho2sy2 = p.rho * p.rho * sy2;
  const double quad =
      0.5 * a * ((g * g + rho2sy2) / big_a - rho2sy2 / big_b);
  const double logpart =
      (std::log(big_a / big_b) + a * std::log(sy2 / sq2)) /
      (2.0 * (1.0 - a));
  return quad + logpart;
}

/// Quadrature oracle: Gauss-Hermite average over x ~ N(mu_x, sigma_x^2) of
/// the divergence difference, each inner divergence via the 1-D closed
/// form. The error estimate comes from doubling the node count.
inline ValueWithError ibar_oracle(RenyiOrder order, const BivariateParams& p,
                                  const PriorParams& prior, int nodes = 64) {
  if (!feasibility(order, p, prior)) {
    throw std::domain_error("ibar_oracle: infeasible parameters");
  }
  if (nodes < 2) throw std::invalid_argument("ibar_oracle: nodes must be >= 2");
  const Gaussian1 qy(prior.mu_yq, prior.sigma_yq * prior.sigma_yq);
  const Gaussian1 py(p.mu_y, p.sigma_y * p.sigma_y);
  auto diff = [&](double x) {
    const Gaussian1 w = conditional(p, x);
    return renyi_divergence_gaussian(w, qy, order) -
           renyi_divergence_gaussian(w, py, order);
  };
  const double coarse = gauss_hermite_expectation(diff, p.mu_x,
                                                  p.sigma_x * p.sigma_x, nodes);
  const double fine = gauss_hermite_expectation(diff, p.mu_x,
                                                p.sigma_x * p.sigma_x,
                                                2 * nodes);
  return {fine, std::abs(fine - coarse)};
}

/// Perfect-correlation limit rho -> +-1: order-independent, equal to
///   (1/2) [ (mu_y - mu_yq)^2 / sigma_yq^2
///           + sigma_y^2/sigma_yq^2 - 1 - log(sigma_y^2/sigma_yq^2) ],
/// which is non-negative everywhere.
inline double ibar_rho1(const BivariateParams& p, const PriorParams& prior) {
  prior.validate();
  const double g = p.mu_y - prior.mu_yq;
  const double sq2 = prior.sigma_yq * prior.sigma_yq;
  const double r = (p.sigma_y * p.sigma_y) / sq2;
  return 0.5 * (g * g / sq2 + r - 1.0 - std::log(r));
}

/// Values below this threshold count as genuinely negative in sweep
/// classification; anything closer to zero is treated as roundoff.
inline constexpr double kNegativityThreshold = -1e-9;

/// One evaluated grid point. `value` and `oracle_value` carry the
/// +infinity sentinel when the point is infeasible.
struct GmSweepPoint {
  double alpha = 0.0;
  double rho_sq = 0.0;
  double var_ratio = 0.0;  // sigma_y^2 / sigma_yq^2
  double mean_gap = 0.0;   // mu_y - mu_yq
  bool feasible = false;
  double value = 0.0;
  double oracle_value = 0.0;
  double abs_diff = 0.0;
};

/// Grid axes for a sweep. The default spans all qualitative regimes of the
/// landscape at desk scale.
struct GmGrid {
  std::vector<double> alpha;
  std::vector<double> rho_sq;
  std::vector<double> var_ratio;
  std::vector<double> mean_gap;

  static GmGrid default_grid() {
    GmGrid g;
    g.alpha = {0.25, 0.5, 0.75, 1.5, 10.0};
    g.rho_sq = {0.0, 0.25, 0.5, 0.75, 0.99};
    g.var_ratio.reserve(16);
    for (int k = 0; k < 16; ++k) {
      g.var_ratio.push_back(0.25 * std::pow(16.0, k / 15.0));
    }
    g.mean_gap.reserve(13);
    for (int j = 0; j < 13; ++j) {
      g.mean_gap.push_back(3.0 * j / 12.0);
    }
    return g;
  }

  std::size_t size() const {
    return alpha.size() * rho_sq.size() * var_ratio.size() * mean_gap.size();
  }
};

/// Builds the (params, prior) pair for one grid point around a baseline:
/// rho = sqrt(rho_sq), sigma_yq^2 = sigma_y^2 / var_ratio and
/// mu_yq = mu_y - mean_gap.
inline std::pair<BivariateParams, PriorParams> gm_point(
    const BivariateParams& baseline, double rho_sq, double var_ratio,
    double mean_gap) {
  BivariateParams p = baseline;
  p.rho = std::sqrt(rho_sq);
  PriorParams prior;
  prior.sigma_yq = baseline.sigma_y / std::sqrt(var_ratio);
  prior.mu_yq = baseline.mu_y - mean_gap;
  return {p, prior};
}

/// Evaluates the closed form and the quadrature oracle at every grid point,
/// in deterministic grid order (alpha, rho_sq, var_ratio, mean_gap nested
/// loops). Infeasible points are marked and carry sentinel values.
inline std::vector<GmSweepPoint> sweep(
    const GmGrid& grid, const BivariateParams& baseline = BivariateParams{},
    int oracle_nodes = 64) {
  std::vector<GmSweepPoint> out;
  out.reserve(grid.size());
  for (double a : grid.alpha) {
    const RenyiOrder order(a);
    for (double r2 : grid.rho_sq) {
      for (double vr : grid.var_ratio) {
        for (double gap : grid.mean_gap) {
          auto [p, prior] = gm_point(baseline, r2, vr, gap);
          GmSweepPoint pt;
          pt.alpha = a;
          pt.rho_sq = r2;
          pt.var_ratio = vr;
          pt.mean_gap = gap;
          pt.feasible = feasibility(order, p, prior);
          if (pt.feasible) {
            pt.value = ibar_closed(order, p, prior);
            pt.oracle_value = ibar_oracle(order, p, prior, oracle_nodes).value;
            pt.abs_diff = std::abs(pt.value - pt.oracle_value);
          } else {
            pt.value = infinity();
            pt.oracle_value = infinity();
            pt.abs_diff = 0.0;
          }
          out.push_back(pt);
        }
      }
    }
  }
  return out;
}

/// Per-(alpha, rho_sq) cell counts for sweep summaries.
struct GmSliceSummary {
  double alpha = 0.0;
  double rho_sq = 0.0;
  int negative_cells = 0;
  int feasible_cells = 0;
  int infeasible_cells = 0;
};

inline std::vector<GmSliceSummary> summarize_slices(
    const std::vector<GmSweepPoint>& points) {
  std::vector<GmSliceSummary> out;
  for (const GmSweepPoint& pt : points) {
    if (out.empty() || out.back().alpha != pt.alpha ||
        out.back().rho_sq != pt.rho_sq) {
      out.push_back({pt.alpha, pt.rho_sq, 0, 0, 0});
    }
    GmSliceSummary& s = out.back();
    if (pt.feasible) {
      ++s.feasible_cells;
      if (pt.value < kNegativityThreshold) ++s.negative_cells;
    } else {
      ++s.infeasible_cells;
    }
  }
  return out;
}

}  // namespace relbo
