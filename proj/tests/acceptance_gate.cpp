// Acceptance gate: nine numbered criteria, each printing detail lines for
// its clauses and then exactly one PASS/FAIL line. The process exit code is
// the number of failed criteria, so each criterion can run as its own test.
//
// Usage: acceptance_gate [N ...]   (no arguments runs all nine)
//
// Every tolerance and budget is pinned here in code. Clauses that the
// implementation cannot satisfy are still evaluated exactly as stated and
// reported with the measured values; they are not weakened to pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "relbo/bounds.hpp"
#include "relbo/common.hpp"
#include "relbo/dichotomic.hpp"
#include "relbo/discrete.hpp"
#include "relbo/gaussian.hpp"
#include "relbo/gm.hpp"
#include "relbo/oracle.hpp"
#include "relbo/ppca.hpp"

namespace {

constexpr std::uint64_t kMasterSeed = 42;

struct Clause {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number = 0;
  std::string title;
  std::vector<Clause> clauses;
  double elapsed_seconds = 0.0;
  double budget_seconds = 0.0;  // 0 means no runtime clause

  bool pass() const {
    const bool clauses_ok = std::all_of(
        clauses.begin(), clauses.end(), [](const Clause& c) { return c.pass; });
    const bool time_ok =
        budget_seconds <= 0.0 || elapsed_seconds < budget_seconds;
    return clauses_ok && time_ok;
  }
};

void report(const Criterion& c) {
  for (const Clause& clause : c.clauses) {
    fmt::print("  [{}] {}  {}\n", clause.label, clause.pass ? "pass" : "FAIL",
               clause.detail);
  }
  if (c.budget_seconds > 0.0) {
    fmt::print("  [{}.time] {}  {:.2f} s (budget {:.0f} s)\n", c.number,
               c.elapsed_seconds < c.budget_seconds ? "pass" : "FAIL",
               c.elapsed_seconds, c.budget_seconds);
  }
  fmt::print("{} criterion {}: {}\n", c.pass() ? "PASS" : "FAIL", c.number,
             c.title);
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

const std::vector<double> kUnitAlphas = {0.1, 0.2, 0.3, 0.4, 0.5,
                                         0.6, 0.7, 0.8, 0.9};

relbo::Gaussian1 random_gaussian1(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean(-5.0, 5.0);
  std::uniform_real_distribution<double> var(0.1, 10.0);
  return relbo::Gaussian1(mean(rng), var(rng));
}

relbo::DiscreteDist random_dist(std::mt19937_64& rng, int outcomes) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> p(outcomes);
  double sum = 0.0;
  for (double& v : p) {
    v = unif(rng);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return relbo::DiscreteDist(p);
}

relbo::PpcaModel random_ppca(std::mt19937_64& rng, int n_x, int n_y) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> noise(0.4, 1.6);
  Eigen::MatrixXd c(n_x, n_y);
  for (int i = 0; i < n_x; ++i) {
    for (int j = 0; j < n_y; ++j) c(i, j) = normal(rng);
  }
  return relbo::PpcaModel(c, noise(rng));
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index dim,
                              double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x(i) = normal(rng);
  return x;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows,
                              Eigen::Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

// Criterion 1: the scalar-Gaussian closed form against the adaptive
// quadrature oracle, 500 seeded pairs, nine orders.
Criterion criterion_1() {
  Criterion c{1, "scalar-Gaussian closed form vs quadrature oracle", {}, 0, 10};
  const Timer timer;
  constexpr double kTol = 1e-8;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1001));
  double worst = 0.0;
  for (int pair = 0; pair < 500; ++pair) {
    const relbo::Gaussian1 p = random_gaussian1(rng);
    const relbo::Gaussian1 q = random_gaussian1(rng);
    for (double a : kUnitAlphas) {
      const relbo::RenyiOrder order(a);
      const double closed = relbo::renyi_divergence_gaussian(p, q, order);
      const auto oracle =
          relbo::oracle_renyi_divergence_quadrature(p, q, order);
      worst = std::max(worst, std::abs(closed - oracle.value));
    }
  }
  c.clauses.push_back({"1.a", worst <= kTol,
                       fmt::format("500 pairs x 9 orders, max abs error = "
                                   "{:.3e} (limit {:.0e})",
                                   worst, kTol)});
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 2: spectral regularizer fast path against the dense oracle,
// 200 seeded models up to 64 x 8, five x samples, nine orders.
Criterion criterion_2() {
  Criterion c{2, "spectral regularizer fast path vs dense oracle", {}, 0, 30};
  const Timer timer;
  constexpr double kTol = 1e-10;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1002));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n_x = 4 + trial % 61;             // 4 .. 64
    const int n_y = 1 + trial % std::min(8, n_x);
    const auto model = random_ppca(rng, n_x, n_y);
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd x = random_vector(rng, n_x, 1.5);
      for (double a : kUnitAlphas) {
        const relbo::RenyiOrder order(a);
        const double fast =
            relbo::renyi_regularizer(model, x, order).total_corrected;
        const double dense = relbo::dense_oracle_regularizer(model, x, order);
        worst = std::max(worst, std::abs(fast - dense) /
                                    std::max(1.0, std::abs(dense)));
      }
    }
  }
  c.clauses.push_back(
      {"2.a", worst <= kTol,
       fmt::format("200 models (up to 64x8) x 5 x-samples x 9 orders, max "
                   "relative error = {:.3e} (limit {:.0e})",
                   worst, kTol)});
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 3: the exact bound identity and evidence dominance for the
// optimal encoder plus 50 random perturbations of it.
Criterion criterion_3() {
  Criterion c{3, "exact bound identity and evidence dominance", {}, 0, 30};
  const Timer timer;
  constexpr double kTol = 1e-9;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1003));
  double worst_residual = 0.0;
  double worst_excess = 0.0;
  int configurations = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const auto model = random_ppca(rng, 5 + trial, 2 + trial % 2);
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd x = random_vector(rng, model.n_x(), 1.5);
      for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const relbo::RenyiOrder order(a);
        const relbo::GaussianEncoder base =
            relbo::optimal_encoder_map(model, order);
        for (int variant = 0; variant <= 50; ++variant) {
          relbo::GaussianEncoder enc = base;
          if (variant > 0) {
            std::uniform_real_distribution<double> stretch(0.5, 1.5);
            enc.mean_map += random_matrix(rng, enc.mean_map.rows(),
                                          enc.mean_map.cols(), 0.3);
            enc.offset += random_vector(rng, enc.offset.size(), 0.3);
            const Eigen::MatrixXd w =
                random_matrix(rng, enc.covariance.rows(),
                              enc.covariance.cols(), 0.3);
            enc.covariance =
                stretch(rng) * enc.covariance + w * w.transpose();
          }
          const auto r = relbo::bound_report(enc, model, x, order, 1.0);
          worst_residual =
              std::max(worst_residual, std::abs(r.identity_residual));
          worst_excess = std::max(worst_excess, r.relbo - r.log_evidence);
          ++configurations;
        }
      }
    }
  }
  c.clauses.push_back(
      {"3.a", worst_residual <= kTol,
       fmt::format("{} (model, x, order, encoder) configurations, max "
                   "identity residual = {:.3e} (limit {:.0e})",
                   configurations, worst_residual, kTol)});
  c.clauses.push_back(
      {"3.b", worst_excess <= kTol,
       fmt::format("max (bound - log evidence) = {:.3e} (limit {:.0e})",
                   worst_excess, kTol)});
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 4: the three-distribution decomposition identity and the
// variational representation of the divergence.
Criterion criterion_4() {
  Criterion c{4, "decomposition identity and variational representation", {},
              0, 0};
  const Timer timer;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1004));
  {
    constexpr double kTol = 1e-11;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 3 + trial % 4;
      const auto p = random_dist(rng, n);
      const auto q = random_dist(rng, n);
      const auto r = random_dist(rng, n);
      for (double a : {0.25, 0.5, 0.75}) {
        worst = std::max(worst, std::abs(relbo::identity_b1_residual(
                                    r, p, q, relbo::RenyiOrder(a))));
      }
    }
    c.clauses.push_back({"4.a", worst <= kTol,
                         fmt::format("1000 random triples, max decomposition "
                                     "residual = {:.3e} (limit {:.0e})",
                                     worst, kTol)});
  }
  {
    constexpr double kVstarTol = 1e-12;
    constexpr double kGridTol = 1e-4;
    double worst_vstar = 0.0;
    double worst_grid = 0.0;
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    for (int trial = 0; trial < 50; ++trial) {
      const auto joint = relbo::random_interior_joint(rng);
      const double q0 = unif(rng);
      const relbo::DiscreteDist prior({q0, 1.0 - q0});
      for (double a : {0.25, 0.5, 0.75}) {
        const relbo::RenyiOrder order(a);
        worst_vstar = std::max(
            worst_vstar, relbo::variational_rep_vstar_gap(joint, prior, order));
        worst_grid = std::max(
            worst_grid,
            relbo::variational_rep_residual(joint, prior, order, 2001));
      }
    }
    c.clauses.push_back(
        {"4.b", worst_vstar <= kVstarTol,
         fmt::format("analytic minimizer gap = {:.3e} (limit {:.0e})",
                     worst_vstar, kVstarTol)});
    c.clauses.push_back(
        {"4.c", worst_grid <= kGridTol,
         fmt::format("grid-minimum residual = {:.3e} (limit {:.0e})",
                     worst_grid, kGridTol)});
  }
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 5: skew symmetry and the order -> 1 limit, discrete and
// Gaussian families.
Criterion criterion_5() {
  Criterion c{5, "skew symmetry and the order -> 1 limit", {}, 0, 0};
  const Timer timer;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1005));
  const std::vector<double> orders = {0.1, 0.25, 0.5, 0.75, 0.9};
  {
    constexpr double kTol = 1e-10;
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      const auto p = random_dist(rng, 4);
      const auto q = random_dist(rng, 4);
      for (double a : orders) {
        const double lhs =
            (1.0 - a) / a *
            relbo::renyi_divergence_discrete(p, q, relbo::RenyiOrder(a));
        const double rhs = relbo::renyi_divergence_discrete(
            q, p, relbo::RenyiOrder(1.0 - a));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    c.clauses.push_back(
        {"5.a", worst <= kTol,
         fmt::format("discrete skew symmetry deviation = {:.3e} (limit "
                     "{:.0e})",
                     worst, kTol)});
  }
  {
    constexpr double kTol = 1e-9;
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      auto draw = [&]() {
        Eigen::MatrixXd a = random_matrix(rng, 3, 3, 1.0);
        return relbo::GaussianN(
            random_vector(rng, 3, 2.0),
            a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3));
      };
      const auto p = draw();
      const auto q = draw();
      for (double a : orders) {
        const double lhs =
            (1.0 - a) / a *
            relbo::renyi_divergence_gaussian(p, q, relbo::RenyiOrder(a));
        const double rhs = relbo::renyi_divergence_gaussian(
            q, p, relbo::RenyiOrder(1.0 - a));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    c.clauses.push_back(
        {"5.b", worst <= kTol,
         fmt::format("Gaussian skew symmetry deviation = {:.3e} (limit "
                     "{:.0e})",
                     worst, kTol)});
  }
  {
    constexpr double kTol = 1e-4;
    double worst_discrete = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = random_dist(rng, 4);
      const auto q = random_dist(rng, 4);
      worst_discrete = std::max(
          worst_discrete,
          std::abs(relbo::renyi_divergence_discrete(
                       p, q, relbo::RenyiOrder(1.0 - 1e-6)) -
                   relbo::kl_divergence_discrete(p, q)));
    }
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    std::uniform_real_distribution<double> stretch(0.8, 1.25);
    double worst_gaussian = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const relbo::Gaussian1 p(0.0, 1.0);
      const relbo::Gaussian1 q(shift(rng), stretch(rng));
      worst_gaussian = std::max(
          worst_gaussian,
          std::abs(relbo::renyi_divergence_gaussian(
                       p, q, relbo::RenyiOrder(1.0 - 1e-6)) -
                   relbo::kl_divergence_gaussian(p, q)));
    }
    c.clauses.push_back(
        {"5.c", worst_discrete <= kTol && worst_gaussian <= kTol,
         fmt::format("order 1-1e-6 vs KL: discrete {:.3e}, Gaussian {:.3e} "
                     "(limit {:.0e})",
                     worst_discrete, worst_gaussian, kTol)});
  }
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 6: the two-by-two counterexample. Clauses a and b are evaluated
// exactly as stated on the default construction; measured values are
// reported even where the construction cannot realize the stated behavior.
Criterion criterion_6() {
  Criterion c{6, "two-by-two prior-departure counterexample", {}, 0, 20};
  const Timer timer;
  const relbo::DichotomicJoint joint = relbo::default_counterexample_joint();
  const relbo::RenyiOrder half(0.5);
  const std::vector<double> scales = {1e2, 1e4, 1e6};

  {  // 6.a: F < 0 at every scale in {1e2, 1e4, 1e6}.
    bool all_negative = true;
    std::string measured;
    for (double s0 : scales) {
      try {
        const auto rows = relbo::limit_scan(joint, half, {s0});
        measured += fmt::format("F({:.0e}) = {:+.3e}; ", s0, rows[0].f_alpha);
        all_negative = all_negative && rows[0].f_alpha < 0.0;
      } catch (const std::invalid_argument&) {
        measured += fmt::format(
            "F({:.0e}) undefined (scaled prior mass {:g} leaves the "
            "simplex); ",
            s0, s0 * joint.p_y(0));
        all_negative = false;
      }
    }
    c.clauses.push_back(
        {"6.a", all_negative,
         fmt::format("objective negative at every scale: {}", measured)});
  }
  {  // 6.b: F + log s0 varies by < 0.5 between the two largest scales.
    constexpr double kTol = 0.5;
    bool pass = false;
    std::string detail;
    try {
      const auto rows =
          relbo::limit_scan(joint, half, {scales[1], scales[2]});
      const double spread =
          std::abs(rows[1].f_alpha_plus_log_s0 - rows[0].f_alpha_plus_log_s0);
      pass = spread < kTol;
      detail = fmt::format("shifted-objective spread between the two largest "
                           "scales = {:.3f} (limit {:.1f})",
                           spread, kTol);
    } catch (const std::invalid_argument&) {
      // The two largest scales are unreachable on the default construction;
      // measure the same quantity on a small-marginal variant where all
      // three scales stay inside the simplex.
      const auto tiny =
          relbo::DichotomicJoint::from_conditional(0.5, 1e-8, 1e-9);
      const auto rows = relbo::limit_scan(tiny, half, scales);
      const double spread =
          std::abs(rows[2].f_alpha_plus_log_s0 - rows[1].f_alpha_plus_log_s0);
      detail = fmt::format(
          "scales 1e4 and 1e6 leave the simplex on the default construction; "
          "on a small-marginal variant the spread is {:.3f} (limit {:.1f}), "
          "i.e. the shifted objective grows like log s0",
          spread, kTol);
      pass = false;
    }
    c.clauses.push_back({"6.b", pass, detail});
  }
  {  // 6.c: the grid minimizer departs from the true marginal.
    const auto search = relbo::minimize_over_prior(joint, half, 9999);
    c.clauses.push_back(
        {"6.c", search.departs,
         fmt::format("argmin q0 = {:.4g} vs marginal {:.4g}, objective dip = "
                     "{:.3e}",
                     search.argmin_q0, joint.p_y(0),
                     search.value_at_marginal - search.best_value)});
  }
  {  // 6.d: near order one, no departure on 1000 random interior joints.
    std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1006));
    const relbo::RenyiOrder near_one(0.999);
    int departures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto random_joint = relbo::random_interior_joint(rng);
      if (relbo::minimize_over_prior(random_joint, near_one, 2001).departs) {
        ++departures;
      }
    }
    c.clauses.push_back(
        {"6.d", departures == 0,
         fmt::format("departures at order 0.999 across 1000 random joints: "
                     "{}",
                     departures)});
  }
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 7: the bivariate-Gaussian landscape. Clause c is evaluated as
// stated; the measured location of the negative region is reported.
Criterion criterion_7() {
  Criterion c{7, "bivariate-Gaussian landscape sweep", {}, 0, 60};
  const Timer timer;
  const auto grid = relbo::GmGrid::default_grid();
  const auto points = relbo::sweep(grid, {}, 64);

  {  // 7.a: closed form vs quadrature at every feasible grid point.
    constexpr double kTol = 1e-7;
    double worst = 0.0;
    int feasible = 0;
    for (const auto& pt : points) {
      if (pt.feasible) {
        worst = std::max(worst, pt.abs_diff);
        ++feasible;
      }
    }
    c.clauses.push_back(
        {"7.a", worst <= kTol,
         fmt::format("{} feasible points, max closed-vs-quadrature error = "
                     "{:.3e} (limit {:.0e})",
                     feasible, worst, kTol)});
  }
  {  // 7.b: no negative cells on the zero-correlation slice.
    int negatives = 0;
    for (const auto& pt : points) {
      if (pt.feasible && pt.rho_sq == 0.0 &&
          pt.value < relbo::kNegativityThreshold) {
        ++negatives;
      }
    }
    c.clauses.push_back(
        {"7.b", negatives == 0,
         fmt::format("negative cells at rho^2 = 0: {}", negatives)});
  }
  {  // 7.c: negative cells with var_ratio <= 1 at large rho^2 for orders
     // 0.5 and 0.75.
    bool found_half = false;
    bool found_three_quarters = false;
    double min_vr_below_one_orders = relbo::infinity();
    int low_vr_negatives_above_one = 0;
    for (const auto& pt : points) {
      if (!pt.feasible || pt.value >= relbo::kNegativityThreshold) continue;
      if (pt.alpha < 1.0) {
        min_vr_below_one_orders =
            std::min(min_vr_below_one_orders, pt.var_ratio);
      } else if (pt.var_ratio <= 1.0) {
        ++low_vr_negatives_above_one;
      }
      if (pt.var_ratio <= 1.0 && pt.rho_sq >= 0.5) {
        if (pt.alpha == 0.5) found_half = true;
        if (pt.alpha == 0.75) found_three_quarters = true;
      }
    }
    c.clauses.push_back(
        {"7.c", found_half && found_three_quarters,
         fmt::format("negative cells with var_ratio <= 1 at rho^2 >= 0.5: "
                     "order 0.5 {}, order 0.75 {}; measured: orders below 1 "
                     "go negative only for var_ratio >= {:.4f}, while "
                     "var_ratio <= 1 negatives occur {} times at orders "
                     "above 1",
                     found_half ? "found" : "none",
                     found_three_quarters ? "found" : "none",
                     min_vr_below_one_orders, low_vr_negatives_above_one)});
  }
  {  // 7.d: near-perfect correlation is order-independent and matches the
     // closed limit.
    constexpr double kTol = 1e-3;
    double worst = 0.0;
    int cells = 0;
    for (double vr : grid.var_ratio) {
      for (double gap : grid.mean_gap) {
        auto [p, prior] =
            relbo::gm_point(relbo::BivariateParams{}, 1.0 - 1e-8, vr, gap);
        const double limit = relbo::ibar_rho1(p, prior);
        int feasible_orders = 0;
        for (double a : grid.alpha) {
          const relbo::RenyiOrder order(a);
          if (!relbo::feasibility(order, p, prior)) continue;
          const double v = relbo::ibar_closed(order, p, prior);
          worst = std::max(worst, std::abs(v - limit) /
                                      std::max(1.0, std::abs(limit)));
          ++feasible_orders;
        }
        if (feasible_orders >= 2) ++cells;
      }
    }
    c.clauses.push_back(
        {"7.d", cells > 0 && worst <= kTol,
         fmt::format("{} cells at rho^2 = 1 - 1e-8, max relative deviation "
                     "from the limit across orders = {:.3e} (limit {:.0e})",
                     cells, worst, kTol)});
  }
  {  // 7.e: strictly more negative cells at order 10 than at order 0.75.
    int neg_10 = 0;
    int neg_075 = 0;
    for (const auto& pt : points) {
      if (!pt.feasible || pt.value >= relbo::kNegativityThreshold) continue;
      if (pt.alpha == 10.0) ++neg_10;
      if (pt.alpha == 0.75) ++neg_075;
    }
    c.clauses.push_back(
        {"7.e", neg_10 > neg_075,
         fmt::format("negative feasible cells: order 10 -> {}, order 0.75 -> "
                     "{}",
                     neg_10, neg_075)});
  }
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 8: the beta-weighted bound overshoots the evidence for some
// beta != 1, and the failure term changes sign across inputs.
Criterion criterion_8() {
  Criterion c{8, "beta-weighted bound failure exhibit", {}, 0, 0};
  const Timer timer;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1008));
  double max_overshoot = -relbo::infinity();
  double min_failure = relbo::infinity();
  double max_failure = -relbo::infinity();
  for (int trial = 0; trial < 5; ++trial) {
    const auto model = random_ppca(rng, 5, 2);
    const relbo::RenyiOrder order(0.5);

    // Encoder matching the exact posterior: for it the beta-weighted bound
    // equals log evidence plus (1 - beta) times a positive divergence.
    const Eigen::MatrixXd& cm = model.loading();
    const double s2 = model.noise_std() * model.noise_std();
    const Eigen::MatrixXd beta_map =
        cm.transpose() *
        (cm * cm.transpose() +
         s2 * Eigen::MatrixXd::Identity(model.n_x(), model.n_x()))
            .inverse();
    relbo::GaussianEncoder posterior_enc;
    posterior_enc.mean_map = beta_map;
    posterior_enc.offset = Eigen::VectorXd::Zero(model.n_y());
    posterior_enc.covariance =
        Eigen::MatrixXd::Identity(model.n_y(), model.n_y()) - beta_map * cm;

    relbo::GaussianEncoder prior_enc;
    prior_enc.mean_map = Eigen::MatrixXd::Zero(model.n_y(), model.n_x());
    prior_enc.offset = Eigen::VectorXd::Zero(model.n_y());
    prior_enc.covariance =
        Eigen::MatrixXd::Identity(model.n_y(), model.n_y());

    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd x = random_vector(rng, model.n_x(), 1.5);
      for (double beta : {0.25, 0.5, 2.0}) {
        const auto r =
            relbo::bound_report(posterior_enc, model, x, order, beta);
        max_overshoot = std::max(max_overshoot, r.beta_elbo - r.log_evidence);
      }
      for (const auto& enc : {posterior_enc, prior_enc}) {
        const double term = relbo::beta_failure_term(enc, model, x);
        min_failure = std::min(min_failure, term);
        max_failure = std::max(max_failure, term);
      }
    }
  }
  c.clauses.push_back(
      {"8.a", max_overshoot > 1e-9,
       fmt::format("max (beta-weighted bound - log evidence) over beta != 1 "
                   "= {:+.3e}",
                   max_overshoot)});
  c.clauses.push_back(
      {"8.b", min_failure < -1e-12 && max_failure > 1e-12,
       fmt::format("failure term range across encoders = [{:+.3e}, "
                   "{:+.3e}] (sign change required)",
                   min_failure, max_failure)});
  c.elapsed_seconds = timer.seconds();
  return c;
}

// Criterion 9: printed form vs corrected form vs dense oracle over random
// spectra with a dominant direction.
Criterion criterion_9() {
  Criterion c{9, "printed-vs-corrected regularizer discrepancy", {}, 0, 0};
  const Timer timer;
  constexpr double kPrintedGap = 1e-3;
  constexpr double kCorrectedTol = 1e-10;
  std::mt19937_64 rng(relbo::derive_seed(kMasterSeed, 1009));
  std::uniform_real_distribution<double> head(0.5, 2.0);
  std::uniform_real_distribution<double> tail(0.0, 2.0);
  double min_printed_gap = relbo::infinity();
  double worst_corrected = 0.0;
  int rows = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n_y = 1 + trial % 4;
    Eigen::MatrixXd loading = Eigen::MatrixXd::Zero(n_y, n_y);
    loading(0, 0) = head(rng);  // guarantees max lambda >= 0.5
    for (int l = 1; l < n_y; ++l) loading(l, l) = tail(rng);
    const auto model = relbo::PpcaModel::unchecked_rank(loading, 1.0);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(n_y);
    for (double a : kUnitAlphas) {
      const relbo::RenyiOrder order(a);
      const auto b = relbo::renyi_regularizer(model, x, order);
      const double dense = relbo::dense_oracle_regularizer(model, x, order);
      min_printed_gap =
          std::min(min_printed_gap, std::abs(b.total_paper - dense));
      worst_corrected =
          std::max(worst_corrected, std::abs(b.total_corrected - dense));
      ++rows;
    }
  }
  c.clauses.push_back(
      {"9.a", min_printed_gap > kPrintedGap,
       fmt::format("{} rows with max lambda >= 0.5: min |printed - oracle| = "
                   "{:.3e} (must exceed {:.0e})",
                   rows, min_printed_gap, kPrintedGap)});
  c.clauses.push_back(
      {"9.b", worst_corrected <= kCorrectedTol,
       fmt::format("max |corrected - oracle| = {:.3e} (limit {:.0e})",
                   worst_corrected, kCorrectedTol)});
  c.elapsed_seconds = timer.seconds();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using CriterionFn = Criterion (*)();
  const std::vector<CriterionFn> all = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9};

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(all.size())) {
      fmt::print(stderr, "unknown criterion: {}\n", argv[i]);
      return static_cast<int>(all.size()) + 1;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int n = 1; n <= static_cast<int>(all.size()); ++n) {
      selected.push_back(n);
    }
  }

  int failed = 0;
  for (int n : selected) {
    const Criterion c = all[n - 1]();
    report(c);
    if (!c.pass()) ++failed;
  }
  fmt::print("{} of {} criteria passed\n",
             static_cast<int>(selected.size()) - failed, selected.size());
  return failed;
}
