// Command-line front end for the divergence library: oracle verification,
// landscape sweeps, the two-by-two departure demo, regularizer evaluation,
// bound reports, and the printed-vs-corrected discrepancy tables.
//
// Exit codes: 0 = all contracts met, 1 = a mathematical contract failed,
// 2 = input/config error. All floating-point output uses 17 significant
// digits; identical config + seed give byte-identical files. The only
// environment variable honored is RELBO_THREADS (sweep parallelism).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "relbo/bounds.hpp"
#include "relbo/common.hpp"
#include "relbo/dichotomic.hpp"
#include "relbo/discrete.hpp"
#include "relbo/gaussian.hpp"
#include "relbo/gm.hpp"
#include "relbo/io.hpp"
#include "relbo/oracle.hpp"
#include "relbo/ppca.hpp"
#include "relbo/quadrature.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContractFailed = 1;
constexpr int kExitBadInput = 2;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_path;
  std::vector<double> alpha;
  double tolerance = -1.0;  // negative means "use the per-command default"

  bool has_tolerance() const { return tolerance >= 0.0; }
};

nlohmann::json load_config(const CommonArgs& args) {
  if (args.config_path.empty()) return nlohmann::json::object();
  std::ifstream in(args.config_path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + args.config_path);
  }
  nlohmann::json j;
  in >> j;
  if (!j.is_object()) {
    throw std::invalid_argument("config root must be a JSON object");
  }
  return j;
}

void reject_unknown_keys(const nlohmann::json& config,
                         const std::vector<std::string>& known) {
  for (const auto& item : config.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw std::invalid_argument("unknown config key: " + item.key());
    }
  }
}

std::vector<double> alpha_grid_or(const CommonArgs& args,
                                  std::vector<double> fallback) {
  return args.alpha.empty() ? std::move(fallback) : args.alpha;
}

/// Replaces a trailing ".csv" (or appends if absent) to name the sidecar
/// summary file next to a CSV artifact.
std::string summary_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) +
           ".summary.json";
  }
  return csv_path + ".summary.json";
}

void write_json_file(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << doc.dump(2) << '\n';
}

int thread_count_from_env() {
  const char* raw = std::getenv("RELBO_THREADS");
  if (raw == nullptr) return 1;
  const int n = std::atoi(raw);
  return n < 1 ? 1 : n;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

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

relbo::Gaussian1 random_gaussian1(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean(-5.0, 5.0);
  std::uniform_real_distribution<double> var(0.1, 10.0);
  return relbo::Gaussian1(mean(rng), var(rng));
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

/// All named verification checks, evaluated deterministically from the
/// master seed. Each entry reconciles a closed form against an independent
/// route (quadrature, dense linear algebra, or an exact identity).
std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, double max_error, double tol) {
    results.push_back({name, max_error, tol, max_error <= tol});
  };
  const std::vector<double> unit_orders = {0.1, 0.25, 0.5, 0.75, 0.9};

  {  // Three-distribution decomposition identity on random triples.
    std::mt19937_64 rng(relbo::derive_seed(seed, 101));
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 4 + trial % 2;
      const auto p = random_dist(rng, n);
      const auto q = random_dist(rng, n);
      const auto r = random_dist(rng, n);
      for (double a : unit_orders) {
        worst = std::max(
            worst,
            std::abs(relbo::identity_b1_residual(r, p, q, relbo::RenyiOrder(a))));
      }
    }
    add("discrete_decomposition_identity", worst, 1e-11);
  }
  {  // Discrete skew symmetry.
    std::mt19937_64 rng(relbo::derive_seed(seed, 102));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = random_dist(rng, 4);
      const auto q = random_dist(rng, 4);
      for (double a : unit_orders) {
        const double lhs =
            (1.0 - a) / a *
            relbo::renyi_divergence_discrete(p, q, relbo::RenyiOrder(a));
        const double rhs =
            relbo::renyi_divergence_discrete(q, p, relbo::RenyiOrder(1.0 - a));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    add("discrete_skew_symmetry", worst, 1e-10);
  }
  {  // Discrete order->1 limit approaches the KL value.
    std::mt19937_64 rng(relbo::derive_seed(seed, 103));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = random_dist(rng, 4);
      const auto q = random_dist(rng, 4);
      const double kl = relbo::kl_divergence_discrete(p, q);
      const double near = relbo::renyi_divergence_discrete(
          p, q, relbo::RenyiOrder(1.0 - 1e-6));
      worst = std::max(worst, std::abs(near - kl));
    }
    add("discrete_kl_limit", worst, 1e-4);
  }
  {  // Gaussian closed form vs adaptive quadrature.
    std::mt19937_64 rng(relbo::derive_seed(seed, 104));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = random_gaussian1(rng);
      const auto q = random_gaussian1(rng);
      for (double a : unit_orders) {
        const double closed =
            relbo::renyi_divergence_gaussian(p, q, relbo::RenyiOrder(a));
        const auto est =
            relbo::oracle_renyi_divergence_quadrature(p, q,
                                                      relbo::RenyiOrder(a));
        worst = std::max(worst, std::abs(closed - est.value));
      }
    }
    add("gaussian_renyi_vs_quadrature", worst, 1e-8);
  }
  {  // Gaussian skew symmetry in three dimensions.
    std::mt19937_64 rng(relbo::derive_seed(seed, 105));
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      auto draw = [&]() {
        Eigen::VectorXd mean = random_vector(rng, 3, 2.0);
        Eigen::MatrixXd a(3, 3);
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) a(i, j) = normal(rng);
        }
        return relbo::GaussianN(
            mean, a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3));
      };
      const auto p = draw();
      const auto q = draw();
      for (double a : unit_orders) {
        const double lhs =
            (1.0 - a) / a *
            relbo::renyi_divergence_gaussian(p, q, relbo::RenyiOrder(a));
        const double rhs =
            relbo::renyi_divergence_gaussian(q, p, relbo::RenyiOrder(1.0 - a));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    add("gaussian_skew_symmetry", worst, 1e-9);
  }
  {  // Gaussian order->1 limit on nearby pairs.
    std::mt19937_64 rng(relbo::derive_seed(seed, 106));
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    std::uniform_real_distribution<double> stretch(0.8, 1.25);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const relbo::Gaussian1 p(0.0, 1.0);
      const relbo::Gaussian1 q(shift(rng), stretch(rng));
      const double kl = relbo::kl_divergence_gaussian(p, q);
      const double near = relbo::renyi_divergence_gaussian(
          p, q, relbo::RenyiOrder(1.0 - 1e-6));
      worst = std::max(worst, std::abs(near - kl));
    }
    add("gaussian_kl_limit", worst, 1e-4);
  }
  {  // One-dimensional matrix form agrees with the scalar form.
    std::mt19937_64 rng(relbo::derive_seed(seed, 107));
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = random_gaussian1(rng);
      const auto q = random_gaussian1(rng);
      Eigen::VectorXd mp(1), mq(1);
      mp << p.mean();
      mq << q.mean();
      Eigen::MatrixXd vp(1, 1), vq(1, 1);
      vp << p.variance();
      vq << q.variance();
      for (double a : unit_orders) {
        const double scalar =
            relbo::renyi_divergence_gaussian(p, q, relbo::RenyiOrder(a));
        const double matrix = relbo::renyi_divergence_gaussian(
            relbo::GaussianN(mp, vp), relbo::GaussianN(mq, vq),
            relbo::RenyiOrder(a));
        worst = std::max(worst, std::abs(scalar - matrix));
      }
    }
    add("gaussian_matrix_vs_scalar", worst, 1e-12);
  }
  {  // Spectral regularizer fast path vs dense oracle (relative).
    std::mt19937_64 rng(relbo::derive_seed(seed, 108));
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const auto model = random_ppca(rng, 4 + trial % 13, 1 + trial % 4);
      for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd x = random_vector(rng, model.n_x(), 1.5);
        for (double a : unit_orders) {
          const double fast =
              relbo::renyi_regularizer(model, x, relbo::RenyiOrder(a))
                  .total_corrected;
          const double dense =
              relbo::dense_oracle_regularizer(model, x, relbo::RenyiOrder(a));
          worst = std::max(worst, std::abs(fast - dense) /
                                      std::max(1.0, std::abs(dense)));
        }
      }
    }
    add("ppca_fast_vs_dense", worst, 1e-10);
  }
  {  // Latent-space posterior vs dense normal equations.
    std::mt19937_64 rng(relbo::derive_seed(seed, 109));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto model = random_ppca(rng, 6, 3);
      const Eigen::VectorXd x = random_vector(rng, model.n_x(), 1.5);
      const relbo::GaussianN post = relbo::posterior(model, x);
      const Eigen::MatrixXd& c = model.loading();
      const double s2 = model.noise_std() * model.noise_std();
      const Eigen::MatrixXd big =
          c * c.transpose() +
          s2 * Eigen::MatrixXd::Identity(model.n_x(), model.n_x());
      const Eigen::MatrixXd beta = c.transpose() * big.inverse();
      worst = std::max(worst,
                       (post.mean() - beta * x).cwiseAbs().maxCoeff());
      const Eigen::MatrixXd cov_dense =
          Eigen::MatrixXd::Identity(model.n_y(), model.n_y()) - beta * c;
      worst = std::max(
          worst, (post.covariance() - cov_dense).cwiseAbs().maxCoeff());
    }
    add("ppca_posterior_vs_dense", worst, 1e-10);
  }
  {  // Latent-space evidence vs dense marginal density.
    std::mt19937_64 rng(relbo::derive_seed(seed, 110));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto model = random_ppca(rng, 5, 2);
      const Eigen::VectorXd x = random_vector(rng, model.n_x(), 1.5);
      const Eigen::MatrixXd cov =
          model.loading() * model.loading().transpose() +
          model.noise_std() * model.noise_std() *
              Eigen::MatrixXd::Identity(model.n_x(), model.n_x());
      const relbo::GaussianN marginal(Eigen::VectorXd::Zero(model.n_x()), cov);
      worst = std::max(worst, std::abs(relbo::log_evidence(model, x) -
                                       marginal.log_pdf(x)));
    }
    add("ppca_evidence_vs_dense", worst, 1e-10);
  }
  {  // Exact bound identity and evidence dominance across encoders.
    std::mt19937_64 rng(relbo::derive_seed(seed, 111));
    double worst_residual = 0.0;
    double worst_excess = 0.0;
    double worst_tightness = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto model = random_ppca(rng, 5, 2);
      const Eigen::VectorXd x = random_vector(rng, model.n_x(), 1.5);
      for (double a : unit_orders) {
        const relbo::RenyiOrder order(a);
        relbo::GaussianEncoder base =
            relbo::optimal_encoder_map(model, order);
        for (double scale : {0.0, 0.3}) {
          relbo::GaussianEncoder enc = base;
          enc.offset.array() += scale;
          enc.covariance *= (1.0 + scale);
          const auto r = relbo::bound_report(enc, model, x, order, 1.0);
          worst_residual =
              std::max(worst_residual, std::abs(r.identity_residual));
          worst_excess =
              std::max(worst_excess, r.relbo - r.log_evidence);
          if (scale == 0.0) {
            worst_tightness = std::max(
                worst_tightness, std::abs(r.relbo - r.log_evidence));
          }
        }
      }
    }
    add("relbo_identity_residual", worst_residual, 1e-9);
    add("relbo_evidence_dominance", std::max(worst_excess, 0.0), 1e-9);
    add("relbo_tight_at_optimum", worst_tightness, 1e-9);
  }
  {  // Variational representation: analytic minimizer and grid minimum.
    std::mt19937_64 rng(relbo::derive_seed(seed, 112));
    double worst_vstar = 0.0;
    double worst_grid = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto joint = relbo::random_interior_joint(rng);
      std::uniform_real_distribution<double> unif(0.1, 0.9);
      const double q0 = unif(rng);
      const relbo::DiscreteDist prior({q0, 1.0 - q0});
      for (double a : {0.3, 0.5, 0.8}) {
        worst_vstar = std::max(
            worst_vstar, relbo::variational_rep_vstar_gap(
                             joint, prior, relbo::RenyiOrder(a)));
        worst_grid = std::max(
            worst_grid, relbo::variational_rep_residual(
                            joint, prior, relbo::RenyiOrder(a), 2001));
      }
    }
    add("variational_rep_minimizer", worst_vstar, 1e-12);
    add("variational_rep_grid", worst_grid, 1e-4);
  }
  {  // Landscape closed form vs quadrature over the default grid.
    const auto grid = relbo::GmGrid::default_grid();
    const auto points = relbo::sweep(grid, {}, 64);
    double worst = 0.0;
    for (const auto& pt : points) {
      if (pt.feasible) worst = std::max(worst, pt.abs_diff);
    }
    add("gm_closed_vs_quadrature", worst, 1e-7);
  }
  {  // Zero-correlation reduction to a single divergence.
    std::mt19937_64 rng(relbo::derive_seed(seed, 113));
    std::uniform_real_distribution<double> ratio(0.3, 3.0);
    std::uniform_real_distribution<double> gap(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      auto [p, prior] =
          relbo::gm_point(relbo::BivariateParams{}, 0.0, ratio(rng), gap(rng));
      for (double a : {0.25, 0.5, 0.75}) {
        const relbo::Gaussian1 py(p.mu_y, p.sigma_y * p.sigma_y);
        const relbo::Gaussian1 qy(prior.mu_yq,
                                  prior.sigma_yq * prior.sigma_yq);
        worst = std::max(
            worst, std::abs(relbo::ibar_closed(relbo::RenyiOrder(a), p, prior) -
                            relbo::renyi_divergence_gaussian(
                                py, qy, relbo::RenyiOrder(a))));
      }
    }
    add("gm_rho0_reduction", worst, 1e-12);
  }
  {  // Near-perfect correlation: order independence and the limit formula.
    double worst = 0.0;
    for (double vr : {0.5, 1.0, 2.0}) {
      for (double gap : {0.0, 1.0}) {
        auto [p, prior] =
            relbo::gm_point(relbo::BivariateParams{}, 1.0 - 1e-8, vr, gap);
        const double limit = relbo::ibar_rho1(p, prior);
        for (double a : {0.25, 0.5, 0.75, 1.5, 10.0}) {
          const double v = relbo::ibar_closed(relbo::RenyiOrder(a), p, prior);
          worst = std::max(worst, std::abs(v - limit) /
                                      std::max(1.0, std::abs(limit)));
        }
      }
    }
    add("gm_rho1_limit", worst, 1e-3);
  }
  {  // Two-by-two objective difference: direct route vs mixture route.
    std::mt19937_64 rng(relbo::derive_seed(seed, 114));
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const auto joint = relbo::random_interior_joint(rng);
      const double q0 = unif(rng);
      const relbo::DiscreteDist prior({q0, 1.0 - q0});
      for (double a : {0.25, 0.5, 0.75, 2.0}) {
        worst = std::max(
            worst,
            std::abs(relbo::f_alpha(joint, prior, relbo::RenyiOrder(a)) -
                     relbo::f_alpha_mixture_route(joint, prior,
                                                  relbo::RenyiOrder(a))));
      }
    }
    add("dichotomic_route_agreement", worst, 1e-12);
  }
  {  // Shannon chain rule decomposition.
    std::mt19937_64 rng(relbo::derive_seed(seed, 115));
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const auto joint = relbo::random_interior_joint(rng);
      const double q0 = unif(rng);
      worst = std::max(
          worst, std::abs(relbo::shannon_decomposition_residual(
                     joint, relbo::DiscreteDist({q0, 1.0 - q0}))));
    }
    add("dichotomic_shannon_chain", worst, 1e-12);
  }
  {  // Monte Carlo estimator brackets the closed form (well-conditioned).
    std::mt19937_64 rng(relbo::derive_seed(seed, 116));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd mean = random_vector(rng, 3, 2.0);
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a(i, j) = normal(rng);
    }
    const relbo::GaussianN p(
        mean, a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3));
    Eigen::VectorXd shifted = mean;
    shifted[0] += 0.3;
    const relbo::GaussianN q(shifted, 1.15 * p.covariance());
    double worst = 0.0;
    for (double alpha : {0.3, 0.7}) {
      const double closed =
          relbo::renyi_divergence_gaussian(p, q, relbo::RenyiOrder(alpha));
      const auto est = relbo::oracle_renyi_divergence(
          p, q, relbo::RenyiOrder(alpha), relbo::OracleMode::montecarlo,
          400000, relbo::derive_seed(seed, 117));
      worst = std::max(worst,
                       std::abs(est.value - closed) / (3.0 * est.error));
    }
    add("gaussian_montecarlo_bracket", worst, 1.0);
  }

  return results;
}

int run_verify(const CommonArgs& args) {
  const nlohmann::json config = load_config(args);
  reject_unknown_keys(config, {"tolerances"});
  std::map<std::string, double> overrides;
  if (config.contains("tolerances")) {
    if (!config["tolerances"].is_object()) {
      throw std::invalid_argument("config key 'tolerances' must be an object");
    }
    for (const auto& item : config["tolerances"].items()) {
      overrides[item.key()] = item.value().get<double>();
    }
  }

  std::vector<CheckResult> checks = run_all_checks(args.seed);
  for (CheckResult& c : checks) {
    if (args.has_tolerance()) c.tolerance = args.tolerance;
    const auto it = overrides.find(c.name);
    if (it != overrides.end()) c.tolerance = it->second;
    c.pass = c.max_error <= c.tolerance;
  }
  for (const auto& [name, unused] : overrides) {
    if (std::none_of(checks.begin(), checks.end(),
                     [&](const CheckResult& c) { return c.name == name; })) {
      throw std::invalid_argument("tolerance override for unknown check: " +
                                  name);
    }
  }

  nlohmann::json report = nlohmann::json::array();
  bool all_pass = true;
  for (const CheckResult& c : checks) {
    report.push_back({{"check", c.name},
                      {"max_error", c.max_error},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
    all_pass = all_pass && c.pass;
    fmt::print("{:<34} max_error={} tolerance={} {}\n", c.name,
               relbo::fmt17(c.max_error), relbo::fmt17(c.tolerance),
               c.pass ? "pass" : "FAIL");
  }
  const std::string out =
      args.out_path.empty() ? "verify_report.json" : args.out_path;
  write_json_file(report, out);
  fmt::print("{} checks, {} failed; report written to {}\n", checks.size(),
             std::count_if(checks.begin(), checks.end(),
                           [](const CheckResult& c) { return !c.pass; }),
             out);
  return all_pass ? kExitOk : kExitContractFailed;
}

// ---------------------------------------------------------------------------
// sweep-gm
// ---------------------------------------------------------------------------

std::vector<double> axis_from(const nlohmann::json& config,
                              const std::string& key,
                              std::vector<double> fallback) {
  if (!config.contains(key)) return fallback;
  const auto axis = config[key].get<std::vector<double>>();
  if (axis.empty()) {
    throw std::invalid_argument("config axis '" + key + "' is empty");
  }
  return axis;
}

int run_sweep_gm(const CommonArgs& args) {
  const nlohmann::json config = load_config(args);
  reject_unknown_keys(config,
                      {"alpha", "rho_sq", "var_ratio", "mean_gap",
                       "oracle_nodes", "baseline"});
  relbo::GmGrid grid = relbo::GmGrid::default_grid();
  grid.alpha = axis_from(config, "alpha", grid.alpha);
  if (!args.alpha.empty()) grid.alpha = args.alpha;
  grid.rho_sq = axis_from(config, "rho_sq", grid.rho_sq);
  grid.var_ratio = axis_from(config, "var_ratio", grid.var_ratio);
  grid.mean_gap = axis_from(config, "mean_gap", grid.mean_gap);
  const int nodes = config.value("oracle_nodes", 64);
  if (nodes < 2) throw std::invalid_argument("oracle_nodes must be >= 2");

  relbo::BivariateParams baseline;
  if (config.contains("baseline")) {
    const auto& b = config["baseline"];
    reject_unknown_keys(b, {"mu_x", "sigma_x", "mu_y", "sigma_y"});
    baseline.mu_x = b.value("mu_x", baseline.mu_x);
    baseline.sigma_x = b.value("sigma_x", baseline.sigma_x);
    baseline.mu_y = b.value("mu_y", baseline.mu_y);
    baseline.sigma_y = b.value("sigma_y", baseline.sigma_y);
  }
  baseline.validate();
  for (double a : grid.alpha) relbo::RenyiOrder{a};
  for (double r2 : grid.rho_sq) {
    if (!(r2 >= 0.0 && r2 < 1.0)) {
      throw std::invalid_argument("rho_sq values must lie in [0, 1)");
    }
  }
  for (double vr : grid.var_ratio) {
    if (!(vr > 0.0)) {
      throw std::invalid_argument("var_ratio values must be > 0");
    }
  }

  // Evaluate the flattened grid; chunked threads write disjoint slots, so
  // the result (and the files) are identical for every thread count.
  const std::size_t total = grid.size();
  std::vector<relbo::GmSweepPoint> points(total);
  const std::size_t n_r2 = grid.rho_sq.size();
  const std::size_t n_vr = grid.var_ratio.size();
  const std::size_t n_gap = grid.mean_gap.size();
  auto evaluate_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double a = grid.alpha[i / (n_r2 * n_vr * n_gap)];
      const double r2 = grid.rho_sq[(i / (n_vr * n_gap)) % n_r2];
      const double vr = grid.var_ratio[(i / n_gap) % n_vr];
      const double gap = grid.mean_gap[i % n_gap];
      auto [p, prior] = relbo::gm_point(baseline, r2, vr, gap);
      const relbo::RenyiOrder order(a);
      relbo::GmSweepPoint pt;
      pt.alpha = a;
      pt.rho_sq = r2;
      pt.var_ratio = vr;
      pt.mean_gap = gap;
      pt.feasible = relbo::feasibility(order, p, prior);
      if (pt.feasible) {
        pt.value = relbo::ibar_closed(order, p, prior);
        pt.oracle_value = relbo::ibar_oracle(order, p, prior, nodes).value;
        pt.abs_diff = std::abs(pt.value - pt.oracle_value);
      } else {
        pt.value = relbo::infinity();
        pt.oracle_value = relbo::infinity();
        pt.abs_diff = 0.0;
      }
      points[i] = pt;
    }
  };
  const int threads = std::min<int>(thread_count_from_env(),
                                    static_cast<int>(std::max<std::size_t>(
                                        total, 1)));
  if (threads <= 1) {
    evaluate_range(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(evaluate_range, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  const std::string out = args.out_path.empty() ? "gm_sweep.csv" : args.out_path;
  relbo::CsvWriter csv(out, {"alpha", "rho_sq", "var_ratio", "mean_gap",
                             "feasible", "value", "oracle_value", "abs_diff"});
  for (const auto& pt : points) {
    csv.write_row({relbo::fmt17(pt.alpha), relbo::fmt17(pt.rho_sq),
                   relbo::fmt17(pt.var_ratio), relbo::fmt17(pt.mean_gap),
                   pt.feasible ? "1" : "0", relbo::fmt17(pt.value),
                   relbo::fmt17(pt.oracle_value), relbo::fmt17(pt.abs_diff)});
  }

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : relbo::summarize_slices(points)) {
    summary.push_back({{"alpha", s.alpha},
                       {"rho_sq", s.rho_sq},
                       {"negative_cells", s.negative_cells},
                       {"feasible_cells", s.feasible_cells},
                       {"infeasible_cells", s.infeasible_cells}});
  }
  const std::string summary_out = summary_path_for(out);
  write_json_file(summary, summary_out);
  fmt::print("{} grid points written to {}; slice summary in {}\n", total, out,
             summary_out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dichotomic
// ---------------------------------------------------------------------------

int run_dichotomic(const CommonArgs& args) {
  const nlohmann::json config = load_config(args);
  reject_unknown_keys(config, {"joint", "s0_values", "grid_size"});
  relbo::DichotomicJoint joint = relbo::default_counterexample_joint();
  if (config.contains("joint")) {
    const auto& j = config["joint"];
    reject_unknown_keys(j, {"p_x0", "w0_given_x0", "w0_given_x1"});
    joint = relbo::DichotomicJoint::from_conditional(
        j.at("p_x0").get<double>(), j.at("w0_given_x0").get<double>(),
        j.at("w0_given_x1").get<double>());
  }
  const double order_value = args.alpha.empty() ? 0.5 : args.alpha.front();
  const relbo::RenyiOrder order(order_value);
  std::vector<double> s0_values = {1.0, 3.0, 10.0, 30.0, 100.0};
  if (config.contains("s0_values")) {
    s0_values = config["s0_values"].get<std::vector<double>>();
    if (s0_values.empty()) {
      throw std::invalid_argument("s0_values must be non-empty");
    }
  }
  const int grid_size = config.value("grid_size", 9999);

  const auto rows = relbo::limit_scan(joint, order, s0_values);
  const auto search = relbo::minimize_over_prior(joint, order, grid_size);

  fmt::print("order alpha = {}  true marginal q0 = {}\n",
             relbo::fmt17(order_value), relbo::fmt17(joint.p_y(0)));
  fmt::print("{:>12}  {:>24}  {:>24}\n", "s0", "f_alpha",
             "f_alpha_plus_log_s0");
  bool any_negative = false;
  for (const auto& row : rows) {
    fmt::print("{:>12}  {:>24}  {:>24}\n", relbo::fmt17(row.s0),
               relbo::fmt17(row.f_alpha),
               relbo::fmt17(row.f_alpha_plus_log_s0));
    any_negative = any_negative || row.f_alpha < -1e-9;
  }
  fmt::print("argmin q0 = {}  objective dip = {}  departs = {}\n",
             relbo::fmt17(search.argmin_q0),
             relbo::fmt17(search.value_at_marginal - search.best_value),
             search.departs ? "true" : "false");

  if (!args.out_path.empty()) {
    relbo::CsvWriter csv(args.out_path,
                         {"s0", "f_alpha", "f_alpha_plus_log_s0", "argmin_q0",
                          "departs"});
    for (const auto& row : rows) {
      csv.write_row({relbo::fmt17(row.s0), relbo::fmt17(row.f_alpha),
                     relbo::fmt17(row.f_alpha_plus_log_s0),
                     relbo::fmt17(search.argmin_q0),
                     search.departs ? "1" : "0"});
    }
  }

  // The departure witness doubles as the negative-value witness: the grid
  // argmin beats the true marginal by more than the classification
  // threshold exactly when the objective difference there is negative.
  if (search.departs || any_negative) return kExitOk;
  fmt::print("no departure witness at this order\n");
  return kExitContractFailed;
}

// ---------------------------------------------------------------------------
// ppca
// ---------------------------------------------------------------------------

int run_ppca(const CommonArgs& args) {
  const nlohmann::json config = load_config(args);
  reject_unknown_keys(config, {"model", "n_x", "n_y", "noise_std", "samples",
                               "x_count", "latent_dim"});
  const std::vector<double> alphas = alpha_grid_or(
      args, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument(
          "regularizer evaluation requires alpha in (0, 1)");
    }
  }
  const int x_count = config.value("x_count", 5);
  if (x_count < 1) throw std::invalid_argument("x_count must be >= 1");
  const double tol = args.has_tolerance() ? args.tolerance : 1e-9;

  relbo::PpcaModel model = [&]() {
    if (config.contains("model")) {
      // A supplied model is the object of study: evaluate it directly.
      return relbo::load_model(config["model"].get<std::string>());
    }
    // Otherwise generate a ground-truth model, sample from it, and study
    // the model recovered by the spectral fit.
    const int n_x = config.value("n_x", 64);
    const int n_y = config.value("n_y", 8);
    const double noise = config.value("noise_std", 1.0);
    std::mt19937_64 rng(relbo::derive_seed(args.seed, 201));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd c(n_x, n_y);
    for (int i = 0; i < n_x; ++i) {
      for (int j = 0; j < n_y; ++j) c(i, j) = normal(rng);
    }
    const relbo::PpcaModel generator(std::move(c), noise);
    const int samples = config.value("samples", 4000);
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    const Eigen::MatrixXd data = relbo::sample_data(
        generator, samples, relbo::derive_seed(args.seed, 202));
    const int latent = config.value("latent_dim", n_y);
    return relbo::fit_from_data(data, latent);
  }();

  const Eigen::MatrixXd x_rows =
      relbo::sample_data(model, x_count, relbo::derive_seed(args.seed, 203));

  const std::string out = args.out_path.empty() ? "ppca_eval.csv" : args.out_path;
  relbo::CsvWriter csv(out, {"alpha", "x_index", "scalar", "logdet_corrected",
                             "logdet_paper", "total_corrected", "total_paper",
                             "dense_oracle", "abs_diff"});
  double worst = 0.0;
  for (double a : alphas) {
    const relbo::RenyiOrder order(a);
    for (int k = 0; k < x_count; ++k) {
      const Eigen::VectorXd x = x_rows.row(k).transpose();
      const auto b = relbo::renyi_regularizer(model, x, order);
      const double dense = relbo::dense_oracle_regularizer(model, x, order);
      const double diff = std::abs(b.total_corrected - dense);
      worst = std::max(worst, diff);
      csv.write_row({relbo::fmt17(a), std::to_string(k),
                     relbo::fmt17(b.scalar_term),
                     relbo::fmt17(b.logdet_term_corrected),
                     relbo::fmt17(b.logdet_term_paper),
                     relbo::fmt17(b.total_corrected),
                     relbo::fmt17(b.total_paper), relbo::fmt17(dense),
                     relbo::fmt17(diff)});
    }
  }
  fmt::print(
      "model N_x={} N_y={} sigma={}; {} rows written to {}; worst "
      "fast-vs-dense gap = {}\n",
      model.n_x(), model.n_y(), relbo::fmt17(model.noise_std()),
      alphas.size() * x_count, out, relbo::fmt17(worst));
  return worst <= tol ? kExitOk : kExitContractFailed;
}

// ---------------------------------------------------------------------------
// relbo
// ---------------------------------------------------------------------------

int run_relbo(const CommonArgs& args) {
  const nlohmann::json config = load_config(args);
  reject_unknown_keys(config, {"model", "n_x", "n_y", "noise_std", "x_count",
                               "beta", "perturbations"});
  const std::vector<double> alphas = alpha_grid_or(args, {0.25, 0.5, 0.75});
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("bound orders must lie in (0, 1)");
    }
  }
  std::vector<double> betas = {0.25, 1.0};
  if (config.contains("beta")) {
    betas = config["beta"].get<std::vector<double>>();
    for (double b : betas) {
      if (!(b > 0.0)) throw std::invalid_argument("beta values must be > 0");
    }
  }
  std::vector<double> perturbations = {0.0, 0.25, 0.5};
  if (config.contains("perturbations")) {
    perturbations = config["perturbations"].get<std::vector<double>>();
    for (double s : perturbations) {
      if (!(s >= 0.0)) {
        throw std::invalid_argument("perturbation scales must be >= 0");
      }
    }
  }
  const int x_count = config.value("x_count", 3);
  if (x_count < 1) throw std::invalid_argument("x_count must be >= 1");
  const double tol = args.has_tolerance() ? args.tolerance : 1e-9;

  relbo::PpcaModel model = [&]() {
    if (config.contains("model")) {
      return relbo::load_model(config["model"].get<std::string>());
    }
    const int n_x = config.value("n_x", 6);
    const int n_y = config.value("n_y", 2);
    const double noise = config.value("noise_std", 0.8);
    std::mt19937_64 rng(relbo::derive_seed(args.seed, 301));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd c(n_x, n_y);
    for (int i = 0; i < n_x; ++i) {
      for (int j = 0; j < n_y; ++j) c(i, j) = normal(rng);
    }
    return relbo::PpcaModel(std::move(c), noise);
  }();
  const Eigen::MatrixXd x_rows =
      relbo::sample_data(model, x_count, relbo::derive_seed(args.seed, 302));

  const std::string out =
      args.out_path.empty() ? "relbo_report.csv" : args.out_path;
  relbo::CsvWriter csv(
      out, {"alpha", "beta", "perturbation", "x_index", "reconstruction",
            "kl_regularizer", "renyi_regularizer", "relbo", "selbo",
            "beta_elbo", "log_evidence", "gap", "identity_residual",
            "identity_residual_printed", "beta_elbo_exceeds"});
  double worst_residual = 0.0;
  double worst_excess = -relbo::infinity();
  int flagged = 0;
  for (double a : alphas) {
    const relbo::RenyiOrder order(a);
    const relbo::GaussianEncoder base = relbo::optimal_encoder_map(model, order);
    for (double beta : betas) {
      for (double scale : perturbations) {
        relbo::GaussianEncoder enc = base;
        enc.offset.array() += scale;
        enc.covariance *= (1.0 + scale);
        for (int k = 0; k < x_count; ++k) {
          const Eigen::VectorXd x = x_rows.row(k).transpose();
          const auto r = relbo::bound_report(enc, model, x, order, beta);
          const bool exceeds = r.beta_elbo > r.log_evidence + 1e-9;
          if (exceeds) ++flagged;
          worst_residual =
              std::max(worst_residual, std::abs(r.identity_residual));
          worst_excess = std::max(worst_excess, r.relbo - r.log_evidence);
          csv.write_row(
              {relbo::fmt17(a), relbo::fmt17(beta), relbo::fmt17(scale),
               std::to_string(k), relbo::fmt17(r.reconstruction),
               relbo::fmt17(r.kl_regularizer),
               relbo::fmt17(r.renyi_regularizer), relbo::fmt17(r.relbo),
               relbo::fmt17(r.selbo), relbo::fmt17(r.beta_elbo),
               relbo::fmt17(r.log_evidence), relbo::fmt17(r.gap),
               relbo::fmt17(r.identity_residual),
               relbo::fmt17(r.identity_residual_printed),
               exceeds ? "1" : "0"});
        }
      }
    }
  }
  fmt::print(
      "worst identity residual = {}; worst bound excess = {}; {} rows with "
      "beta-weighted overshoot; report written to {}\n",
      relbo::fmt17(worst_residual), relbo::fmt17(worst_excess), flagged, out);
  const bool ok = worst_residual <= tol && worst_excess <= tol;
  return ok ? kExitOk : kExitContractFailed;
}

// ---------------------------------------------------------------------------
// discrepancy
// ---------------------------------------------------------------------------

relbo::PpcaModel model_from_spectrum(const std::vector<double>& lambdas) {
  const Eigen::Index n = static_cast<Eigen::Index>(lambdas.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambdas[i] >= 0.0)) {
      throw std::invalid_argument("spectrum entries must be >= 0");
    }
    c(i, i) = lambdas[i];
  }
  return relbo::PpcaModel::unchecked_rank(std::move(c), 1.0);
}

/// Smallest matrix size at which replacing det((1-a) A + a B) by
/// (1-a) det A + a det B stops being an identity, probed on seeded
/// positive-definite pairs.
int first_failing_determinant_size(std::uint64_t seed) {
  std::mt19937_64 rng(relbo::derive_seed(seed, 401));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int n = 1; n <= 4; ++n) {
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      auto draw = [&]() {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
        }
        return (m * m.transpose() +
                0.5 * Eigen::MatrixXd::Identity(n, n))
            .eval();
      };
      const Eigen::MatrixXd a = draw();
      const Eigen::MatrixXd b = draw();
      for (double w : {0.25, 0.5, 0.75}) {
        const double combined = ((1.0 - w) * a + w * b).determinant();
        const double split =
            (1.0 - w) * a.determinant() + w * b.determinant();
        worst = std::max(worst, std::abs(combined - split) /
                                    std::max(1.0, std::abs(combined)));
      }
    }
    if (worst > 1e-12) return n;
  }
  return -1;
}

int run_discrepancy(const CommonArgs& args) {
  const nlohmann::json config = load_config(args);
  reject_unknown_keys(config, {"spectra"});
  std::vector<std::vector<double>> spectra = {
      {0.0},      {0.25},      {0.5},
      {1.0},      {2.0},       {0.5, 0.5},
      {1.0, 0.5}, {2.0, 1.0},  {1.0, 0.7, 0.3},
      {2.0, 1.0, 0.5, 0.25}};
  if (config.contains("spectra")) {
    spectra = config["spectra"].get<std::vector<std::vector<double>>>();
    for (const auto& s : spectra) {
      if (s.empty()) throw std::invalid_argument("empty spectrum in config");
    }
  }
  const std::vector<double> alphas = alpha_grid_or(
      args, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument(
          "discrepancy evaluation requires alpha in (0, 1)");
    }
  }
  const double corrected_tol = args.has_tolerance() ? args.tolerance : 1e-10;

  const std::string out =
      args.out_path.empty() ? "discrepancy.csv" : args.out_path;
  relbo::CsvWriter csv(out,
                       {"spectrum_id", "n_y", "max_lambda", "alpha",
                        "total_paper", "total_corrected", "dense_oracle",
                        "paper_abs_diff", "corrected_abs_diff"});
  double worst_corrected = 0.0;
  double min_paper_gap_above_half = relbo::infinity();
  for (std::size_t s = 0; s < spectra.size(); ++s) {
    const auto& lambdas = spectra[s];
    const relbo::PpcaModel model = model_from_spectrum(lambdas);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(model.n_x());
    const double max_lambda =
        *std::max_element(lambdas.begin(), lambdas.end());
    for (double a : alphas) {
      const relbo::RenyiOrder order(a);
      const auto b = relbo::renyi_regularizer(model, x, order);
      const double dense = relbo::dense_oracle_regularizer(model, x, order);
      const double paper_gap = std::abs(b.total_paper - dense);
      const double corrected_gap = std::abs(b.total_corrected - dense);
      worst_corrected = std::max(worst_corrected, corrected_gap);
      if (max_lambda >= 0.5) {
        min_paper_gap_above_half =
            std::min(min_paper_gap_above_half, paper_gap);
      }
      csv.write_row({std::to_string(s),
                     std::to_string(model.n_y()),
                     relbo::fmt17(max_lambda), relbo::fmt17(a),
                     relbo::fmt17(b.total_paper),
                     relbo::fmt17(b.total_corrected), relbo::fmt17(dense),
                     relbo::fmt17(paper_gap), relbo::fmt17(corrected_gap)});
    }
  }

  const int failing_size = first_failing_determinant_size(args.seed);
  fmt::print("table written to {}\n", out);
  fmt::print(
      "summary: the printed chain replaces a determinant of a convex matrix "
      "combination by the same combination of determinants; that step holds "
      "only for 1x1 matrices and first fails at N_y = {}.\n",
      failing_size);
  fmt::print(
      "corrected form tracks the dense oracle to {}; the printed form "
      "deviates from it by at least {} on every spectrum with max lambda >= "
      "0.5.\n",
      relbo::fmt17(worst_corrected),
      relbo::fmt17(min_paper_gap_above_half));
  return worst_corrected <= corrected_tol ? kExitOk : kExitContractFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi-bound numerical toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--seed", args.seed, "master random seed (default 42)");
    cmd->add_option("--out", args.out_path, "output file path");
    cmd->add_option("--alpha", args.alpha, "list of divergence orders");
    cmd->add_option("--tolerance", args.tolerance,
                    "override the default tolerance");
  };

  CLI::App* verify = app.add_subcommand(
      "verify", "reconcile every closed form against its oracle");
  CLI::App* sweep_gm = app.add_subcommand(
      "sweep-gm", "bivariate-Gaussian landscape sweep with summary");
  CLI::App* dichotomic = app.add_subcommand(
      "dichotomic", "two-by-two prior-departure demonstration");
  CLI::App* ppca = app.add_subcommand(
      "ppca", "regularizer evaluation over an alpha grid and x sample");
  CLI::App* relbo_cmd = app.add_subcommand(
      "relbo", "bound reports across orders, betas, and perturbations");
  CLI::App* discrepancy = app.add_subcommand(
      "discrepancy", "printed-vs-corrected regularizer comparison");
  for (CLI::App* cmd :
       {verify, sweep_gm, dichotomic, ppca, relbo_cmd, discrepancy}) {
    add_common(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (verify->parsed()) return run_verify(args);
    if (sweep_gm->parsed()) return run_sweep_gm(args);
    if (dichotomic->parsed()) return run_dichotomic(args);
    if (ppca->parsed()) return run_ppca(args);
    if (relbo_cmd->parsed()) return run_relbo(args);
    if (discrepancy->parsed()) return run_discrepancy(args);
  } catch (const nlohmann::json::exception& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitBadInput;
  } catch (const std::domain_error& e) {
    fmt::print(stderr, "infeasible input: {}\n", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitContractFailed;
  }
  return kExitBadInput;
}
