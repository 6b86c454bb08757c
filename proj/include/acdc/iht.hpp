#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "acdc/objectives.hpp"

namespace acdc {

enum class IhtMode { Deterministic, Stochastic };
enum class BatchScheme { ShuffledPartition, WithReplacement };

struct PolishConfig {
  double eps = 1e-8;
  std::size_t max_inner = 1000;
};

struct IhtConfig {
  // nullopt = auto: 1/beta_hat deterministic, 1/(2 beta_hat) stochastic,
  // with a 1.1 safety factor applied to beta_hat.
  std::optional<double> step_size;
  SparsityPattern pattern = GlobalTopK{};
  std::size_t max_iters = 500;
  double stop_tol = 0.0;  // relative f-decrease over a 10-iteration window
  IhtMode mode = IhtMode::Deterministic;
  std::size_t batch_size = 1;
  BatchScheme scheme = BatchScheme::ShuffledPartition;
  std::optional<PolishConfig> polish;
  // t used for the restricted-smoothness probe; 0 derives it from the
  // pattern cardinality.
  std::size_t smoothness_t = 0;
  std::size_t smoothness_trials = 30;
};

struct TrajectoryRecord {
  std::size_t iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  std::uint64_t support_hash = 0;
  std::optional<double> dist_to_star;
  double max_abs_seen = 0.0;  // running max |theta|_inf
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Vec final_theta;
  bool diverged = false;
  std::string diagnostic;
  double step_size_used = 0.0;
  double beta_hat = 0.0;
};

struct PlantedProblem {
  Matrix a;
  Vec b;
  Vec theta_star;
  std::size_t k_star = 0;
  double noise_sigma = 0.0;
};

// A is rows x dim Gaussian with scale 1/sqrt(rows); theta_star has k_star
// nonzeros with magnitudes in [0.5, 1.5); b = A theta_star + noise.
PlantedProblem make_planted(std::size_t dim, std::size_t rows,
                            std::size_t k_star, double noise_sigma,
                            SeededRng& rng);

// T_pattern(theta - eta*g)
Vec iht_step(const Vec& theta, const Vec& g, double eta,
             const SparsityPattern& pattern);

Trajectory run_iht(const Objective& obj, const IhtConfig& cfg,
                   const Vec& theta0, SeededRng& rng,
                   const Vec* theta_star = nullptr);

struct PolishResult {
  Vec theta;
  bool converged = false;
  std::size_t inner_steps = 0;
  double grad_inf = 0.0;  // restricted gradient norms at exit
  double grad_l2 = 0.0;
};

// Full-gradient descent restricted to the mask until the support-restricted
// gradient infinity-norm reaches eps. f never increases; the support never
// grows. A non-converged result carries converged == false, not an error.
PolishResult iht_polish(const Objective& obj, const Vec& theta, const Mask& m,
                        double eps, std::size_t max_inner,
                        std::optional<double> eta = std::nullopt);

// r_t = (f_{t+1} - f*) / (f_t - f*), denominators floored to keep the
// series NaN-free after convergence.
std::vector<double> contraction_rate(const Trajectory& t, double f_star);

std::uint64_t support_hash(const Vec& theta);

}  // namespace acdc
