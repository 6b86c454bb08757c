#include "acdc/iht.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acdc/kernels.hpp"

namespace acdc {
namespace {

constexpr double kDivergenceFactor = 1e6;
constexpr std::size_t kStopWindow = 10;

std::size_t flat_pattern_cardinality(const SparsityPattern& pattern,
                                     std::size_t dim) {
  ParamSet p;
  p.segments.push_back(Segment{"flat", {dim}, Vec(dim, 0.0), true});
  return pattern_cardinality(p, pattern);
}

}  // namespace

std::uint64_t support_hash(const Vec& theta) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over support indices
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] == 0.0) continue;
    std::uint64_t x = i;
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xFF;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

PlantedProblem make_planted(std::size_t dim, std::size_t rows,
                            std::size_t k_star, double noise_sigma,
                            SeededRng& rng) {
  if (k_star > dim)
    throw std::invalid_argument("make_planted: k_star exceeds dimension");
  PlantedProblem p;
  p.k_star = k_star;
  p.noise_sigma = noise_sigma;
  p.a = gaussian_matrix(rows, dim, 1.0 / std::sqrt(static_cast<double>(rows)), rng);
  p.theta_star.assign(dim, 0.0);
  std::vector<std::size_t> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k_star; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(dim - i));
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < k_star; ++i) {
    double mag = 0.5 + rng.next_double();
    p.theta_star[idx[i]] = (rng.next_u64() & 1) ? mag : -mag;
  }
  p.b = matvec(p.a, p.theta_star);
  if (noise_sigma > 0.0)
    for (auto& v : p.b) v += noise_sigma * rng.next_normal();
  return p;
}

Vec iht_step(const Vec& theta, const Vec& g, double eta,
             const SparsityPattern& pattern) {
  if (theta.size() != g.size())
    throw std::invalid_argument("iht_step: dimension mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("iht_step: eta must be > 0");
  Vec next = theta;
  kernels::axpy(-eta, g.data(), next.data(), next.size());
  apply_mask_inplace(next, apply_pattern_flat(next, pattern));
  check_finite(next, "iht_step");
  return next;
}

Trajectory run_iht(const Objective& obj, const IhtConfig& cfg,
                   const Vec& theta0, SeededRng& rng, const Vec* theta_star) {
  if (cfg.batch_size < 1)
    throw std::invalid_argument("run_iht: batch_size must be >= 1");
  Trajectory traj;

  double eta;
  if (cfg.step_size.has_value()) {
    eta = *cfg.step_size;
    if (!(eta > 0.0)) throw std::invalid_argument("run_iht: step size must be > 0");
  } else {
    std::size_t t = cfg.smoothness_t != 0
                        ? cfg.smoothness_t
                        : std::max<std::size_t>(
                              1, flat_pattern_cardinality(cfg.pattern, obj.dim()));
    SeededRng probe = rng.fork(0xBE7A);
    traj.beta_hat =
        1.1 * smoothness_estimate(obj, theta0, t, cfg.smoothness_trials, probe);
    eta = (cfg.mode == IhtMode::Deterministic) ? 1.0 / traj.beta_hat
                                               : 1.0 / (2.0 * traj.beta_hat);
  }
  traj.step_size_used = eta;

  auto dist_to = [&](const Vec& th) -> std::optional<double> {
    if (theta_star == nullptr) return std::nullopt;
    double d2 = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
      double d = th[i] - (*theta_star)[i];
      d2 += d * d;
    }
    return std::sqrt(d2);
  };

  Vec theta = theta0;
  double max_abs = norm_inf(theta);
  const double f0 = obj.value(theta);
  std::vector<double> fs{f0};
  traj.records.push_back(
      {0, f0, norm2(obj.gradient(theta)), support_hash(theta), dist_to(theta),
       max_abs});

  // Epoch-wise shuffled partition for the stochastic mode.
  std::vector<std::size_t> order(obj.sample_count());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();  // force a reshuffle on first use

  std::vector<std::size_t> batch;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    Vec g;
    if (cfg.mode == IhtMode::Deterministic) {
      g = obj.gradient(theta);
    } else {
      batch.clear();
      if (cfg.scheme == BatchScheme::WithReplacement) {
        for (std::size_t i = 0; i < cfg.batch_size; ++i)
          batch.push_back(static_cast<std::size_t>(rng.next_below(order.size())));
      } else {
        for (std::size_t i = 0; i < cfg.batch_size; ++i) {
          if (cursor >= order.size()) {
            rng.shuffle(order);
            cursor = 0;
          }
          batch.push_back(order[cursor++]);
        }
      }
      g = stochastic_gradient(obj, theta, batch);
    }

    theta = iht_step(theta, g, eta, cfg.pattern);
    max_abs = std::max(max_abs, norm_inf(theta));
    double f = obj.value(theta);
    fs.push_back(f);
    traj.records.push_back({it, f, norm2(g), support_hash(theta),
                            dist_to(theta), max_abs});

    if (f > kDivergenceFactor * std::max(f0, 1e-12)) {
      traj.diverged = true;
      traj.diagnostic = "divergence guard: f exceeded 1e6 x f(theta0); "
                        "step size likely too large";
      break;
    }
    if (cfg.stop_tol > 0.0 && fs.size() > kStopWindow) {
      double prev = fs[fs.size() - 1 - kStopWindow];
      double rel = (prev - f) / std::max(std::fabs(prev), 1e-300);
      if (rel < cfg.stop_tol) break;
    }
  }

  if (cfg.polish.has_value() && !traj.diverged) {
    Mask support(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
      support.set(i, theta[i] != 0.0);
    auto res =
        iht_polish(obj, theta, support, cfg.polish->eps, cfg.polish->max_inner);
    theta = std::move(res.theta);
    auto& last = traj.records;
    max_abs = std::max(max_abs, norm_inf(theta));
    last.push_back({last.back().iter + 1, obj.value(theta),
                    norm2(obj.gradient(theta)), support_hash(theta),
                    dist_to(theta), max_abs});
  }

  traj.final_theta = std::move(theta);
  return traj;
}

PolishResult iht_polish(const Objective& obj, const Vec& theta, const Mask& m,
                        double eps, std::size_t max_inner,
                        std::optional<double> eta_opt) {
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (theta[i] != 0.0 && !m[i])
      throw std::invalid_argument("iht_polish: theta not supported on mask");

  double eta;
  if (eta_opt.has_value()) {
    eta = *eta_opt;
  } else {
    SeededRng probe(0x9E3779B9);  // fixed probe seed: polish is deterministic
    std::size_t t = std::max<std::size_t>(1, m.popcount());
    double beta_hat = 1.1 * smoothness_estimate(obj, theta, t, 20, probe);
    eta = beta_hat > 0.0 ? 1.0 / beta_hat : 1.0;
  }

  PolishResult res;
  res.theta = theta;
  double f = obj.value(res.theta);
  Vec g = apply_mask(obj.gradient(res.theta), m);
  res.grad_inf = norm_inf(g);
  res.grad_l2 = norm2(g);

  while (res.inner_steps < max_inner) {
    if (res.grad_inf <= eps) {
      res.converged = true;
      return res;
    }
    double step = eta;
    for (int tries = 0; tries < 60; ++tries) {
      Vec cand = res.theta;
      kernels::axpy(-step, g.data(), cand.data(), cand.size());
      apply_mask_inplace(cand, m);  // support never grows
      double fc = obj.value(cand);
      if (fc <= f) {  // monotone descent, halve on overshoot
        res.theta = std::move(cand);
        f = fc;
        break;
      }
      step *= 0.5;
    }
    ++res.inner_steps;
    g = apply_mask(obj.gradient(res.theta), m);
    res.grad_inf = norm_inf(g);
    res.grad_l2 = norm2(g);
  }
  res.converged = res.grad_inf <= eps;
  return res;
}

std::vector<double> contraction_rate(const Trajectory& t, double f_star) {
  if (t.records.empty())
    throw std::invalid_argument("contraction_rate: empty trajectory");
  std::vector<double> rates;
  rates.reserve(t.records.size() - 1);
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    double denom = std::max(t.records[i].f - f_star, 1e-300);
    double numer = std::max(t.records[i + 1].f - f_star, 0.0);
    rates.push_back(numer / denom);
  }
  return rates;
}

}  // namespace acdc
