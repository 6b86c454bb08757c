#pragma once

#include <memory>
#include <optional>
#include <span>

#include "acdc/core.hpp"
#include "acdc/sparsity.hpp"

namespace acdc {

// Classification dataset: rows of X are samples, y holds class indices.
struct Dataset {
  Matrix X;
  std::vector<std::size_t> y;
  std::size_t classes = 0;

  std::size_t size() const { return X.rows; }
};

// Evaluable objective with exact full-gradient and unbiased per-sample
// gradient oracles. f is the mean of the per-sample losses, so mini-batch
// gradients are unbiased estimators of the full gradient.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dim() const = 0;
  virtual std::size_t sample_count() const = 0;
  virtual double value(const Vec& theta) const = 0;
  virtual Vec gradient(const Vec& theta) const = 0;
  virtual Vec sample_gradient(const Vec& theta, std::size_t i) const = 0;
  virtual std::optional<double> optimum_value() const { return std::nullopt; }
};

// Mean of per-sample gradients over the batch.
Vec stochastic_gradient(const Objective& obj, const Vec& theta,
                        std::span<const std::size_t> batch);

// apply_mask(stochastic_gradient(...), m): zero exactly off the support.
Vec restricted_gradient(const Objective& obj, const Vec& theta, const Mask& m,
                        std::span<const std::size_t> batch);

// f(theta) = ||b - A theta||^2, per-sample f_i = m*(b_i - a_i^T theta)^2.
class LeastSquares : public Objective {
 public:
  LeastSquares(Matrix a, Vec b);

  std::size_t dim() const override { return a_.cols; }
  std::size_t sample_count() const override { return a_.rows; }
  double value(const Vec& theta) const override;
  Vec gradient(const Vec& theta) const override;
  Vec sample_gradient(const Vec& theta, std::size_t i) const override;

  const Matrix& a() const { return a_; }
  const Vec& b() const { return b_; }

 private:
  Matrix a_;
  Vec b_;
};

// Multinomial logistic regression over flat theta (classes x features,
// row-major), mean cross-entropy plus 0.5*l2*||theta||^2.
class LogisticMulti : public Objective {
 public:
  LogisticMulti(Dataset data, double l2 = 0.0);

  std::size_t dim() const override { return data_.X.cols * data_.classes; }
  std::size_t sample_count() const override { return data_.size(); }
  double value(const Vec& theta) const override;
  Vec gradient(const Vec& theta) const override;
  Vec sample_gradient(const Vec& theta, std::size_t i) const override;

  Vec logits(const Vec& theta, std::size_t i) const;
  const Dataset& data() const { return data_; }

 private:
  Dataset data_;
  double l2_;
};

// Feed-forward net, ReLU hidden layers, softmax cross-entropy loss.
// Weights are prunable, biases are not. The Objective view flattens every
// segment (weights then bias per layer, in layer order).
class Mlp : public Objective {
 public:
  Mlp(std::vector<std::size_t> widths, std::shared_ptr<const Dataset> data);

  // He-scaled Gaussian weights, zero biases.
  ParamSet init_params(SeededRng& rng) const;

  std::size_t dim() const override { return total_params_; }
  std::size_t sample_count() const override { return data_->size(); }
  double value(const Vec& theta) const override;
  Vec gradient(const Vec& theta) const override;
  Vec sample_gradient(const Vec& theta, std::size_t i) const override;

  // Loss and ParamSet-shaped gradient over a batch of sample ids.
  std::pair<double, ParamSet> value_grad(const ParamSet& params,
                                         std::span<const std::size_t> batch) const;
  std::pair<double, ParamSet> value_grad(const ParamSet& params, const Dataset& data,
                                         std::span<const std::size_t> batch) const;

  // Class probabilities for one sample (softmax of the forward pass).
  Vec predict_proba(const ParamSet& params, const double* features) const;
  double accuracy(const ParamSet& params, const Dataset& data) const;
  double mean_loss(const ParamSet& params, const Dataset& data) const;

  ParamSet unflatten(const Vec& theta) const;
  Vec flatten_all(const ParamSet& params) const;
  const std::vector<std::size_t>& widths() const { return widths_; }

 private:
  std::vector<std::size_t> widths_;
  std::shared_ptr<const Dataset> data_;
  std::size_t total_params_ = 0;
};

struct LandscapeEstimates {
  double beta_hat = 0.0;
  double alpha_hat = 0.0;
  double sigma2_hat = 0.0;
  double lipschitz_hat = 0.0;
};

// alpha certified at theta: 2*||T_r(grad f)||^2/(f - f*), or the unsquared
// norm variant when squared == false.
double cpl_estimate(const Objective& obj, const Vec& theta, std::size_t r,
                    double f_star, bool squared = true);

// Empirical restricted smoothness: max over sampled t-sparse perturbations
// of ||grad f(theta+delta) - grad f(theta)|| / ||delta||.
double smoothness_estimate(const Objective& obj, const Vec& theta,
                           std::size_t t, std::size_t trials, SeededRng& rng);

// Empirical max gradient norm over points sampled uniformly in the
// l-inf ball of the given radius around center.
double lipschitz_estimate(const Objective& obj, const Vec& center,
                          double radius, std::size_t trials, SeededRng& rng);

// Empirical per-sample gradient variance E||g_i - grad f||^2 at theta.
double gradient_variance(const Objective& obj, const Vec& theta);

}  // namespace acdc
