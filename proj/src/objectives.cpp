#include "acdc/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acdc/kernels.hpp"

namespace acdc {
namespace {

// log-sum-exp stabilized softmax in place; returns log Z - max.
void softmax_inplace(Vec& z) {
  double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

}  // namespace

Vec stochastic_gradient(const Objective& obj, const Vec& theta,
                        std::span<const std::size_t> batch) {
  if (batch.empty())
    throw std::invalid_argument("stochastic_gradient: empty batch");
  Vec g(obj.dim(), 0.0);
  for (std::size_t i : batch) {
    if (i >= obj.sample_count())
      throw std::invalid_argument("stochastic_gradient: sample index out of range");
    Vec gi = obj.sample_gradient(theta, i);
    kernels::axpy(1.0, gi.data(), g.data(), g.size());
  }
  kernels::scale(1.0 / static_cast<double>(batch.size()), g.data(), g.size());
  check_finite(g, "stochastic_gradient");
  return g;
}

Vec restricted_gradient(const Objective& obj, const Vec& theta, const Mask& m,
                        std::span<const std::size_t> batch) {
  Vec g = stochastic_gradient(obj, theta, batch);
  apply_mask_inplace(g, m);
  return g;
}

// ---------------------------------------------------------------- LeastSquares

LeastSquares::LeastSquares(Matrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() != a_.rows)
    throw std::invalid_argument("LeastSquares: b length must equal rows of A");
}

double LeastSquares::value(const Vec& theta) const {
  Vec r = matvec(a_, theta);
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double d = b_[i] - r[i];
    v += d * d;
  }
  return v;
}

Vec LeastSquares::gradient(const Vec& theta) const {
  Vec r = matvec(a_, theta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b_[i] - r[i];
  Vec g = matvec_t(a_, r);
  kernels::scale(-2.0, g.data(), g.size());
  return g;
}

Vec LeastSquares::sample_gradient(const Vec& theta, std::size_t i) const {
  const double* row = a_.row(i);
  double resid = b_[i] - kernels::dot(row, theta.data(), a_.cols);
  Vec g(a_.cols);
  double c = -2.0 * static_cast<double>(a_.rows) * resid;
  for (std::size_t j = 0; j < a_.cols; ++j) g[j] = c * row[j];
  return g;
}

// --------------------------------------------------------------- LogisticMulti

LogisticMulti::LogisticMulti(Dataset data, double l2)
    : data_(std::move(data)), l2_(l2) {
  if (l2_ < 0.0) throw std::invalid_argument("LogisticMulti: l2 must be >= 0");
  for (auto c : data_.y)
    if (c >= data_.classes)
      throw std::invalid_argument("LogisticMulti: label out of range");
}

Vec LogisticMulti::logits(const Vec& theta, std::size_t i) const {
  const std::size_t d = data_.X.cols;
  Vec z(data_.classes);
  for (std::size_t c = 0; c < data_.classes; ++c)
    z[c] = kernels::dot(theta.data() + c * d, data_.X.row(i), d);
  return z;
}

double LogisticMulti::value(const Vec& theta) const {
  if (theta.size() != dim())
    throw std::invalid_argument("LogisticMulti: dimension mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    Vec z = logits(theta, i);
    double mx = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - mx);
    loss += mx + std::log(lse) - z[data_.y[i]];
  }
  loss /= static_cast<double>(data_.size());
  return loss + 0.5 * l2_ * kernels::dot(theta.data(), theta.data(), theta.size());
}

Vec LogisticMulti::sample_gradient(const Vec& theta, std::size_t i) const {
  const std::size_t d = data_.X.cols;
  Vec p = logits(theta, i);
  softmax_inplace(p);
  p[data_.y[i]] -= 1.0;
  Vec g(dim());
  const double* x = data_.X.row(i);
  for (std::size_t c = 0; c < data_.classes; ++c)
    for (std::size_t j = 0; j < d; ++j) g[c * d + j] = p[c] * x[j];
  kernels::axpy(l2_, theta.data(), g.data(), g.size());
  return g;
}

Vec LogisticMulti::gradient(const Vec& theta) const {
  std::vector<std::size_t> all(data_.size());
  std::iota(all.begin(), all.end(), 0);
  return stochastic_gradient(*this, theta, all);
}

// ------------------------------------------------------------------------ Mlp

Mlp::Mlp(std::vector<std::size_t> widths, std::shared_ptr<const Dataset> data)
    : widths_(std::move(widths)), data_(std::move(data)) {
  if (widths_.size() < 2) throw std::invalid_argument("Mlp: need >= 2 widths");
  if (data_->X.cols != widths_.front())
    throw std::invalid_argument("Mlp: dataset feature count mismatch");
  if (data_->classes != widths_.back())
    throw std::invalid_argument("Mlp: dataset class count mismatch");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l)
    total_params_ += widths_[l + 1] * widths_[l] + widths_[l + 1];
}

ParamSet Mlp::init_params(SeededRng& rng) const {
  ParamSet p;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    std::size_t in = widths_[l], out = widths_[l + 1];
    Segment w{"layer" + std::to_string(l) + ".weight", {out, in}, Vec(out * in), true};
    double s = std::sqrt(2.0 / static_cast<double>(in));
    for (auto& v : w.values) v = s * rng.next_normal();
    Segment b{"layer" + std::to_string(l) + ".bias", {out}, Vec(out, 0.0), false};
    p.segments.push_back(std::move(w));
    p.segments.push_back(std::move(b));
  }
  return p;
}

ParamSet Mlp::unflatten(const Vec& theta) const {
  if (theta.size() != total_params_)
    throw std::invalid_argument("Mlp: flat parameter length mismatch");
  ParamSet p;
  std::size_t pos = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    std::size_t in = widths_[l], out = widths_[l + 1];
    Segment w{"layer" + std::to_string(l) + ".weight", {out, in},
              Vec(theta.begin() + pos, theta.begin() + pos + out * in), true};
    pos += out * in;
    Segment b{"layer" + std::to_string(l) + ".bias", {out},
              Vec(theta.begin() + pos, theta.begin() + pos + out), false};
    pos += out;
    p.segments.push_back(std::move(w));
    p.segments.push_back(std::move(b));
  }
  return p;
}

Vec Mlp::flatten_all(const ParamSet& params) const {
  Vec flat;
  flat.reserve(total_params_);
  for (const auto& s : params.segments)
    flat.insert(flat.end(), s.values.begin(), s.values.end());
  return flat;
}

std::pair<double, ParamSet> Mlp::value_grad(
    const ParamSet& params, std::span<const std::size_t> batch) const {
  return value_grad(params, *data_, batch);
}

std::pair<double, ParamSet> Mlp::value_grad(
    const ParamSet& params, const Dataset& data,
    std::span<const std::size_t> batch) const {
  if (batch.empty()) throw std::invalid_argument("Mlp: empty batch");
  const std::size_t layers = widths_.size() - 1;
  ParamSet grad = params;
  for (auto& s : grad.segments) std::fill(s.values.begin(), s.values.end(), 0.0);

  double loss = 0.0;
  std::vector<Vec> acts(layers + 1), preacts(layers);
  for (std::size_t bi : batch) {
    acts[0].assign(data.X.row(bi), data.X.row(bi) + data.X.cols);
    for (std::size_t l = 0; l < layers; ++l) {
      const Vec& w = params.segments[2 * l].values;
      const Vec& b = params.segments[2 * l + 1].values;
      std::size_t in = widths_[l], out = widths_[l + 1];
      preacts[l].resize(out);
      kernels::matvec(w.data(), out, in, acts[l].data(), preacts[l].data());
      for (std::size_t j = 0; j < out; ++j) preacts[l][j] += b[j];
      acts[l + 1] = preacts[l];
      if (l + 1 < layers)  // ReLU on hidden layers, subgradient 0 at 0
        for (auto& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
    }
    Vec p = acts[layers];
    double mx = *std::max_element(p.begin(), p.end());
    double lse = 0.0;
    for (double v : p) lse += std::exp(v - mx);
    loss += mx + std::log(lse) - p[data.y[bi]];
    softmax_inplace(p);
    p[data.y[bi]] -= 1.0;  // dL/dz at the output

    Vec delta = std::move(p);
    for (std::size_t l = layers; l-- > 0;) {
      std::size_t in = widths_[l], out = widths_[l + 1];
      Vec& gw = grad.segments[2 * l].values;
      Vec& gb = grad.segments[2 * l + 1].values;
      for (std::size_t j = 0; j < out; ++j) {
        kernels::axpy(delta[j], acts[l].data(), gw.data() + j * in, in);
        gb[j] += delta[j];
      }
      if (l == 0) break;
      Vec prev(in);
      kernels::matvec_t(params.segments[2 * l].values.data(), out, in,
                        delta.data(), prev.data());
      for (std::size_t j = 0; j < in; ++j)
        if (preacts[l - 1][j] <= 0.0) prev[j] = 0.0;
      delta = std::move(prev);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (auto& s : grad.segments)
    kernels::scale(inv, s.values.data(), s.values.size());
  return {loss, std::move(grad)};
}

double Mlp::value(const Vec& theta) const {
  std::vector<std::size_t> all(data_->size());
  std::iota(all.begin(), all.end(), 0);
  return value_grad(unflatten(theta), all).first;
}

Vec Mlp::gradient(const Vec& theta) const {
  std::vector<std::size_t> all(data_->size());
  std::iota(all.begin(), all.end(), 0);
  return flatten_all(value_grad(unflatten(theta), all).second);
}

Vec Mlp::sample_gradient(const Vec& theta, std::size_t i) const {
  std::size_t ids[1] = {i};
  return flatten_all(value_grad(unflatten(theta), ids).second);
}

Vec Mlp::predict_proba(const ParamSet& params, const double* features) const {
  const std::size_t layers = widths_.size() - 1;
  Vec a(features, features + widths_[0]);
  for (std::size_t l = 0; l < layers; ++l) {
    const Vec& w = params.segments[2 * l].values;
    const Vec& b = params.segments[2 * l + 1].values;
    std::size_t in = widths_[l], out = widths_[l + 1];
    Vec z(out);
    kernels::matvec(w.data(), out, in, a.data(), z.data());
    for (std::size_t j = 0; j < out; ++j) z[j] += b[j];
    if (l + 1 < layers)
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
    a = std::move(z);
  }
  softmax_inplace(a);
  return a;
}

double Mlp::accuracy(const ParamSet& params, const Dataset& data) const {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Vec p = predict_proba(params, data.X.row(i));
    std::size_t arg = std::max_element(p.begin(), p.end()) - p.begin();
    if (arg == data.y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double Mlp::mean_loss(const ParamSet& params, const Dataset& data) const {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return value_grad(params, data, all).first;
}

// ------------------------------------------------------- landscape estimates

double cpl_estimate(const Objective& obj, const Vec& theta, std::size_t r,
                    double f_star, bool squared) {
  if (r < 1 || r > obj.dim())
    throw std::invalid_argument("cpl_estimate: r out of range");
  double gap = obj.value(theta) - f_star;
  if (!(gap > 0.0))
    throw std::invalid_argument("cpl_estimate: f(theta) must exceed f_star");
  Vec g = obj.gradient(theta);
  Vec tg = apply_mask(g, top_k_global(g, r));
  double n2 = kernels::dot(tg.data(), tg.data(), tg.size());
  return squared ? 2.0 * n2 / gap : 2.0 * std::sqrt(n2) / gap;
}

double smoothness_estimate(const Objective& obj, const Vec& theta,
                           std::size_t t, std::size_t trials, SeededRng& rng) {
  if (t < 1 || trials < 1)
    throw std::invalid_argument("smoothness_estimate: t, trials must be >= 1");
  t = std::min(t, obj.dim());
  const double radius = 1e-4 * std::max(1.0, norm2(theta));
  Vec g0 = obj.gradient(theta);
  double best = 0.0;
  std::vector<std::size_t> idx(obj.dim());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // t distinct coordinates via partial Fisher-Yates
    for (std::size_t i = 0; i < t; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next_below(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    Vec delta(obj.dim(), 0.0);
    double n2 = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
      double v = rng.next_normal();
      delta[idx[i]] = v;
      n2 += v * v;
    }
    if (n2 == 0.0) continue;
    double s = radius / std::sqrt(n2);
    kernels::scale(s, delta.data(), delta.size());
    Vec pt = theta;
    kernels::axpy(1.0, delta.data(), pt.data(), pt.size());
    Vec g1 = obj.gradient(pt);
    kernels::axpy(-1.0, g0.data(), g1.data(), g1.size());
    best = std::max(best, norm2(g1) / radius);
  }
  return best;
}

double lipschitz_estimate(const Objective& obj, const Vec& center,
                          double radius, std::size_t trials, SeededRng& rng) {
  double best = norm2(obj.gradient(center));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Vec pt = center;
    for (auto& v : pt) v += radius * (2.0 * rng.next_double() - 1.0);
    best = std::max(best, norm2(obj.gradient(pt)));
  }
  return best;
}

double gradient_variance(const Objective& obj, const Vec& theta) {
  Vec g = obj.gradient(theta);
  double acc = 0.0;
  for (std::size_t i = 0; i < obj.sample_count(); ++i) {
    Vec gi = obj.sample_gradient(theta, i);
    kernels::axpy(-1.0, g.data(), gi.data(), gi.size());
    acc += kernels::dot(gi.data(), gi.data(), gi.size());
  }
  return acc / static_cast<double>(obj.sample_count());
}

}  // namespace acdc
