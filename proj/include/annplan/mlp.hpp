#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "annplan/error.hpp"
#include "annplan/matrix.hpp"

namespace annplan {

struct TrainConfig {
  int max_epochs = 500;
  int batch_size = 200;
  double adam_lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double l2_lambda = 0.0;
  int patience = 20;
  double val_fraction = 0.2;
  uint64_t seed = 0;

  void validate() const {
    if (max_epochs < 1 || batch_size < 1 || patience < 1) throw ConfigError("train config: counts must be positive");
    if (adam_lr <= 0 || adam_epsilon <= 0) throw ConfigError("train config: adam parameters must be positive");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
      throw ConfigError("train config: validation fraction must lie in (0,1)");
    if (l2_lambda < 0) throw ConfigError("train config: l2_lambda must be >= 0");
  }
};

struct AdamState {
  std::vector<double> m, v;
  int64_t t = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads, const TrainConfig& cfg) {
    ++t;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grads[i];
      v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grads[i] * grads[i];
      double m_hat = m[i] / bc1;
      double v_hat = v[i] / bc2;
      params[i] -= cfg.adam_lr * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
  }
};

// Two-hidden-layer ReLU network (F_in -> 64 -> 32 -> 2) with a softmax head,
// trained on cross-entropy plus an L2 weight penalty. Class 0 means
// pre-filtering, class 1 post-filtering.
class MLPClassifier {
 public:
  static constexpr int kHidden1 = 64;
  static constexpr int kHidden2 = 32;
  static constexpr int kClasses = 2;

  MLPClassifier() = default;

  explicit MLPClassifier(int n_features, std::vector<int> hidden = {kHidden1, kHidden2})
      : sizes_{n_features} {
    for (int h : hidden) sizes_.push_back(h);
    sizes_.push_back(kClasses);
    weights_.resize(sizes_.size() - 1);
    biases_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_[l].assign(static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1], 0.0);
      biases_[l].assign(sizes_[l + 1], 0.0);
    }
  }

  // Uniform(-a, a) with a = sqrt(6/(fan_in+fan_out)); biases stay zero.
  void init_weights(uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      double a = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
      std::uniform_real_distribution<double> u(-a, a);
      for (double& w : weights_[l]) w = u(rng);
    }
  }

  int n_features() const { return sizes_.front(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  std::vector<std::vector<double>>& weights() { return weights_; }
  std::vector<std::vector<double>>& biases() { return biases_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }

  std::pair<double, double> predict_proba(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(sizes_.front()))
      throw InputError("mlp_predict_proba: feature arity mismatch");
    std::vector<double> act(x.begin(), x.end());
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      act = affine(l, act);
      if (l + 2 < sizes_.size())
        for (double& v : act) v = std::max(v, 0.0);
    }
    double mx = std::max(act[0], act[1]);
    double e0 = std::exp(act[0] - mx);
    double e1 = std::exp(act[1] - mx);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  int predict_class(std::span<const double> x) const {
    auto [p0, p1] = predict_proba(x);
    return p1 >= p0 ? 1 : 0;  // tie falls to post-filtering
  }

  // Mean cross-entropy over the batch plus l2 * sum of squared weights.
  double loss(const Matrix& x, std::span<const int> y, double l2) const {
    double ce = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto [p0, p1] = predict_proba(x.row(i));
      double p = y[i] == 0 ? p0 : p1;
      ce += -std::log(std::max(p, 1e-300));
    }
    ce /= static_cast<double>(x.rows());
    if (l2 > 0.0) {
      double w2 = 0.0;
      for (const auto& layer : weights_)
        for (double w : layer) w2 += w * w;
      ce += l2 * w2;
    }
    return ce;
  }

  struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
  };

  // Analytic gradient of loss() over the given batch.
  Gradients backprop(const Matrix& x, std::span<const int> y, double l2) const {
    Gradients g;
    g.weights.resize(weights_.size());
    g.biases.resize(biases_.size());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      g.weights[l].assign(weights_[l].size(), 0.0);
      g.biases[l].assign(biases_[l].size(), 0.0);
    }

    const double inv_n = 1.0 / static_cast<double>(x.rows());
    std::vector<std::vector<double>> acts(sizes_.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto xr = x.row(i);
      acts[0].assign(xr.begin(), xr.end());
      for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        acts[l + 1] = affine(l, acts[l]);
        if (l + 2 < sizes_.size())
          for (double& v : acts[l + 1]) v = std::max(v, 0.0);
      }
      std::vector<double>& logits = acts.back();
      double mx = std::max(logits[0], logits[1]);
      double e0 = std::exp(logits[0] - mx);
      double e1 = std::exp(logits[1] - mx);
      std::vector<double> delta{e0 / (e0 + e1), e1 / (e0 + e1)};
      delta[y[i]] -= 1.0;  // softmax + CE

      for (std::size_t l = weights_.size(); l-- > 0;) {
        const std::size_t in_n = static_cast<std::size_t>(sizes_[l]);
        const std::size_t out_n = static_cast<std::size_t>(sizes_[l + 1]);
        for (std::size_t o = 0; o < out_n; ++o) {
          g.biases[l][o] += inv_n * delta[o];
          for (std::size_t in = 0; in < in_n; ++in)
            g.weights[l][o * in_n + in] += inv_n * delta[o] * acts[l][in];
        }
        if (l == 0) break;
        std::vector<double> prev(in_n, 0.0);
        for (std::size_t in = 0; in < in_n; ++in) {
          if (acts[l][in] <= 0.0) continue;  // ReLU gate
          double s = 0.0;
          for (std::size_t o = 0; o < out_n; ++o) s += weights_[l][o * in_n + in] * delta[o];
          prev[in] = s;
        }
        delta = std::move(prev);
      }
    }

    if (l2 > 0.0)
      for (std::size_t l = 0; l < weights_.size(); ++l)
        for (std::size_t i = 0; i < weights_[l].size(); ++i)
          g.weights[l][i] += 2.0 * l2 * weights_[l][i];
    return g;
  }

  struct TrainHistory {
    std::vector<double> train_loss;  // one entry per completed epoch
    std::vector<double> val_loss;
    std::size_t best_epoch = 0;
  };

  static MLPClassifier train(const Matrix& features, std::span<const int> labels,
                             const TrainConfig& cfg, TrainHistory* history = nullptr);

 private:
  std::vector<double> affine(std::size_t l, const std::vector<double>& in) const {
    const std::size_t in_n = static_cast<std::size_t>(sizes_[l]);
    const std::size_t out_n = static_cast<std::size_t>(sizes_[l + 1]);
    std::vector<double> out(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
      double acc = biases_[l][o];
      const double* w = weights_[l].data() + o * in_n;
      for (std::size_t i = 0; i < in_n; ++i) acc += w[i] * in[i];
      out[o] = acc;
    }
    return out;
  }

  std::vector<int> sizes_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

inline MLPClassifier MLPClassifier::train(const Matrix& features, std::span<const int> labels,
                                          const TrainConfig& cfg, TrainHistory* history) {
  cfg.validate();
  if (features.rows() != labels.size()) throw InputError("mlp_train: row count mismatch");
  std::size_t pos = 0;
  for (int y : labels) pos += static_cast<std::size_t>(y == 1);
  if (pos == 0 || pos == labels.size())
    throw TrainError("mlp_train: both classes must be present");

  // Stratified split keeps both classes in the training partition.
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> idx0, idx1;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? idx1 : idx0).push_back(i);
  std::shuffle(idx0.begin(), idx0.end(), rng);
  std::shuffle(idx1.begin(), idx1.end(), rng);
  std::vector<std::size_t> train_ids, val_ids;
  for (auto* cls : {&idx0, &idx1}) {
    std::size_t n_val = static_cast<std::size_t>(
        std::llround(cfg.val_fraction * static_cast<double>(cls->size())));
    n_val = std::min(n_val, cls->size() - 1);  // never drain a class from training
    for (std::size_t i = 0; i < cls->size(); ++i)
      (i < n_val ? val_ids : train_ids).push_back((*cls)[i]);
  }
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(val_ids.begin(), val_ids.end());

  Matrix x_train = features.select(train_ids);
  Matrix x_val = features.select(val_ids);
  std::vector<int> y_train, y_val;
  for (std::size_t i : train_ids) y_train.push_back(labels[i]);
  for (std::size_t i : val_ids) y_val.push_back(labels[i]);

  MLPClassifier net(static_cast<int>(features.cols()));
  net.init_weights(cfg.seed);

  AdamState adam(net.parameter_count());
  MLPClassifier best = net;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

  std::vector<std::size_t> order(x_train.rows());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> flat_g(net.parameter_count());
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      Matrix bx;
      std::vector<int> by;
      for (std::size_t i = start; i < end; ++i) {
        bx.push_row(x_train.row(order[i]));
        by.push_back(y_train[order[i]]);
      }
      Gradients g = net.backprop(bx, by, cfg.l2_lambda);
      // Flatten parameters and gradients so one Adam state covers them all.
      std::size_t off = 0;
      for (std::size_t l = 0; l < g.weights.size(); ++l) {
        std::copy(g.weights[l].begin(), g.weights[l].end(), flat_g.begin() + off);
        off += g.weights[l].size();
        std::copy(g.biases[l].begin(), g.biases[l].end(), flat_g.begin() + off);
        off += g.biases[l].size();
      }
      std::vector<double> flat_p(net.parameter_count());
      off = 0;
      for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        std::copy(net.weights_[l].begin(), net.weights_[l].end(), flat_p.begin() + off);
        off += net.weights_[l].size();
        std::copy(net.biases_[l].begin(), net.biases_[l].end(), flat_p.begin() + off);
        off += net.biases_[l].size();
      }
      adam.step(flat_p, flat_g, cfg);
      off = 0;
      for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        std::copy(flat_p.begin() + off, flat_p.begin() + off + net.weights_[l].size(),
                  net.weights_[l].begin());
        off += net.weights_[l].size();
        std::copy(flat_p.begin() + off, flat_p.begin() + off + net.biases_[l].size(),
                  net.biases_[l].begin());
        off += net.biases_[l].size();
      }
    }

    double val_loss = x_val.rows() > 0 ? net.loss(x_val, y_val, 0.0)
                                       : net.loss(x_train, y_train, 0.0);
    if (history) {
      history->train_loss.push_back(net.loss(x_train, y_train, 0.0));
      history->val_loss.push_back(val_loss);
    }
    if (val_loss < best_val) {
      best_val = val_loss;
      best = net;
      stale = 0;
      if (history) history->best_epoch = history->val_loss.size() - 1;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return best;
}

// Central finite differences against the analytic gradient; returns the
// maximum relative error over all parameters. Test oracle for training.
inline double numeric_gradient_check(MLPClassifier model, const Matrix& x,
                                     std::span<const int> y, double l2, double step = 1e-5) {
  MLPClassifier::Gradients analytic = model.backprop(x, y, l2);
  double worst = 0.0;
  auto probe = [&](double& param, double analytic_g) {
    double saved = param;
    param = saved + step;
    double up = model.loss(x, y, l2);
    param = saved - step;
    double down = model.loss(x, y, l2);
    param = saved;
    double numeric = (up - down) / (2.0 * step);
    double rel = std::abs(analytic_g - numeric) /
                 std::max(std::abs(analytic_g) + std::abs(numeric), 1e-4);
    worst = std::max(worst, rel);
  };
  for (std::size_t l = 0; l < model.weights().size(); ++l) {
    for (std::size_t i = 0; i < model.weights()[l].size(); ++i)
      probe(model.weights()[l][i], analytic.weights[l][i]);
    for (std::size_t i = 0; i < model.biases()[l].size(); ++i)
      probe(model.biases()[l][i], analytic.biases[l][i]);
  }
  return worst;
}

}  // namespace annplan
