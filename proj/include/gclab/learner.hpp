#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gclab/angles.hpp"
#include "gclab/augment.hpp"
#include "gclab/errors.hpp"
#include "gclab/rng.hpp"
#include "gclab/series.hpp"

namespace gclab {

/// Architecture of the window-to-heading regressor. The window's horizontal
/// rate channels (p, q) are standardized, average-pooled, passed through a
/// small 1-D convolution bank, pooled again into coarse time bins, and fed
/// together with the raw bin means and global channel means through two
/// dense layers onto a (sin, cos) heading encoding.
struct RegressorShape {
  int window_length = 6000;
  int prepool = 20;
  int conv_kernels = 3;
  int conv_width = 7;
  int postpool = 10;
  int hidden = 16;

  int pooled_length() const { return window_length / prepool; }
  int conv_length() const { return pooled_length() - conv_width + 1; }
  int conv_bins() const { return conv_length() / postpool; }
  int raw_bins() const { return pooled_length() / postpool; }
  int feature_count() const { return conv_kernels * conv_bins() + 2 * raw_bins() + 2; }

  void validate() const {
    if (prepool < 1 || conv_kernels < 1 || conv_width < 1 || postpool < 1 || hidden < 1)
      throw config_error("learner: shape fields must be positive");
    if (window_length < prepool * (conv_width + postpool))
      throw shape_error("learner: window too short for the configured shape");
  }
};

struct Regressor {
  RegressorShape shape;
  // Per-axis input standardization, frozen from the train split.
  double mean_p = 0.0, mean_q = 0.0;
  double std_p = 1.0, std_q = 1.0;
  // Frozen per-feature affine normalization (also from the train split).
  std::vector<double> feat_mu, feat_sigma;
  // Trainable parameters.
  std::vector<double> conv_w;  // [kernels][2][width]
  std::vector<double> conv_b;  // [kernels]
  std::vector<double> w1;      // [hidden][features]
  std::vector<double> b1;      // [hidden]
  std::vector<double> w2;      // [2][hidden]
  std::vector<double> b2;      // [2]

  int parameter_count() const {
    return static_cast<int>(conv_w.size() + conv_b.size() + w1.size() + b1.size() + w2.size() +
                            b2.size());
  }
};

/// (sin, cos) prediction pair.
struct Prediction {
  double sin_hat = 0.0;
  double cos_hat = 0.0;
};

/// Squared error against the unit-circle encoding of the label. Invariant
/// under relabeling psi -> psi + 2*pi.
inline double loss(const Prediction& pred, double heading) {
  const double ds = pred.sin_hat - std::sin(heading);
  const double dc = pred.cos_hat - std::cos(heading);
  return ds * ds + dc * dc;
}

namespace detail {

struct ForwardCache {
  std::vector<double> u_p, u_q;  // pooled standardized channels
  std::vector<double> pre;       // conv pre-activations [k][t]
  std::vector<double> act;       // tanh(pre)
  std::vector<double> feat;      // raw features
  std::vector<double> z;         // normalized features
  std::vector<double> h_pre, h;  // dense hidden
  double y[2] = {0.0, 0.0};
};

/// Forward pass through feature extraction only (up to `feat`).
inline void forward_features(const Regressor& m, const RateSeries& window, ForwardCache& c) {
  const RegressorShape& s = m.shape;
  if (static_cast<int>(window.size()) != s.window_length)
    throw shape_error("learner: window length " + std::to_string(window.size()) +
                      " != configured " + std::to_string(s.window_length));
  const int lp = s.pooled_length();
  const int lc = s.conv_length();
  const int tbins = s.conv_bins();
  const int rbins = s.raw_bins();
  const int k_n = s.conv_kernels;
  const int w_n = s.conv_width;

  c.u_p.assign(lp, 0.0);
  c.u_q.assign(lp, 0.0);
  const double inv_pre = 1.0 / s.prepool;
  for (int t = 0; t < lp; ++t) {
    double ap = 0.0, aq = 0.0;
    const int off = t * s.prepool;
    for (int j = 0; j < s.prepool; ++j) {
      ap += window.p[off + j];
      aq += window.q[off + j];
    }
    c.u_p[t] = (ap * inv_pre - m.mean_p) / m.std_p;
    c.u_q[t] = (aq * inv_pre - m.mean_q) / m.std_q;
  }

  c.pre.assign(static_cast<std::size_t>(k_n) * lc, 0.0);
  c.act.assign(c.pre.size(), 0.0);
  for (int k = 0; k < k_n; ++k) {
    const double* wp = &m.conv_w[static_cast<std::size_t>(k) * 2 * w_n];
    const double* wq = wp + w_n;
    const double bk = m.conv_b[k];
    double* pre_k = &c.pre[static_cast<std::size_t>(k) * lc];
    for (int t = 0; t < lc; ++t) {
      double acc = bk;
      for (int w = 0; w < w_n; ++w) acc += wp[w] * c.u_p[t + w] + wq[w] * c.u_q[t + w];
      pre_k[t] = acc;
    }
  }
  for (std::size_t i = 0; i < c.pre.size(); ++i) c.act[i] = std::tanh(c.pre[i]);

  c.feat.assign(s.feature_count(), 0.0);
  const double inv_post = 1.0 / s.postpool;
  int fi = 0;
  for (int k = 0; k < k_n; ++k) {
    const double* act_k = &c.act[static_cast<std::size_t>(k) * lc];
    for (int j = 0; j < tbins; ++j) {
      double acc = 0.0;
      for (int i = 0; i < s.postpool; ++i) acc += act_k[j * s.postpool + i];
      c.feat[fi++] = acc * inv_post;
    }
  }
  for (const auto* u : {&c.u_p, &c.u_q}) {
    for (int j = 0; j < rbins; ++j) {
      double acc = 0.0;
      for (int i = 0; i < s.postpool; ++i) acc += (*u)[j * s.postpool + i];
      c.feat[fi++] = acc * inv_post;
    }
  }
  for (const auto* u : {&c.u_p, &c.u_q}) {
    double acc = 0.0;
    for (double v : *u) acc += v;
    c.feat[fi++] = acc / lp;
  }
}

inline void forward_with_cache(const Regressor& m, const RateSeries& window, ForwardCache& c) {
  forward_features(m, window, c);
  const int f_n = m.shape.feature_count();
  const int h_n = m.shape.hidden;
  c.z.assign(f_n, 0.0);
  for (int i = 0; i < f_n; ++i) c.z[i] = (c.feat[i] - m.feat_mu[i]) / m.feat_sigma[i];
  c.h_pre.assign(h_n, 0.0);
  c.h.assign(h_n, 0.0);
  for (int j = 0; j < h_n; ++j) {
    const double* row = &m.w1[static_cast<std::size_t>(j) * f_n];
    double acc = m.b1[j];
    for (int i = 0; i < f_n; ++i) acc += row[i] * c.z[i];
    c.h_pre[j] = acc;
    c.h[j] = std::tanh(acc);
  }
  for (int o = 0; o < 2; ++o) {
    const double* row = &m.w2[static_cast<std::size_t>(o) * h_n];
    double acc = m.b2[o];
    for (int j = 0; j < h_n; ++j) acc += row[j] * c.h[j];
    c.y[o] = acc;
  }
}

struct Gradients {
  std::vector<double> conv_w, conv_b, w1, b1, w2, b2;

  void resize_like(const Regressor& m) {
    conv_w.assign(m.conv_w.size(), 0.0);
    conv_b.assign(m.conv_b.size(), 0.0);
    w1.assign(m.w1.size(), 0.0);
    b1.assign(m.b1.size(), 0.0);
    w2.assign(m.w2.size(), 0.0);
    b2.assign(m.b2.size(), 0.0);
  }

  void scale(double a) {
    for (auto* v : {&conv_w, &conv_b, &w1, &b1, &w2, &b2})
      for (double& x : *v) x *= a;
  }
};

/// Backpropagate the loss for one item; accumulates into `g`.
inline double backward_accumulate(const Regressor& m, const ForwardCache& c, double heading,
                                  Gradients& g) {
  const RegressorShape& s = m.shape;
  const int f_n = s.feature_count();
  const int h_n = s.hidden;
  const int lc = s.conv_length();
  const int tbins = s.conv_bins();
  const double ts = std::sin(heading), tc = std::cos(heading);
  const double dy[2] = {2.0 * (c.y[0] - ts), 2.0 * (c.y[1] - tc)};
  const double item_loss =
      (c.y[0] - ts) * (c.y[0] - ts) + (c.y[1] - tc) * (c.y[1] - tc);

  std::vector<double> dh(h_n, 0.0);
  for (int o = 0; o < 2; ++o) {
    double* gw2 = &g.w2[static_cast<std::size_t>(o) * h_n];
    const double* w2row = &m.w2[static_cast<std::size_t>(o) * h_n];
    for (int j = 0; j < h_n; ++j) {
      gw2[j] += dy[o] * c.h[j];
      dh[j] += dy[o] * w2row[j];
    }
    g.b2[o] += dy[o];
  }

  std::vector<double> dz(f_n, 0.0);
  for (int j = 0; j < h_n; ++j) {
    const double dpre = dh[j] * (1.0 - c.h[j] * c.h[j]);
    g.b1[j] += dpre;
    double* gw1 = &g.w1[static_cast<std::size_t>(j) * f_n];
    const double* w1row = &m.w1[static_cast<std::size_t>(j) * f_n];
    for (int i = 0; i < f_n; ++i) {
      gw1[i] += dpre * c.z[i];
      dz[i] += dpre * w1row[i];
    }
  }

  // Only the conv block of the feature vector carries parameter gradients
  // below the dense layers; raw bins and means depend on inputs alone.
  const double inv_post = 1.0 / s.postpool;
  for (int k = 0; k < s.conv_kernels; ++k) {
    const double* act_k = &c.act[static_cast<std::size_t>(k) * lc];
    double* gw = &g.conv_w[static_cast<std::size_t>(k) * 2 * s.conv_width];
    double* gwq = gw + s.conv_width;
    double gb = 0.0;
    for (int j = 0; j < tbins; ++j) {
      const double dfeat = dz[k * tbins + j] / m.feat_sigma[k * tbins + j] * inv_post;
      if (dfeat == 0.0) continue;
      for (int i = 0; i < s.postpool; ++i) {
        const int t = j * s.postpool + i;
        const double a = act_k[t];
        const double dpre = dfeat * (1.0 - a * a);
        gb += dpre;
        for (int w = 0; w < s.conv_width; ++w) {
          gw[w] += dpre * c.u_p[t + w];
          gwq[w] += dpre * c.u_q[t + w];
        }
      }
    }
    g.conv_b[k] += gb;
  }
  return item_loss;
}

}  // namespace detail

/// Forward pass; returns the (sin, cos) prediction pair.
inline Prediction forward(const Regressor& m, const RateSeries& window) {
  detail::ForwardCache c;
  detail::forward_with_cache(m, window, c);
  return {c.y[0], c.y[1]};
}

/// Decode a heading from a prediction pair (radians in [-pi, pi)).
inline double decode_heading(const Prediction& p) {
  if (p.sin_hat == 0.0 && p.cos_hat == 0.0) return 0.0;
  return wrap_pi(std::atan2(p.sin_hat, p.cos_hat));
}

/// Wrapped heading RMSE of the model over the indexed items, in degrees.
inline double evaluate(const Regressor& m, const LabeledDataset& ds,
                       const std::vector<int>& indices) {
  if (indices.empty()) throw config_error("evaluate: empty split");
  double sum = 0.0, comp = 0.0;  // Kahan accumulation for a stable reduce
  detail::ForwardCache c;
  for (int idx : indices) {
    detail::forward_with_cache(m, ds.items[idx].window, c);
    const double err = wrapped_diff(decode_heading({c.y[0], c.y[1]}), ds.items[idx].heading);
    const double term = err * err - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return rad_to_deg(std::sqrt(sum / static_cast<double>(indices.size())));
}

struct TrainConfig {
  int epochs = 150;
  int batch_size = 32;
  double learning_rate = 0.03;
  std::uint64_t seed = 0;
  int early_stop_patience = 40;
  int restarts = 3;  // independent inits; the best validation model wins

  void validate() const {
    if (epochs < 1) throw config_error("train: epochs must be >= 1");
    if (batch_size < 1) throw config_error("train: batch_size must be >= 1");
    if (!(learning_rate >= 0.0)) throw config_error("train: negative learning rate");
    if (restarts < 1) throw config_error("train: restarts must be >= 1");
  }
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_rmse_deg = 0.0;
};

struct TrainResult {
  Regressor model;
  std::vector<EpochMetrics> metrics;
  int best_epoch = -1;
  double best_val_rmse_deg = 0.0;
};

namespace detail {

inline Regressor init_regressor(const LabeledDataset& ds, const std::vector<int>& train_ids,
                                RegressorShape shape, std::uint64_t seed) {
  shape.window_length = ds.config.window_length;
  shape.validate();
  Regressor m;
  m.shape = shape;

  // Input standardization over the train split.
  double sp = 0.0, sq = 0.0, spp = 0.0, sqq = 0.0;
  std::size_t n = 0;
  for (int idx : train_ids) {
    const RateSeries& w = ds.items[idx].window;
    for (std::size_t i = 0; i < w.size(); ++i) {
      sp += w.p[i];
      sq += w.q[i];
      spp += w.p[i] * w.p[i];
      sqq += w.q[i] * w.q[i];
      ++n;
    }
  }
  const double nn = static_cast<double>(n);
  m.mean_p = sp / nn;
  m.mean_q = sq / nn;
  m.std_p = std::max(std::sqrt(std::max(0.0, spp / nn - m.mean_p * m.mean_p)), 1e-12);
  m.std_q = std::max(std::sqrt(std::max(0.0, sqq / nn - m.mean_q * m.mean_q)), 1e-12);

  // Parameter init.
  rng::Stream init(rng::derive_seed(seed, "learner/init"));
  const int f_n = shape.feature_count();
  auto fill = [&](std::vector<double>& v, std::size_t count, double scale) {
    v.resize(count);
    for (double& x : v) x = scale * init.gaussian();
  };
  fill(m.conv_w, static_cast<std::size_t>(shape.conv_kernels) * 2 * shape.conv_width,
       1.0 / std::sqrt(2.0 * shape.conv_width));
  m.conv_b.assign(shape.conv_kernels, 0.0);
  fill(m.w1, static_cast<std::size_t>(shape.hidden) * f_n, 1.0 / std::sqrt(f_n));
  m.b1.assign(shape.hidden, 0.0);
  fill(m.w2, static_cast<std::size_t>(2) * shape.hidden, 1.0 / std::sqrt(shape.hidden));
  m.b2.assign(2, 0.0);

  // Frozen per-feature normalization from the train split, computed with the
  // freshly initialized conv bank.
  m.feat_mu.assign(f_n, 0.0);
  m.feat_sigma.assign(f_n, 1.0);
  std::vector<double> mu(f_n, 0.0), m2(f_n, 0.0);
  ForwardCache c;
  std::size_t count = 0;
  for (int idx : train_ids) {
    forward_features(m, ds.items[idx].window, c);
    ++count;
    for (int i = 0; i < f_n; ++i) {
      const double d = c.feat[i] - mu[i];
      mu[i] += d / static_cast<double>(count);
      m2[i] += d * (c.feat[i] - mu[i]);
    }
  }
  for (int i = 0; i < f_n; ++i) {
    m.feat_mu[i] = mu[i];
    m.feat_sigma[i] =
        std::max(std::sqrt(m2[i] / static_cast<double>(std::max<std::size_t>(count, 1))), 1e-9);
  }
  return m;
}

}  // namespace detail

namespace detail {

inline TrainResult train_one(const LabeledDataset& ds, const SplitIndices& split,
                             const RegressorShape& shape, const TrainConfig& cfg,
                             std::uint64_t run_seed) {
  TrainResult res;
  res.model = init_regressor(ds, split.train, shape, run_seed);
  Regressor& m = res.model;
  Regressor best = m;
  double best_rmse = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int since_best = 0;

  std::vector<int> order = split.train;
  ForwardCache cache;
  Gradients grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::Stream shuffle(rng::derive_seed(run_seed, "learner/shuffle", epoch));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(shuffle.below(i + 1));
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      grads.resize_like(m);
      for (std::size_t i = start; i < stop; ++i) {
        const DatasetItem& item = ds.items[order[i]];
        forward_with_cache(m, item.window, cache);
        epoch_loss += backward_accumulate(m, cache, item.heading, grads);
        ++seen;
      }
      grads.scale(1.0 / static_cast<double>(stop - start));
      const double lr = cfg.learning_rate;
      auto apply = [lr](std::vector<double>& p, const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
      };
      apply(m.conv_w, grads.conv_w);
      apply(m.conv_b, grads.conv_b);
      apply(m.w1, grads.w1);
      apply(m.b1, grads.b1);
      apply(m.w2, grads.w2);
      apply(m.b2, grads.b2);
    }
    epoch_loss /= static_cast<double>(seen);
    if (!std::isfinite(epoch_loss))
      throw training_error("train: loss diverged at epoch " + std::to_string(epoch));
    const double val_rmse = evaluate(m, ds, split.validation);
    res.metrics.push_back({epoch, epoch_loss, val_rmse});
    if (val_rmse < best_rmse) {
      best_rmse = val_rmse;
      best = m;
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best > cfg.early_stop_patience) {
      break;
    }
  }
  res.model = best;
  res.best_epoch = best_epoch;
  res.best_val_rmse_deg = best_rmse;
  return res;
}

}  // namespace detail

/// Mini-batch gradient descent with a fixed learning rate, run from
/// `restarts` independent seeded inits; the best validation model wins.
/// Deterministic given the seed; the returned metrics are the winning run's.
inline TrainResult train(const LabeledDataset& ds, const SplitIndices& split,
                         const RegressorShape& shape, const TrainConfig& cfg) {
  cfg.validate();
  if (split.train.empty() || split.validation.empty())
    throw config_error("train: empty train or validation split");
  TrainResult best;
  for (int r = 0; r < cfg.restarts; ++r) {
    TrainResult res = detail::train_one(ds, split, shape, cfg,
                                        rng::derive_seed(cfg.seed, "learner/restart", r));
    if (r == 0 || res.best_val_rmse_deg < best.best_val_rmse_deg) best = std::move(res);
  }
  return best;
}

}  // namespace gclab
