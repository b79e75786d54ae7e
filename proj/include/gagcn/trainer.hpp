// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gagcn/decoder.hpp"
#include "gagcn/motion.hpp"

namespace gagcn {

enum class LossKind { mpjpe, mae };

std::string to_string(LossKind k);
LossKind loss_from_string(const std::string& s);

inline const std::vector<int> kDefaultHorizonsMs = {80, 160, 320, 400, 560, 1000};

/// Mean per-joint position error over frame-major tensors [t x N x C]:
/// (1/(N*t)) sum_{f,n} ||pred[f,n,:] - gt[f,n,:]||_2.
template <class T>
double mpjpe(const Tensor<T>& pred, const Tensor<T>& gt) {
  if (!pred.same_shape(gt)) {
    throw ShapeError("mpjpe: shapes differ: " + pred.shape_str() + " vs " + gt.shape_str());
  }
  if (pred.rank() != 3) throw ShapeError("mpjpe: expected 3-D, got " + pred.shape_str());
  const int frames = pred.extent(0), joints = pred.extent(1), channels = pred.extent(2);
  double acc = 0.0;
  for (int f = 0; f < frames; ++f) {
    for (int n = 0; n < joints; ++n) {
      double ss = 0.0;
      for (int c = 0; c < channels; ++c) {
        const double d = static_cast<double>(pred.at(f, n, c)) - static_cast<double>(gt.at(f, n, c));
        ss += d * d;
      }
      acc += std::sqrt(ss);
    }
  }
  return acc / (static_cast<double>(frames) * joints);
}

/// Mean absolute error over frame-major tensors [t x N x C], normalized by
/// N*t and summed over channels.
template <class T>
double mae(const Tensor<T>& pred, const Tensor<T>& gt) {
  if (!pred.same_shape(gt)) {
    throw ShapeError("mae: shapes differ: " + pred.shape_str() + " vs " + gt.shape_str());
  }
  if (pred.rank() != 3) throw ShapeError("mae: expected 3-D, got " + pred.shape_str());
  const int frames = pred.extent(0), joints = pred.extent(1);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    acc += std::abs(static_cast<double>(pred[i]) - static_cast<double>(gt[i]));
  }
  return acc / (static_cast<double>(frames) * joints);
}

/// Per-frame error curve for one window: element f-1 is the metric of
/// predicted frame f against ground truth frame f.
template <class T>
std::vector<double> per_frame_errors(const Tensor<T>& pred, const Tensor<T>& gt, LossKind kind) {
  if (!pred.same_shape(gt)) {
    throw ShapeError("per_frame_errors: shapes differ: " + pred.shape_str() + " vs " +
                     gt.shape_str());
  }
  const int frames = pred.extent(0), joints = pred.extent(1), channels = pred.extent(2);
  std::vector<double> errs(static_cast<std::size_t>(frames), 0.0);
  for (int f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int n = 0; n < joints; ++n) {
      if (kind == LossKind::mpjpe) {
        double ss = 0.0;
        for (int c = 0; c < channels; ++c) {
          const double d =
              static_cast<double>(pred.at(f, n, c)) - static_cast<double>(gt.at(f, n, c));
          ss += d * d;
        }
        acc += std::sqrt(ss);
      } else {
        for (int c = 0; c < channels; ++c) {
          acc += std::abs(static_cast<double>(pred.at(f, n, c)) -
                          static_cast<double>(gt.at(f, n, c)));
        }
      }
    }
    errs[static_cast<std::size_t>(f)] = acc / joints;
  }
  return errs;
}

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double lr_decay = 0.96;
  std::uint64_t seed = 42;
  Precision precision = Precision::binary32;
  LossKind loss = LossKind::mpjpe;
  int log_every = 10;
  double divergence_threshold = 1e6;

  void validate() const {
    if (learning_rate <= 0.0) throw ConfigError("train: learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
    if (lr_decay <= 0.0) throw ConfigError("train: lr_decay must be > 0");
    if (log_every < 1) throw ConfigError("train: log_every must be >= 1");
  }
};

/// Adam with step-count bias correction. State lives alongside the parameter
/// list it was created for; steps are deterministic given gradients.
template <class T>
class AdamOptimizer {
public:
  explicit AdamOptimizer(const std::vector<Parameter<T>*>& params, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Parameter<T>* p : params) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }

  long step_count() const { return step_; }

  /// One update from the gradients currently stored in the parameters.
  void step(const std::vector<Parameter<T>*>& params, double lr) {
    if (params.size() != m_.size()) {
      throw ContractError("optimizer_step: parameter list does not match optimizer state");
    }
    step_ += 1;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter<T>& p = *params[i];
      Tensor<T>& m = m_[i];
      Tensor<T>& v = v_[i];
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        const double g = static_cast<double>(p.grad[j]);
        if (!std::isfinite(g)) {
          throw NumericError("optimizer_step: non-finite gradient in parameter '" + p.name + "'");
        }
        const double mj = beta1_ * static_cast<double>(m[j]) + (1.0 - beta1_) * g;
        const double vj = beta2_ * static_cast<double>(v[j]) + (1.0 - beta2_) * g * g;
        m[j] = static_cast<T>(mj);
        v[j] = static_cast<T>(vj);
        const double update = lr * (mj / bc1) / (std::sqrt(vj / bc2) + eps_);
        p.value[j] = static_cast<T>(static_cast<double>(p.value[j]) - update);
      }
    }
  }

private:
  double beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
};

/// Spec-named wrapper.
template <class T>
void optimizer_step(AdamOptimizer<T>& opt, const std::vector<Parameter<T>*>& params, double lr) {
  opt.step(params, lr);
}

struct EpochStats {
  int epoch;
  double train_loss;
  double val_loss;
};

struct TrainResult {
  std::vector<EpochStats> curve;
  long steps = 0;
  bool diverged = false;
};

/// Row sink for blending-coefficient logging: (step, layer, axis, weights).
using GateLogFn = std::function<void(long, int, Axis, const std::vector<double>&)>;

namespace detail {

template <class T>
struct PreparedWindow {
  Tensor<T> input;   // [C x N x T]
  Tensor<T> target;  // [C x N x t]
};

template <class T>
std::vector<PreparedWindow<T>> prepare_windows(const WindowSet& ws) {
  std::vector<PreparedWindow<T>> out;
  out.reserve(ws.windows.size());
  for (const Window& w : ws.windows) {
    out.push_back(PreparedWindow<T>{frames_to_cnt(w.input.template cast<T>()),
                                    frames_to_cnt(w.target.template cast<T>())});
  }
  return out;
}

}  // namespace detail

template <class T>
Var<T> make_loss(Tape<T>& tape, Var<T> pred, const Tensor<T>& target, LossKind kind) {
  (void)tape;
  return kind == LossKind::mpjpe ? ad::mpjpe_loss(pred, target) : ad::mae_loss(pred, target);
}

/// End-to-end supervised training. Deterministic for a fixed seed: batch
/// order, updates and logs depend only on (windows, cfg, model init). On
/// divergence the parameters are restored to the last completed epoch and the
/// result is flagged.
template <class T>
TrainResult train(GagcnModel<T>& model, const WindowSet& train_ws, const WindowSet& val_ws,
                  const TrainConfig& cfg, const GateLogFn& gate_log = nullptr) {
  cfg.validate();
  if (train_ws.windows.empty()) throw ConfigError("train: empty window set");
  const auto train_items = detail::prepare_windows<T>(train_ws);
  const auto val_items = detail::prepare_windows<T>(val_ws);
  const std::vector<Parameter<T>*> params = model.parameters();
  AdamOptimizer<T> opt(params);
  Rng order_rng = Rng(cfg.seed).split("batch-order");

  TrainResult result;
  std::vector<Tensor<T>> snapshot;
  snapshot.reserve(params.size());
  for (const Parameter<T>* p : params) snapshot.push_back(p->value);

  auto eval_mean_loss = [&](const std::vector<detail::PreparedWindow<T>>& items) {
    if (items.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& item : items) {
      Tensor<T> pred = model.predict(item.input);
      acc += (cfg.loss == LossKind::mpjpe)
                 ? mpjpe(cnt_to_frames(pred), cnt_to_frames(item.target))
                 : mae(cnt_to_frames(pred), cnt_to_frames(item.target));
    }
    return acc / static_cast<double>(items.size());
  };

  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates order, one child stream per epoch.
    std::vector<std::size_t> order(train_items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng erng = order_rng.split(static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(erng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }

    const double lr = cfg.learning_rate * std::pow(cfg.lr_decay, static_cast<double>(epoch));
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const T inv_b = T(1) / static_cast<T>(end - begin);
      const bool log_now = gate_log && (step % cfg.log_every == 0) && !model.cfg.stable;
      GateActivations<T> gates_acc;
      std::size_t gate_samples = 0;

      model.reset_gradients();
      double batch_loss = 0.0;
      for (std::size_t bi = begin; bi < end; ++bi) {
        const auto& item = train_items[order[bi]];
        Tape<T> tape;
        GateActivations<T> gates;
        Var<T> pred = model.forward(tape, item.input, log_now ? &gates : nullptr);
        Var<T> loss = make_loss(tape, pred, item.target, cfg.loss);
        batch_loss += static_cast<double>(tape.value(loss.id)[0]);
        tape.backward(ad::scale(loss, inv_b));
        if (log_now) {
          if (gates_acc.spatial.empty()) {
            gates_acc = gates;
          } else {
            for (std::size_t l = 0; l < gates.spatial.size(); ++l) {
              for (std::size_t k = 0; k < gates.spatial[l].size(); ++k) {
                gates_acc.spatial[l][k] += gates.spatial[l][k];
              }
              for (std::size_t k = 0; k < gates.temporal[l].size(); ++k) {
                gates_acc.temporal[l][k] += gates.temporal[l][k];
              }
            }
          }
          gate_samples += 1;
        }
      }
      batch_loss /= static_cast<double>(end - begin);
      epoch_loss += batch_loss * static_cast<double>(end - begin);
      seen += end - begin;

      if (!std::isfinite(batch_loss) || batch_loss > cfg.divergence_threshold) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = snapshot[i];
        result.diverged = true;
        result.steps = step;
        return result;
      }
      if (log_now && gate_samples > 0) {
        for (std::size_t l = 0; l < gates_acc.spatial.size(); ++l) {
          std::vector<double> ws(gates_acc.spatial[l].size());
          for (std::size_t k = 0; k < ws.size(); ++k) {
            ws[k] = static_cast<double>(gates_acc.spatial[l][k]) / static_cast<double>(gate_samples);
          }
          gate_log(step, static_cast<int>(l), Axis::spatial, ws);
          std::vector<double> wt(gates_acc.temporal[l].size());
          for (std::size_t k = 0; k < wt.size(); ++k) {
            wt[k] = static_cast<double>(gates_acc.temporal[l][k]) / static_cast<double>(gate_samples);
          }
          gate_log(step, static_cast<int>(l), Axis::temporal, wt);
        }
      }
      opt.step(params, lr);
      step += 1;
    }

    const double train_loss = seen ? epoch_loss / static_cast<double>(seen) : 0.0;
    const double val_loss = val_items.empty() ? train_loss : eval_mean_loss(val_items);
    result.curve.push_back(EpochStats{epoch, train_loss, val_loss});
    for (std::size_t i = 0; i < params.size(); ++i) snapshot[i] = params[i]->value;
  }
  result.steps = step;
  return result;
}

enum class HorizonAveraging { cumulative, at_frame };

struct HorizonReport {
  std::vector<int> horizons_ms;
  std::vector<int> frames;  // mapped frame counts, aligned with horizons_ms
  std::vector<double> values;
  std::string metric;
  HorizonAveraging mode = HorizonAveraging::cumulative;
};

inline int horizon_to_frames(int horizon_ms, double rate_hz) {
  return static_cast<int>(std::lround(static_cast<double>(horizon_ms) * rate_hz / 1000.0));
}

/// Mean per-frame error curve over a window set; element f is the mean error
/// of predicted frame f+1. Window evaluation may fan out over threads; the
/// reduction is by window index, so results do not depend on thread count.
template <class T>
std::vector<double> mean_frame_errors(GagcnModel<T>& model, const WindowSet& ws, LossKind kind,
                                      int threads = 1) {
  const auto items = detail::prepare_windows<T>(ws);
  const int t = model.cfg.output_frames;
  std::vector<std::vector<double>> per_window(items.size());
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Tensor<T> pred = model.predict(items[i].input);
      per_window[i] = per_frame_errors(cnt_to_frames(pred), cnt_to_frames(items[i].target), kind);
    }
  };
  const std::size_t nthreads =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)),
                                                     items.size()));
  if (nthreads <= 1) {
    worker(0, items.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (items.size() + nthreads - 1) / nthreads;
    for (std::size_t k = 0; k < nthreads; ++k) {
      const std::size_t lo = k * chunk;
      const std::size_t hi = std::min(items.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  std::vector<double> mean(static_cast<std::size_t>(t), 0.0);
  for (const auto& errs : per_window) {
    for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += errs[f];
  }
  if (!per_window.empty()) {
    for (double& v : mean) v /= static_cast<double>(per_window.size());
  }
  return mean;
}

template <class T>
HorizonReport evaluate_horizons(GagcnModel<T>& model, const WindowSet& ws, double rate_hz,
                                const std::vector<int>& horizons_ms = kDefaultHorizonsMs,
                                LossKind kind = LossKind::mpjpe,
                                HorizonAveraging mode = HorizonAveraging::cumulative,
                                int threads = 1) {
  if (ws.windows.empty()) throw ConfigError("evaluate_horizons: empty window set");
  const std::vector<double> mean = mean_frame_errors(model, ws, kind, threads);
  HorizonReport report;
  report.metric = to_string(kind);
  report.mode = mode;
  const int t = model.cfg.output_frames;
  for (const int h : horizons_ms) {
    const int f = horizon_to_frames(h, rate_hz);
    if (f < 1 || f > t) {
      std::fprintf(stderr, "warning: horizon %d ms maps to frame %d outside 1..%d; skipped\n", h,
                   f, t);
      continue;
    }
    double value;
    if (mode == HorizonAveraging::cumulative) {
      double acc = 0.0;
      for (int i = 0; i < f; ++i) acc += mean[static_cast<std::size_t>(i)];
      value = acc / static_cast<double>(f);
    } else {
      value = mean[static_cast<std::size_t>(f - 1)];
    }
    report.horizons_ms.push_back(h);
    report.frames.push_back(f);
    report.values.push_back(value);
  }
  return report;
}

/// Error of the predictor that repeats the last observed pose.
inline double zero_velocity_error(const Window& w, LossKind kind) {
  const int t = w.target.extent(0);
  Tensor<double> constant(w.target.shape());
  const int joints = w.target.extent(1), channels = w.target.extent(2);
  const int last = w.input.extent(0) - 1;
  for (int f = 0; f < t; ++f) {
    for (int n = 0; n < joints; ++n) {
      for (int c = 0; c < channels; ++c) constant.at(f, n, c) = w.input.at(last, n, c);
    }
  }
  return kind == LossKind::mpjpe ? mpjpe(constant, w.target) : mae(constant, w.target);
}

inline double zero_velocity_error(const WindowSet& ws, LossKind kind) {
  if (ws.windows.empty()) return 0.0;
  double acc = 0.0;
  for (const Window& w : ws.windows) acc += zero_velocity_error(w, kind);
  return acc / static_cast<double>(ws.windows.size());
}

/// Per-frame zero-velocity error curve averaged over windows.
inline std::vector<double> zero_velocity_frame_errors(const WindowSet& ws, LossKind kind) {
  if (ws.windows.empty()) return {};
  const int t = ws.target_frames;
  std::vector<double> mean(static_cast<std::size_t>(t), 0.0);
  for (const Window& w : ws.windows) {
    Tensor<double> constant(w.target.shape());
    const int joints = w.target.extent(1), channels = w.target.extent(2);
    const int last = w.input.extent(0) - 1;
    for (int f = 0; f < t; ++f) {
      for (int n = 0; n < joints; ++n) {
        for (int c = 0; c < channels; ++c) constant.at(f, n, c) = w.input.at(last, n, c);
      }
    }
    const auto errs = per_frame_errors(constant, w.target, kind);
    for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += errs[f];
  }
  for (double& v : mean) v /= static_cast<double>(ws.windows.size());
  return mean;
}

}  // namespace gagcn
