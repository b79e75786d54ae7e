// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gagcn/text.hpp"
#include "gagcn/trainer.hpp"

// Ablation experiments on the synthetic suite: gated vs stable adjacency with
// one action class held out, and the candidate-count sweep. Both arms of a
// comparison share seed, initialization (where shapes allow, via name-keyed
// parameter streams), schedule and data order.

namespace gagcn {

struct SynthSuiteConfig {
  std::vector<std::string> classes = synth_class_names();
  int sequences_per_class = 6;
  int frames_per_sequence = 160;
  double noise_scale = 2.0;
  int stride = 5;

  void validate() const {
    if (classes.empty()) throw ConfigError("synth suite: class list must not be empty");
    if (sequences_per_class < 2) {
      throw ConfigError("synth suite: need >= 2 sequences per class (train + held-back test)");
    }
    if (frames_per_sequence < 1) throw ConfigError("synth suite: frames_per_sequence must be >= 1");
    if (stride < 1) throw ConfigError("synth suite: stride must be >= 1");
    for (const auto& c : classes) synth_class_from_string(c);
  }
};

struct AblationConfig {
  SynthSuiteConfig data;
  ModelConfig model;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string held_out_class = "figure8_drift";
  std::vector<std::pair<int, int>> sweep = {{4, 3}, {4, 1}, {1, 3}, {8, 6}, {3, 4}};
  std::vector<int> horizons_ms = kDefaultHorizonsMs;
  int threads = 1;
};

struct AblationRow {
  std::string suite;
  std::string arm;  // "gated" or "stable"
  int n;
  int m;
  std::uint64_t seed;
  std::string split;  // "seen" or "unseen"
  int horizon_ms;
  double value;
};

struct GateClassStat {
  std::string class_name;
  std::vector<double> mean_spatial;  // pooled over layers, windows and seeds
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::vector<std::pair<std::string, std::string>> summary;  // ordered key=value pairs
  std::vector<GateClassStat> gate_stats;
};

struct SuiteData {
  WindowSet train;
  WindowSet seen_test;
  WindowSet unseen_test;
  std::vector<std::pair<std::string, WindowSet>> per_class_test;
};

/// Per class: all but the last sequence feed training windows, the last is a
/// held-back test sequence. The held-out class (if any) contributes no
/// training windows; all its windows are the unseen split.
inline SuiteData build_synth_suite(const SynthSuiteConfig& cfg, std::uint64_t seed,
                                   const std::string& held_out, int input_frames,
                                   int output_frames) {
  cfg.validate();
  SuiteData data;
  const Rng base(seed);
  for (const std::string& cname : cfg.classes) {
    const SynthClass cls = synth_class_from_string(cname);
    const bool unseen = cname == held_out;
    WindowSet class_test;
    for (int s = 0; s < cfg.sequences_per_class; ++s) {
      Rng rng = base.split("synth." + cname + "." + std::to_string(s));
      const MotionSequence seq =
          synth_generate(cls, cfg.frames_per_sequence, cfg.noise_scale, rng);
      const WindowSet ws = make_windows(seq, input_frames, output_frames, cfg.stride);
      if (unseen) {
        data.unseen_test.append(ws);
        class_test.append(ws);
      } else if (s + 1 == cfg.sequences_per_class) {
        data.seen_test.append(ws);
        class_test.append(ws);
      } else {
        data.train.append(ws);
      }
    }
    data.per_class_test.emplace_back(cname, std::move(class_test));
  }
  if (data.train.empty()) throw ConfigError("synth suite: no training windows generated");
  return data;
}

/// Rejects arm configurations that differ in anything besides the candidate
/// counts and the stable flag.
inline void enforce_arm_symmetry(const ModelConfig& a, const ModelConfig& b) {
  ModelConfig na = a, nb = b;
  na.stable = nb.stable = false;
  na.n = nb.n = 1;
  na.m = nb.m = 1;
  const bool same = na.joints == nb.joints && na.channels == nb.channels &&
                    na.input_frames == nb.input_frames && na.output_frames == nb.output_frames &&
                    na.encoder_layers == nb.encoder_layers && na.width == nb.width &&
                    na.embed_width == nb.embed_width && na.decoder_blocks == nb.decoder_blocks &&
                    na.kernel == nb.kernel && na.dilations == nb.dilations && na.act == nb.act &&
                    na.residual == nb.residual;
  if (!same) {
    throw ConfigError("ablation: arm configurations differ beyond candidate counts; "
                      "the comparison would be unfair");
  }
}

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

/// Mean spatial blending-coefficient vector over all layers and windows.
template <class T>
std::vector<double> mean_spatial_gate(GagcnModel<T>& model, const WindowSet& ws) {
  std::vector<double> acc(static_cast<std::size_t>(model.cfg.n), 0.0);
  std::size_t samples = 0;
  for (const Window& w : ws.windows) {
    GateActivations<T> gates;
    model.predict(frames_to_cnt(w.input.template cast<T>()), &gates);
    for (const Tensor<T>& layer_w : gates.spatial) {
      for (std::size_t k = 0; k < layer_w.size() && k < acc.size(); ++k) {
        acc[k] += static_cast<double>(layer_w[k]);
      }
      samples += 1;
    }
  }
  if (samples > 0) {
    for (double& v : acc) v /= static_cast<double>(samples);
  }
  return acc;
}

namespace detail {

inline void push_report_rows(AblationReport& report, const std::string& suite,
                             const std::string& arm, int n, int m, std::uint64_t seed,
                             const std::string& split, const HorizonReport& hr) {
  for (std::size_t i = 0; i < hr.horizons_ms.size(); ++i) {
    report.rows.push_back(
        AblationRow{suite, arm, n, m, seed, split, hr.horizons_ms[i], hr.values[i]});
  }
}

inline double mean_at_horizon(const std::vector<AblationRow>& rows, const std::string& arm,
                              const std::string& split, int horizon_ms) {
  double acc = 0.0;
  int count = 0;
  for (const AblationRow& r : rows) {
    if (r.arm == arm && r.split == split && r.horizon_ms == horizon_ms) {
      acc += r.value;
      count += 1;
    }
  }
  return count ? acc / count : 0.0;
}

}  // namespace detail

template <class T>
AblationReport run_gated_vs_stable_impl(const AblationConfig& cfg) {
  bool found = false;
  for (const auto& c : cfg.data.classes) found = found || c == cfg.held_out_class;
  if (!found) {
    throw ConfigError("ablation: held_out_class '" + cfg.held_out_class +
                      "' is not in the class list");
  }
  if (cfg.data.classes.size() < 2) {
    throw ConfigError("ablation: need at least two classes (one held out, one seen)");
  }
  if (cfg.seeds.empty()) throw ConfigError("ablation: seed list must not be empty");

  ModelConfig gated_cfg = cfg.model;
  gated_cfg.stable = false;
  ModelConfig stable_cfg = cfg.model;
  stable_cfg.stable = true;
  stable_cfg.n = 1;
  stable_cfg.m = 1;
  enforce_arm_symmetry(gated_cfg, stable_cfg);

  AblationReport report;
  std::vector<GateClassStat> gate_acc;
  const std::string suite = "gated_vs_stable_unseen";
  for (const std::uint64_t seed : cfg.seeds) {
    const SuiteData data = build_synth_suite(cfg.data, seed, cfg.held_out_class,
                                             cfg.model.input_frames, cfg.model.output_frames);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    for (const bool stable_arm : {false, true}) {
      const ModelConfig& mc = stable_arm ? stable_cfg : gated_cfg;
      GagcnModel<T> model(mc, seed);
      train(model, data.train, data.seen_test, tc);
      const std::string arm = stable_arm ? "stable" : "gated";
      detail::push_report_rows(report, suite, arm, mc.n, mc.m, seed, "seen",
                               evaluate_horizons(model, data.seen_test, 25.0, cfg.horizons_ms,
                                                 tc.loss, HorizonAveraging::cumulative,
                                                 cfg.threads));
      detail::push_report_rows(report, suite, arm, mc.n, mc.m, seed, "unseen",
                               evaluate_horizons(model, data.unseen_test, 25.0, cfg.horizons_ms,
                                                 tc.loss, HorizonAveraging::cumulative,
                                                 cfg.threads));
      if (!stable_arm) {
        for (const auto& [cname, ws] : data.per_class_test) {
          const std::vector<double> mean = mean_spatial_gate(model, ws);
          bool merged = false;
          for (auto& stat : gate_acc) {
            if (stat.class_name == cname) {
              for (std::size_t k = 0; k < mean.size(); ++k) stat.mean_spatial[k] += mean[k];
              merged = true;
              break;
            }
          }
          if (!merged) gate_acc.push_back(GateClassStat{cname, mean});
        }
      }
    }
  }
  for (auto& stat : gate_acc) {
    for (double& v : stat.mean_spatial) v /= static_cast<double>(cfg.seeds.size());
  }
  report.gate_stats = std::move(gate_acc);

  const int last_h = cfg.horizons_ms.empty() ? 1000 : cfg.horizons_ms.back();
  const double gated_unseen = detail::mean_at_horizon(report.rows, "gated", "unseen", last_h);
  const double stable_unseen = detail::mean_at_horizon(report.rows, "stable", "unseen", last_h);
  double max_l1 = 0.0;
  std::string max_pair;
  for (std::size_t i = 0; i < report.gate_stats.size(); ++i) {
    for (std::size_t j = i + 1; j < report.gate_stats.size(); ++j) {
      const double d =
          l1_distance(report.gate_stats[i].mean_spatial, report.gate_stats[j].mean_spatial);
      if (d > max_l1) {
        max_l1 = d;
        max_pair = report.gate_stats[i].class_name + "/" + report.gate_stats[j].class_name;
      }
    }
  }
  report.summary.emplace_back("suite", suite);
  report.summary.emplace_back("held_out_class", cfg.held_out_class);
  report.summary.emplace_back("horizon_ms", std::to_string(last_h));
  report.summary.emplace_back("gated_unseen", num_str(gated_unseen));
  report.summary.emplace_back("stable_unseen", num_str(stable_unseen));
  report.summary.emplace_back("gated_le_stable", gated_unseen <= stable_unseen ? "true" : "false");
  report.summary.emplace_back("max_spatial_gate_l1", num_str(max_l1));
  report.summary.emplace_back("max_spatial_gate_l1_pair", max_pair);
  return report;
}

template <class T>
AblationReport run_candidate_sweep_impl(const AblationConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("ablation: seed list must not be empty");
  if (cfg.sweep.empty()) throw ConfigError("ablation: sweep settings must not be empty");
  const std::uint64_t seed = cfg.seeds.front();
  const SuiteData data = build_synth_suite(cfg.data, seed, /*held_out=*/"",
                                           cfg.model.input_frames, cfg.model.output_frames);
  AblationReport report;
  const std::string suite = "candidate_sweep";
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  std::string best;
  double best_value = 0.0;
  const int last_h = cfg.horizons_ms.empty() ? 1000 : cfg.horizons_ms.back();
  for (const auto& [n, m] : cfg.sweep) {
    ModelConfig mc = cfg.model;
    mc.stable = false;
    mc.n = n;
    mc.m = m;
    GagcnModel<T> model(mc, seed);
    train(model, data.train, data.seen_test, tc);
    const HorizonReport hr = evaluate_horizons(model, data.seen_test, 25.0, cfg.horizons_ms,
                                               tc.loss, HorizonAveraging::cumulative, cfg.threads);
    detail::push_report_rows(report, suite, "gated", n, m, seed, "seen", hr);
    const double v = detail::mean_at_horizon(report.rows, "gated", "seen", last_h);
    (void)v;
    if (!hr.values.empty()) {
      const double setting_value = hr.values.back();
      if (best.empty() || setting_value < best_value) {
        best_value = setting_value;
        best = "S" + std::to_string(n) + "_T" + std::to_string(m);
      }
    }
  }
  report.summary.emplace_back("suite", suite);
  report.summary.emplace_back("settings", std::to_string(cfg.sweep.size()));
  report.summary.emplace_back("horizon_ms", std::to_string(last_h));
  report.summary.emplace_back("best_setting", best);
  return report;
}

inline AblationReport run_ablation(const std::string& suite, const AblationConfig& cfg) {
  const bool f64 = cfg.train.precision == Precision::binary64;
  if (suite == "gated_vs_stable_unseen") {
    return f64 ? run_gated_vs_stable_impl<double>(cfg) : run_gated_vs_stable_impl<float>(cfg);
  }
  if (suite == "candidate_sweep") {
    return f64 ? run_candidate_sweep_impl<double>(cfg) : run_candidate_sweep_impl<float>(cfg);
  }
  throw ConfigError("unknown ablation suite '" + suite +
                    "' (expected gated_vs_stable_unseen or candidate_sweep)");
}

}  // namespace gagcn
