// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gagcn/gating.hpp"

// Encoder layers: blend spatial and temporal adjacencies per input, fuse them
// through the two-sided (Kronecker-equivalent) product, transform features,
// apply the nonlinearity.

namespace gagcn {

/// Per-layer blending coefficients captured during a forward pass.
template <class T>
struct GateActivations {
  std::vector<Tensor<T>> spatial;
  std::vector<Tensor<T>> temporal;
};

template <class T>
struct GagcnLayer {
  int in_width, out_width, joints, frames;
  Activation act;
  AdjacencyBank<T> spatial_bank;
  AdjacencyBank<T> temporal_bank;
  GatingNetwork<T> spatial_gate;
  GatingNetwork<T> temporal_gate;
  Parameter<T> transform;  // [in_width x out_width]

  GagcnLayer(const std::string& prefix, int in_width_, int out_width_, int joints_, int frames_,
             int n_candidates, int m_candidates, Activation act_, Rng rng)
      : in_width(in_width_),
        out_width(out_width_),
        joints(joints_),
        frames(frames_),
        act(act_),
        spatial_bank(prefix + ".as", Axis::spatial, joints_, n_candidates, rng),
        temporal_bank(prefix + ".at", Axis::temporal, frames_, m_candidates, rng),
        spatial_gate(prefix + ".gs", in_width_, n_candidates, rng),
        temporal_gate(prefix + ".gt", in_width_, m_candidates, rng),
        transform(prefix + ".w", uniform_fan_in<T>({in_width_, out_width_}, in_width_,
                                                   rng.split(prefix + ".w"))) {
    if (spatial_gate.q != spatial_bank.q || temporal_gate.q != temporal_bank.q) {
      throw ConfigError("layer: gate output width does not match bank candidate count");
    }
  }

  Var<T> forward(Tape<T>& tape, Var<T> h, GateActivations<T>* log = nullptr) {
    Var<T> ws = spatial_gate.forward(tape, h);
    Var<T> wt = temporal_gate.forward(tape, h);
    if (log != nullptr) {
      log->spatial.push_back(tape.value(ws.id));
      log->temporal.push_back(tape.value(wt.id));
    }
    Var<T> as = spatial_bank.blend_with(tape, ws);
    Var<T> at = temporal_bank.blend_with(tape, wt);
    Var<T> fused = ad::st_apply(as, at, h);
    Var<T> mapped = ad::channel_map(fused, tape.leaf(transform));
    return ad::act(mapped, act);
  }

  void collect(std::vector<Parameter<T>*>& out) {
    spatial_bank.collect(out);
    temporal_bank.collect(out);
    spatial_gate.collect(out);
    temporal_gate.collect(out);
    out.push_back(&transform);
  }
};

/// Ablation baseline: one fixed spatial and one fixed temporal adjacency, no
/// gating machinery. Matches a GagcnLayer with q = 1 banks exactly when the
/// shared parameters are equal; candidate-0 parameter names coincide so
/// name-keyed initialization produces that sharing.
template <class T>
struct StableLayer {
  int in_width, out_width, joints, frames;
  Activation act;
  Parameter<T> spatial;   // [N x N]
  Parameter<T> temporal;  // [T x T]
  Parameter<T> transform;

  StableLayer(const std::string& prefix, int in_width_, int out_width_, int joints_, int frames_,
              Activation act_, Rng rng)
      : in_width(in_width_),
        out_width(out_width_),
        joints(joints_),
        frames(frames_),
        act(act_),
        spatial(prefix + ".as.a0",
                identity_plus_noise<T>(joints_, 0.01, rng.split(prefix + ".as.a0"))),
        temporal(prefix + ".at.a0",
                 identity_plus_noise<T>(frames_, 0.01, rng.split(prefix + ".at.a0"))),
        transform(prefix + ".w", uniform_fan_in<T>({in_width_, out_width_}, in_width_,
                                                   rng.split(prefix + ".w"))) {}

  Var<T> forward(Tape<T>& tape, Var<T> h, GateActivations<T>* /*log*/ = nullptr) {
    Var<T> fused = ad::st_apply(tape.leaf(spatial), tape.leaf(temporal), h);
    Var<T> mapped = ad::channel_map(fused, tape.leaf(transform));
    return ad::act(mapped, act);
  }

  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&spatial);
    out.push_back(&temporal);
    out.push_back(&transform);
  }
};

/// Per-joint-frame affine lift of raw channels to the first feature width.
/// With in == out the map starts as the identity, so the initialized encoder
/// sees the raw window unchanged.
template <class T>
struct InputEmbedding {
  Parameter<T> weight;  // [C x w0]
  Parameter<T> bias;    // [w0]

  InputEmbedding(const std::string& prefix, int channels, int width, Rng rng)
      : weight(prefix + ".w", channels == width
                                  ? Tensor<T>::identity(channels)
                                  : uniform_fan_in<T>({channels, width}, channels,
                                                      rng.split(prefix + ".w"))),
        bias(prefix + ".b", Tensor<T>({width})) {}

  Var<T> forward(Tape<T>& tape, Var<T> x) {
    return ad::channel_bias(ad::channel_map(x, tape.leaf(weight)), tape.leaf(bias));
  }

  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

/// Stack of encoder layers with chained feature widths. Either all gated or
/// all stable (the ablation arm).
template <class T>
struct Encoder {
  std::vector<GagcnLayer<T>> gated;
  std::vector<StableLayer<T>> stable;
  std::vector<int> widths;  // size layers+1

  static Encoder make_gated(const std::string& prefix, const std::vector<int>& widths, int joints,
                            int frames, int n, int m, Activation act, Rng rng) {
    Encoder e;
    e.widths = widths;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      e.gated.emplace_back(prefix + ".l" + std::to_string(l), widths[l], widths[l + 1], joints,
                           frames, n, m, act, rng);
    }
    return e;
  }

  static Encoder make_stable(const std::string& prefix, const std::vector<int>& widths, int joints,
                             int frames, Activation act, Rng rng) {
    Encoder e;
    e.widths = widths;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      e.stable.emplace_back(prefix + ".l" + std::to_string(l), widths[l], widths[l + 1], joints,
                            frames, act, rng);
    }
    return e;
  }

  bool is_stable() const { return !stable.empty(); }
  std::size_t layer_count() const { return is_stable() ? stable.size() : gated.size(); }

  Var<T> forward(Tape<T>& tape, Var<T> h, GateActivations<T>* log = nullptr) {
    if (is_stable()) {
      for (auto& layer : stable) h = layer.forward(tape, h, log);
    } else {
      for (auto& layer : gated) h = layer.forward(tape, h, log);
    }
    return h;
  }

  void collect(std::vector<Parameter<T>*>& out) {
    for (auto& layer : gated) layer.collect(out);
    for (auto& layer : stable) layer.collect(out);
  }
};

// Operation-style wrappers.

template <class T>
Var<T> st_apply(Var<T> as, Var<T> at, Var<T> h) {
  return ad::st_apply(as, at, h);
}

template <class T>
Var<T> layer_forward(Tape<T>& tape, GagcnLayer<T>& layer, Var<T> h,
                     GateActivations<T>* log = nullptr) {
  return layer.forward(tape, h, log);
}

template <class T>
Var<T> encoder_forward(Tape<T>& tape, Encoder<T>& enc, Var<T> h,
                       GateActivations<T>* log = nullptr) {
  return enc.forward(tape, h, log);
}

template <class T>
Var<T> embed_input(Tape<T>& tape, InputEmbedding<T>& embed, Var<T> x) {
  return embed.forward(tape, x);
}

}  // namespace gagcn
