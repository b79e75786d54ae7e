// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gagcn/autodiff_ops.hpp"
#include "gagcn/rng.hpp"
#include "gagcn/tape.hpp"
#include "gagcn/tensor_ops.hpp"

// The enhancing block: gating networks that map layer features to blending
// coefficients, and banks of candidate adjacency matrices blended into an
// adaptive adjacency matrix.

namespace gagcn {

enum class Axis { spatial, temporal };

inline const char* to_string(Axis a) { return a == Axis::spatial ? "spatial" : "temporal"; }

/// Three affine layers with tanh between them and a softmax head. Consumes
/// mean-pooled features (over joints and frames) and emits coefficients on
/// the q-simplex. Hidden widths are twice the input feature width.
template <class T>
struct GatingNetwork {
  int in_width;
  int hidden;
  int q;
  Activation gate_act = Activation::tanh;
  Parameter<T> w1, b1, w2, b2, w3, b3;

  GatingNetwork(const std::string& prefix, int in_width_, int q_, Rng rng)
      : in_width(in_width_),
        hidden(2 * in_width_),
        q(q_),
        w1(prefix + ".fc0.w", uniform_fan_in<T>({in_width_, 2 * in_width_}, in_width_,
                                                rng.split(prefix + ".fc0.w"))),
        b1(prefix + ".fc0.b", Tensor<T>({2 * in_width_})),
        w2(prefix + ".fc1.w", uniform_fan_in<T>({2 * in_width_, 2 * in_width_}, 2 * in_width_,
                                                rng.split(prefix + ".fc1.w"))),
        b2(prefix + ".fc1.b", Tensor<T>({2 * in_width_})),
        w3(prefix + ".fc2.w",
           uniform_fan_in<T>({2 * in_width_, q_}, 2 * in_width_, rng.split(prefix + ".fc2.w"))),
        b3(prefix + ".fc2.b", Tensor<T>({q_})) {
    if (q_ < 1) throw ConfigError("gating: candidate count q must be >= 1");
  }

  /// h is [w x N x T]; returns blending coefficients on the q-simplex.
  Var<T> forward(Tape<T>& tape, Var<T> h) {
    const Tensor<T>& hv = tape.value(h.id);
    if (hv.rank() != 3 || hv.extent(0) != in_width) {
      throw ConfigError("gating: feature width " + hv.shape_str() + " does not match gate width " +
                        std::to_string(in_width));
    }
    Var<T> x = ad::pool_nt(h);
    x = ad::act(ad::affine_vec(x, tape.leaf(w1), tape.leaf(b1)), gate_act);
    x = ad::act(ad::affine_vec(x, tape.leaf(w2), tape.leaf(b2)), gate_act);
    x = ad::affine_vec(x, tape.leaf(w3), tape.leaf(b3));
    return ad::softmax(x);
  }

  void collect(std::vector<Parameter<T>*>& out) {
    out.push_back(&w1);
    out.push_back(&b1);
    out.push_back(&w2);
    out.push_back(&b2);
    out.push_back(&w3);
    out.push_back(&b3);
  }
};

/// q trainable square candidate matrices for one axis. Candidates start at
/// identity plus small noise so the early network approximates pass-through.
template <class T>
struct AdjacencyBank {
  Axis axis;
  int d;
  int q;
  std::vector<Parameter<T>> candidates;

  AdjacencyBank(const std::string& prefix, Axis axis_, int d_, int q_, Rng rng,
                double noise_scale = 0.01)
      : axis(axis_), d(d_), q(q_) {
    if (q_ < 1) throw ConfigError("adjacency bank: candidate count must be >= 1");
    if (d_ < 1) throw ConfigError("adjacency bank: dimension must be >= 1");
    candidates.reserve(static_cast<std::size_t>(q_));
    for (int i = 0; i < q_; ++i) {
      const std::string name = prefix + ".a" + std::to_string(i);
      candidates.emplace_back(name, identity_plus_noise<T>(d_, noise_scale, rng.split(name)));
    }
  }

  /// Blend candidates with coefficients w (length q) into one d x d matrix.
  Var<T> blend_with(Tape<T>& tape, Var<T> w) {
    const Tensor<T>& wv = tape.value(w.id);
    if (wv.rank() != 1 || wv.extent(0) != q) {
      throw ConfigError("blend: got " + std::to_string(wv.size()) + " coefficients for bank of " +
                        std::to_string(q));
    }
    std::vector<Var<T>> leaves;
    leaves.reserve(candidates.size());
    for (auto& c : candidates) leaves.push_back(tape.leaf(c));
    return ad::blend(leaves, w);
  }

  void collect(std::vector<Parameter<T>*>& out) {
    for (auto& c : candidates) out.push_back(&c);
  }
};

// Operation-style wrappers.

template <class T>
Var<T> pool_features(Var<T> h) {
  return ad::pool_nt(h);
}

template <class T>
Var<T> gating_forward(Tape<T>& tape, GatingNetwork<T>& g, Var<T> h) {
  return g.forward(tape, h);
}

template <class T>
Var<T> blend(Tape<T>& tape, AdjacencyBank<T>& bank, Var<T> w) {
  return bank.blend_with(tape, w);
}

}  // namespace gagcn
