// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gagcn/gagcn.hpp"

namespace gagcn {

enum class ResidualMode { offset_from_last_frame, absolute };

std::string to_string(ResidualMode m);
ResidualMode residual_from_string(const std::string& s);

/// Everything needed to rebuild a model with the same shapes. Stored as the
/// checkpoint metadata so eval/predict need only the checkpoint file.
struct ModelConfig {
  int joints = 12;
  int channels = 3;
  int input_frames = 10;   // T
  int output_frames = 25;  // t
  int n = 4;               // spatial candidates
  int m = 3;               // temporal candidates
  int encoder_layers = 6;
  int width = 64;
  int embed_width = 0;  // 0 = same as channels
  int decoder_blocks = 3;
  int kernel = 3;
  std::vector<int> dilations = {1, 2, 4};
  Activation act = Activation::tanh;
  ResidualMode residual = ResidualMode::offset_from_last_frame;
  bool stable = false;

  int w0() const { return embed_width > 0 ? embed_width : channels; }

  std::vector<int> encoder_widths() const {
    std::vector<int> w;
    w.push_back(w0());
    for (int l = 0; l < encoder_layers; ++l) w.push_back(width);
    return w;
  }

  int receptive_field() const {
    int rf = 1;
    for (int i = 0; i < decoder_blocks; ++i) {
      const int d = dilations[static_cast<std::size_t>(i) % dilations.size()];
      rf += (kernel - 1) * d;
    }
    return rf;
  }

  void validate() const;
};

/// Dilated causal convolution block stack along the frame axis, a learned
/// temporal expansion T -> t, and a channel projection back to raw channels.
template <class T>
struct TcnDecoder {
  struct Block {
    Parameter<T> kernel;  // [w_out x w_in x k]
    Parameter<T> bias;    // [w_out]
    int dilation;
  };

  int width, channels, in_frames, out_frames;
  Activation act;
  std::vector<Block> blocks;
  Parameter<T> expand_w;  // [T x t]
  Parameter<T> expand_b;  // [t]
  Parameter<T> proj_w;    // [width x C], zero-initialized
  Parameter<T> proj_b;    // [C], zero-initialized

  TcnDecoder(const std::string& prefix, const ModelConfig& cfg, Rng rng)
      : width(cfg.width),
        channels(cfg.channels),
        in_frames(cfg.input_frames),
        out_frames(cfg.output_frames),
        act(cfg.act),
        expand_w(prefix + ".expand.w",
                 uniform_fan_in<T>({cfg.input_frames, cfg.output_frames}, cfg.input_frames,
                                   rng.split(prefix + ".expand.w"))),
        expand_b(prefix + ".expand.b", Tensor<T>({cfg.output_frames})),
        proj_w(prefix + ".proj.w", Tensor<T>({cfg.width, cfg.channels})),
        proj_b(prefix + ".proj.b", Tensor<T>({cfg.channels})) {
    for (int i = 0; i < cfg.decoder_blocks; ++i) {
      const std::string name = prefix + ".block" + std::to_string(i);
      const int dilation = cfg.dilations[static_cast<std::size_t>(i) % cfg.dilations.size()];
      blocks.push_back(Block{
          Parameter<T>(name + ".k", uniform_fan_in<T>({cfg.width, cfg.width, cfg.kernel},
                                                      cfg.width * cfg.kernel,
                                                      rng.split(name + ".k"))),
          Parameter<T>(name + ".b", Tensor<T>({cfg.width})), dilation});
    }
  }

  /// Causal block stack only (pre-expansion); activations at frame f depend
  /// only on input frames <= f.
  Var<T> block_stack(Tape<T>& tape, Var<T> z) {
    for (auto& blk : blocks) {
      z = ad::act(ad::causal_conv1d(z, tape.leaf(blk.kernel), tape.leaf(blk.bias), blk.dilation),
                  act);
    }
    return z;
  }

  /// z [width x N x T] -> [C x N x t].
  Var<T> forward(Tape<T>& tape, Var<T> z) {
    Var<T> f = block_stack(tape, z);
    Var<T> expanded = ad::time_map(f, tape.leaf(expand_w), tape.leaf(expand_b));
    return ad::channel_bias(ad::channel_map(expanded, tape.leaf(proj_w)), tape.leaf(proj_b));
  }

  void collect(std::vector<Parameter<T>*>& out) {
    for (auto& blk : blocks) {
      out.push_back(&blk.kernel);
      out.push_back(&blk.bias);
    }
    out.push_back(&expand_w);
    out.push_back(&expand_b);
    out.push_back(&proj_w);
    out.push_back(&proj_b);
  }
};

/// Full model: input embedding, encoder stack, TCN decoder, and the global
/// residual. In offset mode the decoder output is an offset added to the last
/// observed frame; with the zero-initialized projection the initial model is
/// exactly the zero-velocity predictor.
template <class T>
struct GagcnModel {
  ModelConfig cfg;
  InputEmbedding<T> embed;
  Encoder<T> encoder;
  TcnDecoder<T> decoder;

  GagcnModel(const ModelConfig& cfg_, std::uint64_t seed)
      : cfg((cfg_.validate(), cfg_)),
        embed("embed", cfg_.channels, cfg_.w0(), Rng(seed).split("embed")),
        encoder(cfg_.stable
                    ? Encoder<T>::make_stable("enc", cfg_.encoder_widths(), cfg_.joints,
                                              cfg_.input_frames, cfg_.act, Rng(seed))
                    : Encoder<T>::make_gated("enc", cfg_.encoder_widths(), cfg_.joints,
                                             cfg_.input_frames, cfg_.n, cfg_.m, cfg_.act,
                                             Rng(seed))),
        decoder("dec", cfg_, Rng(seed)) {}

  /// window is [C x N x T]; returns prediction node [C x N x t].
  Var<T> forward(Tape<T>& tape, const Tensor<T>& window, GateActivations<T>* log = nullptr) {
    if (window.rank() != 3 || window.extent(0) != cfg.channels || window.extent(1) != cfg.joints ||
        window.extent(2) != cfg.input_frames) {
      throw ShapeError("model: window " + window.shape_str() + " does not match configured " +
                       format_shape({cfg.channels, cfg.joints, cfg.input_frames}));
    }
    Var<T> x = tape.constant(window);
    Var<T> h = embed.forward(tape, x);
    Var<T> z = encoder.forward(tape, h, log);
    Var<T> out = decoder.forward(tape, z);
    if (cfg.residual == ResidualMode::offset_from_last_frame) {
      Tensor<T> last({cfg.channels, cfg.joints});
      for (int c = 0; c < cfg.channels; ++c) {
        for (int n = 0; n < cfg.joints; ++n) {
          last.at(c, n) = window.at(c, n, cfg.input_frames - 1);
        }
      }
      out = ad::add_frame_base(out, last);
    }
    return out;
  }

  /// Inference: fresh tape, returns the predicted tensor [C x N x t].
  Tensor<T> predict(const Tensor<T>& window, GateActivations<T>* log = nullptr) {
    Tape<T> tape;
    Var<T> out = forward(tape, window, log);
    return tape.value(out.id);
  }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    embed.collect(out);
    encoder.collect(out);
    decoder.collect(out);
    return out;
  }

  void reset_gradients() {
    for (Parameter<T>* p : parameters()) p->reset_grad();
  }
};

/// Spec-named inference entry points.
template <class T>
Var<T> tcn_forward(Tape<T>& tape, TcnDecoder<T>& dec, Var<T> z) {
  return dec.forward(tape, z);
}

template <class T>
Tensor<T> predict(GagcnModel<T>& model, const Tensor<T>& window) {
  return model.predict(window);
}

}  // namespace gagcn
