// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gagcn/tensor.hpp"

namespace gagcn {

/// Trainable tensor with an additively accumulated gradient. Gradients are
/// reset by the caller between optimizer steps.
template <class T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter(std::string n, Tensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void reset_grad() { grad.fill(T(0)); }
};

template <class T>
class Tape;

/// Handle to a node on a recording tape.
template <class T>
struct Var {
  Tape<T>* tape = nullptr;
  int id = -1;

  const Tensor<T>& value() const { return tape->value(id); }
};

/// Recording context for one forward computation. Nodes are appended in
/// execution order; backward() walks them in reverse and accumulates
/// d(loss)/d(value) into every participating Parameter's grad.
///
/// One tape per thread; Tensors handed to it are copied, so shared model
/// parameters may be read concurrently by tapes on different threads.
template <class T>
class Tape {
public:
  using BackFn = std::function<void(Tape&, int)>;

  Var<T> leaf(Parameter<T>& p) {
    nodes_.push_back(Node{p.value, nullptr, &p});
    return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
  }

  Var<T> constant(Tensor<T> v) {
    nodes_.push_back(Node{std::move(v), nullptr, nullptr});
    return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
  }

  Var<T> record(Tensor<T> value, BackFn back) {
    nodes_.push_back(Node{std::move(value), std::move(back), nullptr});
    return Var<T>{this, static_cast<int>(nodes_.size()) - 1};
  }

  const Tensor<T>& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }

  /// Gradient buffer of a node; only valid while backward() runs.
  Tensor<T>& grad(int id) { return grads_[static_cast<std::size_t>(id)]; }

  void backward(Var<T> loss) { backward(loss.id); }

  void backward(int loss_id) {
    if (value(loss_id).size() != 1) {
      throw ContractError("backward: loss must be scalar, got shape " +
                          value(loss_id).shape_str());
    }
    grads_.clear();
    grads_.reserve(nodes_.size());
    for (const Node& n : nodes_) grads_.emplace_back(n.value.shape());
    grads_[static_cast<std::size_t>(loss_id)][0] = T(1);
    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (n.back) n.back(*this, id);
      if (n.param) {
        Tensor<T>& g = grads_[static_cast<std::size_t>(id)];
        for (std::size_t i = 0; i < g.size(); ++i) n.param->grad[i] += g[i];
      }
    }
    grads_.clear();
  }

  std::size_t node_count() const { return nodes_.size(); }

  void clear() {
    nodes_.clear();
    grads_.clear();
  }

private:
  struct Node {
    Tensor<T> value;
    BackFn back;
    Parameter<T>* param;
  };

  std::vector<Node> nodes_;
  std::vector<Tensor<T>> grads_;
};

}  // namespace gagcn
