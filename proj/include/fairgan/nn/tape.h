// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_TAPE_H_
#define FAIRGAN_NN_TAPE_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairgan/nn/tensor.h"

namespace fairgan::nn {

// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode automatic differentiation over a linear record of operations.
// Values live as long as the tape. Backward closures receive the gradient of
// their own output and accumulate into their inputs through GradBuffer().
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor<T>& grad_out)>;

  // A tape constructed with record = false never stores backward closures,
  // which is how inference-only passes avoid the bookkeeping.
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var Constant(Tensor<T> value) { return Push(std::move(value), false, {}); }
  Var Leaf(Tensor<T> value) { return Push(std::move(value), record_, {}); }

  // Records an op output. It requires a gradient iff any valid input does.
  Var Emit(Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return Emit(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
  }
  Var Emit(Tensor<T> value, std::span<const Var> inputs, BackwardFn fn) {
    bool needs = false;
    if (record_) {
      for (Var v : inputs) needs = needs || (v.valid() && requires_grad(v));
    }
    return Push(std::move(value), needs, needs ? std::move(fn) : BackwardFn{});
  }

  // The handle the next recorded value will receive; lets a closure refer to
  // its own output.
  Var NextVar() const { return Var{static_cast<int>(nodes_.size())}; }

  const Tensor<T>& value(Var v) const { return node(v).value; }
  const Shape& shape(Var v) const { return node(v).value.shape(); }
  bool requires_grad(Var v) const { return node(v).requires_grad; }

  // Gradient accumulated into `v` by the last Backward(), or nullptr.
  const Tensor<T>* grad(Var v) const {
    const Node& n = node(v);
    return n.has_grad ? &n.grad : nullptr;
  }

  // Zero-initialised on first access. Only valid for requires_grad nodes.
  Tensor<T>& GradBuffer(Var v) {
    Node& n = node(v);
    if (!n.has_grad) {
      n.grad = Tensor<T>(n.value.shape());
      n.has_grad = true;
    }
    return n.grad;
  }

  // Seeds d(root)/d(root) = 1 for a single-element root.
  void Backward(Var root) {
    if (node(root).value.size() != 1) {
      throw std::invalid_argument("Backward() needs a scalar root");
    }
    if (!requires_grad(root)) return;
    GradBuffer(root)[0] = T(1);
    for (int i = root.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.has_grad && n.backward) n.backward(*this, n.grad);
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
  };

  Var Push(Tensor<T> value, bool requires_grad, BackwardFn fn) {
    nodes_.push_back(Node{std::move(value), {}, requires_grad, false, std::move(fn)});
    return Var{static_cast<int>(nodes_.size()) - 1};
  }
  const Node& node(Var v) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
      throw std::out_of_range("invalid tape variable");
    }
    return nodes_[static_cast<std::size_t>(v.id)];
  }
  Node& node(Var v) {
    return const_cast<Node&>(static_cast<const Tape&>(*this).node(v));
  }

  bool record_;
  std::vector<Node> nodes_;
};

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_TAPE_H_
