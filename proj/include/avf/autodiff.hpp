// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "avf/error.hpp"
#include "avf/tensor.hpp"

namespace avf {

/// (value, directional derivative) pair carried through forward-mode ops.
struct DualTensor {
    Tensor primal;
    Tensor tangent;

    static DualTensor constant(Tensor value) {
        Tensor zero = Tensor::zeros(value.shape());
        return {std::move(value), std::move(zero)};
    }
    static DualTensor seeded(Tensor value, Tensor tan) {
        require_same_shape(value, tan, "DualTensor");
        return {std::move(value), std::move(tan)};
    }
};

// Per-op dual (forward-mode) rules. Each mirrors the primal op and pushes the
// tangent through its linearization.
namespace dual {

DualTensor add(const DualTensor& a, const DualTensor& b);
DualTensor sub(const DualTensor& a, const DualTensor& b);
DualTensor mul(const DualTensor& a, const DualTensor& b);
DualTensor scale(const DualTensor& a, double c);
DualTensor silu(const DualTensor& x);
DualTensor conv2d(const DualTensor& x, const DualTensor& w, const DualTensor& b, int padding);
DualTensor linear(const DualTensor& x, const DualTensor& w, const DualTensor& b);
/// Variants with constant (zero-tangent) parameters, the common case when
/// differentiating w.r.t. the input only.
DualTensor conv2d_const(const DualTensor& x, const Tensor& w, const Tensor& b, int padding);
DualTensor linear_const(const DualTensor& x, const Tensor& w, const Tensor& b);
DualTensor sum(const DualTensor& a);
DualTensor mse(const DualTensor& a, const DualTensor& b);

} // namespace dual

/// Jacobian-vector product of `fn` at `inputs` in direction `tangents`.
/// `fn` maps a vector of DualTensor to a DualTensor and must be composed of
/// ops from avf::dual (parameters it closes over are constants with zero
/// tangent). Returns (output, J·tangents).
template <typename F>
std::pair<Tensor, Tensor> jvp(F&& fn, const std::vector<Tensor>& inputs,
                              const std::vector<Tensor>& tangents) {
    if (inputs.size() != tangents.size())
        throw ShapeError("jvp: " + std::to_string(inputs.size()) + " inputs vs " +
                         std::to_string(tangents.size()) + " tangents");
    std::vector<DualTensor> duals;
    duals.reserve(inputs.size());
    for (size_t i = 0; i < inputs.size(); ++i)
        duals.push_back(DualTensor::seeded(inputs[i], tangents[i]));
    DualTensor out = fn(duals);
    return {std::move(out.primal), std::move(out.tangent)};
}

/// Reverse-mode tape. Record a forward pass through the op methods, then call
/// backward(loss) once; grad(v) afterwards holds ∂loss/∂v for every recorded
/// var (zeros for vars not on the path to the loss).
class Tape {
  public:
    using Var = int;

    /// Leaf holding a value whose gradient is not of interest (still computed).
    Var input(Tensor value) { return leaf(std::move(value)); }
    /// Leaf holding a trainable parameter.
    Var param(Tensor value) { return leaf(std::move(value)); }

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double c);
    Var silu(Var x);
    Var conv2d(Var x, Var w, Var b, int padding);
    Var linear(Var x, Var w, Var b);
    Var sum(Var a);
    Var mse(Var a, Var b);
    /// Value-identical copy treated as a constant by reverse accumulation.
    Var stop_gradient(Var x);

    const Tensor& value(Var v) const { return node(v).value; }

    /// Reverse accumulation from a scalar loss. Throws ShapeError if the loss
    /// is not scalar; in checked mode throws NumericError on non-finite
    /// gradients.
    void backward(Var loss);

    /// Gradient of the last backward() loss w.r.t. var v (zeros if v is not
    /// on the path). Throws if backward() has not run.
    const Tensor& grad(Var v) const;

    size_t size() const { return nodes_.size(); }

  private:
    enum class Op { Leaf, Add, Sub, Mul, Scale, Silu, Conv2d, Linear, Sum, Mse, StopGrad };

    struct Node {
        Op op = Op::Leaf;
        Var a = -1, b = -1, c = -1;
        double alpha = 0.0;
        int padding = 0;
        Tensor value;
    };

    Var leaf(Tensor value) {
        Node n;
        n.value = std::move(value);
        nodes_.push_back(std::move(n));
        return static_cast<Var>(nodes_.size()) - 1;
    }
    Var push(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<Var>(nodes_.size()) - 1;
    }
    const Node& node(Var v) const {
        if (v < 0 || v >= static_cast<Var>(nodes_.size()))
            throw Error("Tape: var " + std::to_string(v) + " out of range");
        return nodes_[static_cast<size_t>(v)];
    }
    Tensor& grad_slot(Var v);

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    bool ran_backward_ = false;
};

} // namespace avf
