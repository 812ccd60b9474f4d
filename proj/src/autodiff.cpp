// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/autodiff.hpp"

#include <cmath>

namespace avf {

namespace dual {

DualTensor add(const DualTensor& a, const DualTensor& b) {
    return {avf::add(a.primal, b.primal), avf::add(a.tangent, b.tangent)};
}

DualTensor sub(const DualTensor& a, const DualTensor& b) {
    return {avf::sub(a.primal, b.primal), avf::sub(a.tangent, b.tangent)};
}

DualTensor mul(const DualTensor& a, const DualTensor& b) {
    // d(a⊙b) = da⊙b + a⊙db
    Tensor tan = avf::mul(a.tangent, b.primal);
    axpy_inplace(1.0, avf::mul(a.primal, b.tangent), tan);
    return {avf::mul(a.primal, b.primal), std::move(tan)};
}

DualTensor scale(const DualTensor& a, double c) {
    return {avf::scale(a.primal, c), avf::scale(a.tangent, c)};
}

DualTensor silu(const DualTensor& x) {
    return {avf::silu(x.primal), avf::mul(silu_derivative(x.primal), x.tangent)};
}

DualTensor conv2d(const DualTensor& x, const DualTensor& w, const DualTensor& b, int padding) {
    // Bilinear in (x, w) plus bias:
    //   d conv(x, w, b) = conv(dx, w, 0) + conv(x, dw, db)
    Tensor value = avf::conv2d(x.primal, w.primal, b.primal, padding);
    Tensor zero_bias = Tensor::zeros(b.primal.shape());
    Tensor tan = avf::conv2d(x.tangent, w.primal, zero_bias, padding);
    if (max_abs(w.tangent) != 0.0 || max_abs(b.tangent) != 0.0)
        axpy_inplace(1.0, avf::conv2d(x.primal, w.tangent, b.tangent, padding), tan);
    return {std::move(value), std::move(tan)};
}

DualTensor linear(const DualTensor& x, const DualTensor& w, const DualTensor& b) {
    Tensor value = avf::linear(x.primal, w.primal, b.primal);
    Tensor zero_bias = Tensor::zeros(b.primal.shape());
    Tensor tan = avf::linear(x.tangent, w.primal, zero_bias);
    if (max_abs(w.tangent) != 0.0 || max_abs(b.tangent) != 0.0)
        axpy_inplace(1.0, avf::linear(x.primal, w.tangent, b.tangent), tan);
    return {std::move(value), std::move(tan)};
}

DualTensor conv2d_const(const DualTensor& x, const Tensor& w, const Tensor& b, int padding) {
    Tensor zero_bias = Tensor::zeros(b.shape());
    return {avf::conv2d(x.primal, w, b, padding),
            avf::conv2d(x.tangent, w, zero_bias, padding)};
}

DualTensor linear_const(const DualTensor& x, const Tensor& w, const Tensor& b) {
    Tensor zero_bias = Tensor::zeros(b.shape());
    return {avf::linear(x.primal, w, b), avf::linear(x.tangent, w, zero_bias)};
}

DualTensor sum(const DualTensor& a) {
    return {Tensor::full({}, avf::sum(a.primal)), Tensor::full({}, avf::sum(a.tangent))};
}

DualTensor mse(const DualTensor& a, const DualTensor& b) {
    require_same_shape(a.primal, b.primal, "mse");
    double value = avf::mse(a.primal, b.primal);
    // d MSE = (2/n)·Σ (a−b)⊙(da−db)
    Tensor diff = avf::sub(a.primal, b.primal);
    Tensor dtan = avf::sub(a.tangent, b.tangent);
    double tan = 2.0 * dot(diff, dtan) / static_cast<double>(diff.numel());
    return {Tensor::full({}, value), Tensor::full({}, tan)};
}

} // namespace dual

// ---- Tape ----------------------------------------------------------------

Tape::Var Tape::add(Var a, Var b) {
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.value = avf::add(node(a).value, node(b).value);
    return push(std::move(n));
}

Tape::Var Tape::sub(Var a, Var b) {
    Node n;
    n.op = Op::Sub;
    n.a = a;
    n.b = b;
    n.value = avf::sub(node(a).value, node(b).value);
    return push(std::move(n));
}

Tape::Var Tape::mul(Var a, Var b) {
    Node n;
    n.op = Op::Mul;
    n.a = a;
    n.b = b;
    n.value = avf::mul(node(a).value, node(b).value);
    return push(std::move(n));
}

Tape::Var Tape::scale(Var a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a;
    n.alpha = c;
    n.value = avf::scale(node(a).value, c);
    return push(std::move(n));
}

Tape::Var Tape::silu(Var x) {
    Node n;
    n.op = Op::Silu;
    n.a = x;
    n.value = avf::silu(node(x).value);
    return push(std::move(n));
}

Tape::Var Tape::conv2d(Var x, Var w, Var b, int padding) {
    Node n;
    n.op = Op::Conv2d;
    n.a = x;
    n.b = w;
    n.c = b;
    n.padding = padding;
    n.value = avf::conv2d(node(x).value, node(w).value, node(b).value, padding);
    return push(std::move(n));
}

Tape::Var Tape::linear(Var x, Var w, Var b) {
    Node n;
    n.op = Op::Linear;
    n.a = x;
    n.b = w;
    n.c = b;
    n.value = avf::linear(node(x).value, node(w).value, node(b).value);
    return push(std::move(n));
}

Tape::Var Tape::sum(Var a) {
    Node n;
    n.op = Op::Sum;
    n.a = a;
    n.value = Tensor::full({}, avf::sum(node(a).value));
    return push(std::move(n));
}

Tape::Var Tape::mse(Var a, Var b) {
    Node n;
    n.op = Op::Mse;
    n.a = a;
    n.b = b;
    n.value = Tensor::full({}, avf::mse(node(a).value, node(b).value));
    return push(std::move(n));
}

Tape::Var Tape::stop_gradient(Var x) {
    Node n;
    n.op = Op::StopGrad;
    n.a = x;
    n.value = node(x).value;
    return push(std::move(n));
}

Tensor& Tape::grad_slot(Var v) {
    Tensor& g = grads_[static_cast<size_t>(v)];
    if (g.empty()) g = Tensor::zeros(nodes_[static_cast<size_t>(v)].value.shape());
    return g;
}

void Tape::backward(Var loss) {
    const Node& ln = node(loss);
    if (ln.value.numel() != 1)
        throw ShapeError("backward: loss must be scalar, got shape " + ln.value.shape_str());

    grads_.assign(nodes_.size(), Tensor());
    grad_slot(loss)[0] = 1.0;

    for (Var i = loss; i >= 0; --i) {
        const Tensor& g = grads_[static_cast<size_t>(i)];
        if (g.empty()) continue;
        const Node& n = nodes_[static_cast<size_t>(i)];
        switch (n.op) {
            case Op::Leaf:
            case Op::StopGrad:
                break;
            case Op::Add:
                axpy_inplace(1.0, g, grad_slot(n.a));
                axpy_inplace(1.0, g, grad_slot(n.b));
                break;
            case Op::Sub:
                axpy_inplace(1.0, g, grad_slot(n.a));
                axpy_inplace(-1.0, g, grad_slot(n.b));
                break;
            case Op::Mul:
                axpy_inplace(1.0, avf::mul(g, node(n.b).value), grad_slot(n.a));
                axpy_inplace(1.0, avf::mul(g, node(n.a).value), grad_slot(n.b));
                break;
            case Op::Scale:
                axpy_inplace(n.alpha, g, grad_slot(n.a));
                break;
            case Op::Silu:
                axpy_inplace(1.0, avf::mul(g, silu_derivative(node(n.a).value)), grad_slot(n.a));
                break;
            case Op::Conv2d: {
                axpy_inplace(1.0, conv2d_grad_input(g, node(n.b).value, n.padding),
                             grad_slot(n.a));
                Tensor gw, gb;
                conv2d_grad_params(node(n.a).value, g, node(n.b).value.shape()[2], n.padding, gw,
                                   gb);
                axpy_inplace(1.0, gw, grad_slot(n.b));
                axpy_inplace(1.0, gb, grad_slot(n.c));
                break;
            }
            case Op::Linear: {
                axpy_inplace(1.0,
                             linear_grad_input(g, node(n.b).value, node(n.a).value.shape()),
                             grad_slot(n.a));
                Tensor gw, gb;
                linear_grad_params(node(n.a).value, g, gw, gb);
                axpy_inplace(1.0, gw, grad_slot(n.b));
                axpy_inplace(1.0, gb, grad_slot(n.c));
                break;
            }
            case Op::Sum: {
                Tensor& ga = grad_slot(n.a);
                const double g0 = g[0];
                for (int64_t j = 0; j < ga.numel(); ++j) ga[j] += g0;
                break;
            }
            case Op::Mse: {
                const Tensor& va = node(n.a).value;
                const Tensor& vb = node(n.b).value;
                const double c = 2.0 * g[0] / static_cast<double>(va.numel());
                Tensor diff = avf::sub(va, vb);
                axpy_inplace(c, diff, grad_slot(n.a));
                axpy_inplace(-c, diff, grad_slot(n.b));
                break;
            }
        }
    }

    // Materialize zeros for off-path vars so grad() has uniform semantics.
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (grads_[i].empty()) grads_[i] = Tensor::zeros(nodes_[i].value.shape());

    if (checked()) {
        for (size_t i = 0; i < grads_.size(); ++i)
            if (!grads_[i].all_finite())
                throw NumericError("backward: non-finite gradient at var " + std::to_string(i));
    }
    ran_backward_ = true;
}

const Tensor& Tape::grad(Var v) const {
    if (!ran_backward_) throw Error("Tape::grad: backward() has not run");
    node(v); // range check
    return grads_[static_cast<size_t>(v)];
}

} // namespace avf
