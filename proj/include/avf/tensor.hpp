// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avf/error.hpp"

namespace avf {

/// Global checked mode: shape and finiteness assertions on tensor
/// construction and on every backbone op. On by default; latency
/// benchmarks switch it off.
void set_checked(bool on);
bool checked();

/// Dense n-dimensional real tensor, 64-bit, row-major.
/// Immutable by convention once handed across module boundaries;
/// in-place mutation is reserved for owners (optimizer state, builders).
class Tensor {
  public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, double value);
    static Tensor from_data(std::vector<int> shape, std::vector<double> data);

    const std::vector<int>& shape() const { return shape_; }
    int64_t numel() const { return static_cast<int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// Printable "[2,16,64]" form for diagnostics.
    std::string shape_str() const;

    bool all_finite() const;

  private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

int64_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

/// Throws ShapeError naming `what` unless the two shapes agree.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

// ---- elementwise / reductions -------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

/// y += alpha * x, in place.
void axpy_inplace(double alpha, const Tensor& x, Tensor& y);

double sum(const Tensor& a);
double dot(const Tensor& a, const Tensor& b);

/// Mean squared error over all elements.
double mse(const Tensor& a, const Tensor& b);

double max_abs(const Tensor& a);

// ---- activations ---------------------------------------------------------

/// x * sigmoid(x), elementwise.
Tensor silu(const Tensor& x);
double silu_scalar(double x);

/// d silu(x)/dx, elementwise, evaluated at x.
Tensor silu_derivative(const Tensor& x);

// ---- convolution ---------------------------------------------------------

/// Shape-preserving 2-D cross-correlation.
/// input [C_in,H,W], kernel [C_out,C_in,k,k], bias [C_out], k odd,
/// padding = (k-1)/2. Output [C_out,H,W].
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int padding);

/// Gradient of conv2d w.r.t. its input: full correlation of grad_out with
/// the flipped kernel. grad_out [C_out,H,W] -> [C_in,H,W].
Tensor conv2d_grad_input(const Tensor& grad_out, const Tensor& kernel, int padding);

/// Gradients of conv2d w.r.t. kernel and bias.
void conv2d_grad_params(const Tensor& input, const Tensor& grad_out, int k, int padding,
                        Tensor& grad_kernel, Tensor& grad_bias);

// ---- dense layer (used by test nets and small heads) ---------------------

/// y = W x + b with x flattened; W [out,in], b [out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor linear_grad_input(const Tensor& grad_out, const Tensor& w, const std::vector<int>& x_shape);
void linear_grad_params(const Tensor& x, const Tensor& grad_out, Tensor& grad_w, Tensor& grad_b);

} // namespace avf
