// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace avf {

namespace {
std::atomic<bool> g_checked{true};
} // namespace

void set_checked(bool on) { g_checked.store(on, std::memory_order_relaxed); }
bool checked() { return g_checked.load(std::memory_order_relaxed); }

int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int e : shape) {
        if (e < 0) throw ShapeError("negative extent in shape " + shape_str(shape));
        n *= e;
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::string Tensor::shape_str() const { return avf::shape_str(shape_); }

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    int64_t n = shape_numel(shape);
    t.shape_ = std::move(shape);
    t.data_.assign(static_cast<size_t>(n), 0.0);
    return t;
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    if (checked() && !std::isfinite(value))
        throw NumericError("Tensor::full: non-finite fill value");
    Tensor t;
    int64_t n = shape_numel(shape);
    t.shape_ = std::move(shape);
    t.data_.assign(static_cast<size_t>(n), value);
    return t;
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data) {
    int64_t n = shape_numel(shape);
    if (n != static_cast<int64_t>(data.size()))
        throw ShapeError("Tensor::from_data: shape " + avf::shape_str(shape) + " wants " +
                         std::to_string(n) + " values, got " + std::to_string(data.size()));
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    if (checked() && !t.all_finite())
        throw NumericError("Tensor::from_data: non-finite value in data");
    return t;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
}

// ---- elementwise ---------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    double* o = out.data();
    const double* q = b.data();
    for (int64_t i = 0, n = out.numel(); i < n; ++i) o[i] += q[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    double* o = out.data();
    const double* q = b.data();
    for (int64_t i = 0, n = out.numel(); i < n; ++i) o[i] -= q[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out = a;
    double* o = out.data();
    const double* q = b.data();
    for (int64_t i = 0, n = out.numel(); i < n; ++i) o[i] *= q[i];
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out = a;
    double* o = out.data();
    for (int64_t i = 0, n = out.numel(); i < n; ++i) o[i] *= c;
    return out;
}

void axpy_inplace(double alpha, const Tensor& x, Tensor& y) {
    require_same_shape(x, y, "axpy");
    double* o = y.data();
    const double* p = x.data();
    for (int64_t i = 0, n = y.numel(); i < n; ++i) o[i] += alpha * p[i];
}

double sum(const Tensor& a) {
    double s = 0.0;
    const double* p = a.data();
    for (int64_t i = 0, n = a.numel(); i < n; ++i) s += p[i];
    return s;
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    const double* p = a.data();
    const double* q = b.data();
    for (int64_t i = 0, n = a.numel(); i < n; ++i) s += p[i] * q[i];
    return s;
}

double mse(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mse");
    double s = 0.0;
    const double* p = a.data();
    const double* q = b.data();
    int64_t n = a.numel();
    for (int64_t i = 0; i < n; ++i) {
        double d = p[i] - q[i];
        s += d * d;
    }
    return s / static_cast<double>(n);
}

double max_abs(const Tensor& a) {
    double m = 0.0;
    const double* p = a.data();
    for (int64_t i = 0, n = a.numel(); i < n; ++i) m = std::max(m, std::abs(p[i]));
    return m;
}

// ---- activations ---------------------------------------------------------

double silu_scalar(double x) { return x / (1.0 + std::exp(-x)); }

Tensor silu(const Tensor& x) {
    Tensor out = x;
    double* o = out.data();
    for (int64_t i = 0, n = out.numel(); i < n; ++i) o[i] = silu_scalar(o[i]);
    return out;
}

Tensor silu_derivative(const Tensor& x) {
    Tensor out = x;
    double* o = out.data();
    for (int64_t i = 0, n = out.numel(); i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-o[i]));
        o[i] = s * (1.0 + o[i] * (1.0 - s));
    }
    return out;
}

// ---- convolution ---------------------------------------------------------

namespace {

void check_conv_args(const Tensor& input, const Tensor& kernel, const Tensor& bias, int padding) {
    const auto& is = input.shape();
    const auto& ks = kernel.shape();
    if (is.size() != 3)
        throw ShapeError("conv2d: input must be [C,H,W], got " + input.shape_str());
    if (ks.size() != 4)
        throw ShapeError("conv2d: kernel must be [C_out,C_in,k,k], got " + kernel.shape_str());
    if (ks[2] != ks[3] || ks[2] % 2 == 0)
        throw ShapeError("conv2d: kernel spatial dims must be odd and square, got " +
                         kernel.shape_str());
    if (ks[1] != is[0])
        throw ShapeError("conv2d: C_in mismatch, input " + input.shape_str() + " vs kernel " +
                         kernel.shape_str());
    if (padding != (ks[2] - 1) / 2)
        throw ShapeError("conv2d: padding " + std::to_string(padding) +
                         " is not shape-preserving for k=" + std::to_string(ks[2]));
    if (bias.shape() != std::vector<int>{ks[0]})
        throw ShapeError("conv2d: bias must be [C_out]=" + std::to_string(ks[0]) + ", got " +
                         bias.shape_str());
}

} // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int padding) {
    if (checked()) check_conv_args(input, kernel, bias, padding);
    const auto& is = input.shape();
    const auto& ks = kernel.shape();
    const int c_in = is[0], h = is[1], w = is[2];
    const int c_out = ks[0], k = ks[2], pad = padding;

    Tensor out = Tensor::zeros({c_out, h, w});
    const double* in = input.data();
    const double* wt = kernel.data();
    double* op = out.data();

    for (int co = 0; co < c_out; ++co) {
        double* oplane = op + static_cast<int64_t>(co) * h * w;
        const double b = bias[co];
        for (int64_t i = 0, n = static_cast<int64_t>(h) * w; i < n; ++i) oplane[i] = b;
        for (int ci = 0; ci < c_in; ++ci) {
            const double* iplane = in + static_cast<int64_t>(ci) * h * w;
            const double* wbase = wt + (static_cast<int64_t>(co) * c_in + ci) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const int ylo = std::max(0, pad - ky);
                const int yhi = std::min(h, h + pad - ky);
                for (int kx = 0; kx < k; ++kx) {
                    const int xlo = std::max(0, pad - kx);
                    const int xhi = std::min(w, w + pad - kx);
                    const double wv = wbase[ky * k + kx];
                    for (int y = ylo; y < yhi; ++y) {
                        double* orow = oplane + static_cast<int64_t>(y) * w;
                        const double* irow =
                            iplane + static_cast<int64_t>(y + ky - pad) * w + (kx - pad);
                        for (int x = xlo; x < xhi; ++x) orow[x] += wv * irow[x];
                    }
                }
            }
        }
    }
    return out;
}

Tensor conv2d_grad_input(const Tensor& grad_out, const Tensor& kernel, int padding) {
    const auto& gs = grad_out.shape();
    const auto& ks = kernel.shape();
    if (checked()) {
        if (gs.size() != 3 || gs[0] != ks[0])
            throw ShapeError("conv2d_grad_input: grad_out " + grad_out.shape_str() +
                             " incompatible with kernel " + kernel.shape_str());
    }
    const int c_out = ks[0], c_in = ks[1], k = ks[2], pad = padding;
    const int h = gs[1], w = gs[2];

    Tensor gin = Tensor::zeros({c_in, h, w});
    const double* gp = grad_out.data();
    const double* wt = kernel.data();
    double* ip = gin.data();

    // d out[co][y][x] / d in[ci][y+ky-pad][x+kx-pad] = w[co][ci][ky][kx].
    // Accumulate by iterating over output positions and scattering, expressed
    // as shifted row updates so the inner loop stays contiguous.
    for (int co = 0; co < c_out; ++co) {
        const double* gplane = gp + static_cast<int64_t>(co) * h * w;
        for (int ci = 0; ci < c_in; ++ci) {
            double* iplane = ip + static_cast<int64_t>(ci) * h * w;
            const double* wbase = wt + (static_cast<int64_t>(co) * c_in + ci) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const int ylo = std::max(0, pad - ky);
                const int yhi = std::min(h, h + pad - ky);
                for (int kx = 0; kx < k; ++kx) {
                    const int xlo = std::max(0, pad - kx);
                    const int xhi = std::min(w, w + pad - kx);
                    const double wv = wbase[ky * k + kx];
                    for (int y = ylo; y < yhi; ++y) {
                        const double* grow = gplane + static_cast<int64_t>(y) * w;
                        double* irow =
                            iplane + static_cast<int64_t>(y + ky - pad) * w + (kx - pad);
                        for (int x = xlo; x < xhi; ++x) irow[x] += wv * grow[x];
                    }
                }
            }
        }
    }
    return gin;
}

void conv2d_grad_params(const Tensor& input, const Tensor& grad_out, int k, int padding,
                        Tensor& grad_kernel, Tensor& grad_bias) {
    const auto& is = input.shape();
    const auto& gs = grad_out.shape();
    const int c_in = is[0], h = is[1], w = is[2];
    const int c_out = gs[0], pad = padding;

    grad_kernel = Tensor::zeros({c_out, c_in, k, k});
    grad_bias = Tensor::zeros({c_out});
    const double* in = input.data();
    const double* gp = grad_out.data();
    double* gw = grad_kernel.data();
    double* gb = grad_bias.data();

    for (int co = 0; co < c_out; ++co) {
        const double* gplane = gp + static_cast<int64_t>(co) * h * w;
        double bsum = 0.0;
        for (int64_t i = 0, n = static_cast<int64_t>(h) * w; i < n; ++i) bsum += gplane[i];
        gb[co] = bsum;
        for (int ci = 0; ci < c_in; ++ci) {
            const double* iplane = in + static_cast<int64_t>(ci) * h * w;
            double* wbase = gw + (static_cast<int64_t>(co) * c_in + ci) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                const int ylo = std::max(0, pad - ky);
                const int yhi = std::min(h, h + pad - ky);
                for (int kx = 0; kx < k; ++kx) {
                    const int xlo = std::max(0, pad - kx);
                    const int xhi = std::min(w, w + pad - kx);
                    double s = 0.0;
                    for (int y = ylo; y < yhi; ++y) {
                        const double* grow = gplane + static_cast<int64_t>(y) * w;
                        const double* irow =
                            iplane + static_cast<int64_t>(y + ky - pad) * w + (kx - pad);
                        for (int x = xlo; x < xhi; ++x) s += grow[x] * irow[x];
                    }
                    wbase[ky * k + kx] = s;
                }
            }
        }
    }
}

// ---- dense layer ---------------------------------------------------------

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    const auto& ws = w.shape();
    if (ws.size() != 2)
        throw ShapeError("linear: weight must be [out,in], got " + w.shape_str());
    const int out_n = ws[0], in_n = ws[1];
    if (x.numel() != in_n)
        throw ShapeError("linear: input numel " + std::to_string(x.numel()) +
                         " != in dim " + std::to_string(in_n));
    if (b.shape() != std::vector<int>{out_n})
        throw ShapeError("linear: bias must be [out]=" + std::to_string(out_n) + ", got " +
                         b.shape_str());
    Tensor y = Tensor::zeros({out_n});
    const double* xp = x.data();
    const double* wp = w.data();
    for (int o = 0; o < out_n; ++o) {
        double s = b[o];
        const double* row = wp + static_cast<int64_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) s += row[i] * xp[i];
        y[o] = s;
    }
    return y;
}

Tensor linear_grad_input(const Tensor& grad_out, const Tensor& w, const std::vector<int>& x_shape) {
    const auto& ws = w.shape();
    const int out_n = ws[0], in_n = ws[1];
    Tensor gx = Tensor::zeros(x_shape);
    const double* gp = grad_out.data();
    const double* wp = w.data();
    double* xp = gx.data();
    for (int o = 0; o < out_n; ++o) {
        const double* row = wp + static_cast<int64_t>(o) * in_n;
        const double g = gp[o];
        for (int i = 0; i < in_n; ++i) xp[i] += g * row[i];
    }
    return gx;
}

void linear_grad_params(const Tensor& x, const Tensor& grad_out, Tensor& grad_w, Tensor& grad_b) {
    const int out_n = static_cast<int>(grad_out.numel());
    const int in_n = static_cast<int>(x.numel());
    grad_w = Tensor::zeros({out_n, in_n});
    grad_b = grad_out;
    double* gw = grad_w.data();
    const double* xp = x.data();
    const double* gp = grad_out.data();
    for (int o = 0; o < out_n; ++o) {
        double* row = gw + static_cast<int64_t>(o) * in_n;
        const double g = gp[o];
        for (int i = 0; i < in_n; ++i) row[i] = g * xp[i];
    }
}

} // namespace avf
