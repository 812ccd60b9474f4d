// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "avf/error.hpp"
#include "avf/tensor.hpp"

namespace avf {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Channels, observations, and pilot matrices
/// all live in this type; the real-plane packing for the network is explicit
/// via pack_planes / unpack_planes.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0)
            throw ShapeError("ComplexMatrix: negative dims " + std::to_string(rows) + "x" +
                             std::to_string(cols));
        data_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), cplx{0.0, 0.0});
    }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int64_t size() const { return static_cast<int64_t>(data_.size()); }

    cplx& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const {
        return data_[static_cast<size_t>(r) * cols_ + c];
    }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    bool same_shape(const ComplexMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what);

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, cplx c);
/// y += alpha·x
void axpy_inplace(cplx alpha, const ComplexMatrix& x, ComplexMatrix& y);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
/// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

/// Squared Frobenius norm Σ|h|².
double fro_norm2(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);

/// Pack into a [2, rows, cols] tensor: plane 0 = real, plane 1 = imag.
Tensor pack_planes(const ComplexMatrix& m);
/// Inverse of pack_planes; expects shape [2, rows, cols].
ComplexMatrix unpack_planes(const Tensor& t);

} // namespace avf
