// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#include "avf/complexmat.hpp"

#include <cmath>

namespace avf {

bool ComplexMatrix::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "add");
    ComplexMatrix out = a;
    cplx* o = out.data();
    const cplx* q = b.data();
    for (int64_t i = 0, n = out.size(); i < n; ++i) o[i] += q[i];
    return out;
}

ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "sub");
    ComplexMatrix out = a;
    cplx* o = out.data();
    const cplx* q = b.data();
    for (int64_t i = 0, n = out.size(); i < n; ++i) o[i] -= q[i];
    return out;
}

ComplexMatrix scale(const ComplexMatrix& a, cplx c) {
    ComplexMatrix out = a;
    cplx* o = out.data();
    for (int64_t i = 0, n = out.size(); i < n; ++i) o[i] *= c;
    return out;
}

void axpy_inplace(cplx alpha, const ComplexMatrix& x, ComplexMatrix& y) {
    require_same_shape(x, y, "axpy");
    cplx* o = y.data();
    const cplx* p = x.data();
    for (int64_t i = 0, n = y.size(); i < n; ++i) o[i] += alpha * p[i];
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    ComplexMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const cplx av = a(i, k);
            if (av == cplx{0.0, 0.0}) continue;
            const cplx* brow = b.data() + static_cast<size_t>(k) * b.cols();
            cplx* orow = out.data() + static_cast<size_t>(i) * out.cols();
            for (int j = 0; j < b.cols(); ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

double fro_norm2(const ComplexMatrix& a) {
    double s = 0.0;
    const cplx* p = a.data();
    for (int64_t i = 0, n = a.size(); i < n; ++i) s += std::norm(p[i]);
    return s;
}

double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    const cplx* p = a.data();
    for (int64_t i = 0, n = a.size(); i < n; ++i) m = std::max(m, std::abs(p[i]));
    return m;
}

Tensor pack_planes(const ComplexMatrix& m) {
    Tensor t = Tensor::zeros({2, m.rows(), m.cols()});
    double* re = t.data();
    double* im = t.data() + m.size();
    const cplx* p = m.data();
    for (int64_t i = 0, n = m.size(); i < n; ++i) {
        re[i] = p[i].real();
        im[i] = p[i].imag();
    }
    return t;
}

ComplexMatrix unpack_planes(const Tensor& t) {
    const auto& s = t.shape();
    if (s.size() != 3 || s[0] != 2)
        throw ShapeError("unpack_planes: expected [2,rows,cols], got " + t.shape_str());
    ComplexMatrix m(s[1], s[2]);
    const double* re = t.data();
    const double* im = t.data() + m.size();
    cplx* p = m.data();
    for (int64_t i = 0, n = m.size(); i < n; ++i) p[i] = {re[i], im[i]};
    return m;
}

} // namespace avf
