#include "ssq/kernels.hpp"

namespace ssq::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double weighted_sumsq_scalar(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * x[i];
    return acc;
}

double band1_sum_scalar(const double* b, const double* x, std::size_t n) {
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += b[i] * x[i] * x[i + 1];
    return acc;
}

double band2_sum_scalar(const double* b, const double* x, std::size_t n) {
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) acc += b[i] * x[i] * x[i + 2];
    return acc;
}

void tridiag_apply_scalar(const double* d, const double* e, const double* x,
                          double* y, std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        y[0] = d[0] * x[0];
        return;
    }
    y[0] = d[0] * x[0] + e[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i)
        y[i] = e[i - 1] * x[i - 1] + d[i] * x[i] + e[i] * x[i + 1];
    y[n - 1] = e[n - 2] * x[n - 2] + d[n - 1] * x[n - 1];
}

double csumsq_scalar(const cxd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

double cweighted_sumsq_scalar(const double* w, const cxd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    return acc;
}

// Re(conj(a) b) = ar*br + ai*bi ; Im(conj(a) b) = ar*bi - ai*br

double cband1_re_scalar(const double* b, const cxd* x, std::size_t n) {
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc += b[i] * (x[i].real() * x[i + 1].real() + x[i].imag() * x[i + 1].imag());
    return acc;
}

double cband1_im_scalar(const double* b, const cxd* x, std::size_t n) {
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc += b[i] * (x[i].real() * x[i + 1].imag() - x[i].imag() * x[i + 1].real());
    return acc;
}

double cband2_re_scalar(const double* b, const cxd* x, std::size_t n) {
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i)
        acc += b[i] * (x[i].real() * x[i + 2].real() + x[i].imag() * x[i + 2].imag());
    return acc;
}

double cband2_im_scalar(const double* b, const cxd* x, std::size_t n) {
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i)
        acc += b[i] * (x[i].real() * x[i + 2].imag() - x[i].imag() * x[i + 2].real());
    return acc;
}

} // namespace

namespace detail {

Ops scalar_table() {
    Ops ops;
    ops.dot = dot_scalar;
    ops.sumsq = sumsq_scalar;
    ops.weighted_sumsq = weighted_sumsq_scalar;
    ops.band1_sum = band1_sum_scalar;
    ops.band2_sum = band2_sum_scalar;
    ops.tridiag_apply = tridiag_apply_scalar;
    ops.csumsq = csumsq_scalar;
    ops.cweighted_sumsq = cweighted_sumsq_scalar;
    ops.cband1_re = cband1_re_scalar;
    ops.cband1_im = cband1_im_scalar;
    ops.cband2_re = cband2_re_scalar;
    ops.cband2_im = cband2_im_scalar;
    return ops;
}

} // namespace detail
} // namespace ssq::kernels
