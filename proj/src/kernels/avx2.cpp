#include "ssq/kernels.hpp"

#include <immintrin.h>

// AVX2 variants of the arithmetic kernels. Multiplies and adds are kept
// separate (no FMA contraction) so results track the scalar reference to
// reduction-order differences only.

namespace ssq::kernels {
namespace {

inline double hsum4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [w0, w1] -> [w0, w0, w1, w1]
inline __m256d dup_pairs(const double* w) {
    __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(w));
    return _mm256_permute4x64_pd(v, 0x50);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
    }
    double res = hsum4(acc);
    for (; i < n; ++i) res += x[i] * y[i];
    return res;
}

double sumsq_avx2(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vx));
    }
    double res = hsum4(acc);
    for (; i < n; ++i) res += x[i] * x[i];
    return res;
}

double weighted_sumsq_avx2(const double* w, const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vw = _mm256_loadu_pd(w + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_mul_pd(vx, vx)));
    }
    double res = hsum4(acc);
    for (; i < n; ++i) res += w[i] * x[i] * x[i];
    return res;
}

double band1_sum_avx2(const double* b, const double* x, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= m; i += 4) {
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d v0 = _mm256_loadu_pd(x + i);
        __m256d v1 = _mm256_loadu_pd(x + i + 1);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vb, _mm256_mul_pd(v0, v1)));
    }
    double res = hsum4(acc);
    for (; i < m; ++i) res += b[i] * x[i] * x[i + 1];
    return res;
}

double band2_sum_avx2(const double* b, const double* x, std::size_t n) {
    if (n < 3) return 0.0;
    const std::size_t m = n - 2;
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= m; i += 4) {
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d v0 = _mm256_loadu_pd(x + i);
        __m256d v2 = _mm256_loadu_pd(x + i + 2);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vb, _mm256_mul_pd(v0, v2)));
    }
    double res = hsum4(acc);
    for (; i < m; ++i) res += b[i] * x[i] * x[i + 2];
    return res;
}

void tridiag_apply_avx2(const double* d, const double* e, const double* x,
                        double* y, std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        y[0] = d[0] * x[0];
        return;
    }
    y[0] = d[0] * x[0] + e[0] * x[1];
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        __m256d em = _mm256_loadu_pd(e + i - 1);
        __m256d xm = _mm256_loadu_pd(x + i - 1);
        __m256d vd = _mm256_loadu_pd(d + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d ep = _mm256_loadu_pd(e + i);
        __m256d xp = _mm256_loadu_pd(x + i + 1);
        __m256d acc = _mm256_mul_pd(em, xm);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vd, vx));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(ep, xp));
        _mm256_storeu_pd(y + i, acc);
    }
    for (; i + 1 < n; ++i)
        y[i] = e[i - 1] * x[i - 1] + d[i] * x[i] + e[i] * x[i + 1];
    y[n - 1] = e[n - 2] * x[n - 2] + d[n - 1] * x[n - 1];
}

double csumsq_avx2(const cxd* x, std::size_t n) {
    // interleaved (re, im): identical to sumsq over 2n doubles
    return sumsq_avx2(reinterpret_cast<const double*>(x), 2 * n);
}

double cweighted_sumsq_avx2(const double* w, const cxd* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(xd + 2 * i);
        __m256d vw = dup_pairs(w + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_mul_pd(vx, vx)));
    }
    double res = hsum4(acc);
    for (; i < n; ++i)
        res += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    return res;
}

template <int Off>
double cband_re_avx2(const double* b, const cxd* x, std::size_t n) {
    if (n < static_cast<std::size_t>(Off + 1)) return 0.0;
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t m = n - Off;
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 2 <= m; i += 2) {
        __m256d a = _mm256_loadu_pd(xd + 2 * i);
        __m256d c = _mm256_loadu_pd(xd + 2 * (i + Off));
        __m256d vb = dup_pairs(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vb, _mm256_mul_pd(a, c)));
    }
    double res = hsum4(acc);
    for (; i < m; ++i)
        res += b[i] * (x[i].real() * x[i + Off].real() + x[i].imag() * x[i + Off].imag());
    return res;
}

template <int Off>
double cband_im_avx2(const double* b, const cxd* x, std::size_t n) {
    if (n < static_cast<std::size_t>(Off + 1)) return 0.0;
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t m = n - Off;
    const __m256d signs = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 2 <= m; i += 2) {
        __m256d a = _mm256_loadu_pd(xd + 2 * i);
        __m256d c = _mm256_loadu_pd(xd + 2 * (i + Off));
        // swap re/im of the shifted operand: (re, im) -> (im, re)
        __m256d cs = _mm256_permute_pd(c, 0x5);
        __m256d vb = dup_pairs(b + i);
        __m256d term = _mm256_mul_pd(_mm256_mul_pd(a, cs), signs);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vb, term));
    }
    double res = hsum4(acc);
    for (; i < m; ++i)
        res += b[i] * (x[i].real() * x[i + Off].imag() - x[i].imag() * x[i + Off].real());
    return res;
}

} // namespace

namespace detail {

Ops avx2_table() {
    Ops ops;
    ops.dot = dot_avx2;
    ops.sumsq = sumsq_avx2;
    ops.weighted_sumsq = weighted_sumsq_avx2;
    ops.band1_sum = band1_sum_avx2;
    ops.band2_sum = band2_sum_avx2;
    ops.tridiag_apply = tridiag_apply_avx2;
    ops.csumsq = csumsq_avx2;
    ops.cweighted_sumsq = cweighted_sumsq_avx2;
    ops.cband1_re = cband_re_avx2<1>;
    ops.cband1_im = cband_im_avx2<1>;
    ops.cband2_re = cband_re_avx2<2>;
    ops.cband2_im = cband_im_avx2<2>;
    return ops;
}

} // namespace detail
} // namespace ssq::kernels
