#pragma once

#include <complex>
#include <cstddef>

namespace ssq::kernels {

using cxd = std::complex<double>;

/// Instruction set selected for the arithmetic kernels.
enum class Isa { scalar, avx2 };

/// Kernel function table. One scalar reference implementation, one AVX2
/// variant; the active table is chosen at runtime from CPU capabilities.
/// The environment variable SSQ_KERNELS (values "scalar", "avx2", "auto")
/// overrides the selection, which the equivalence tests use to drive both
/// paths on the same data.
struct Ops {
    // real vectors
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sumsq)(const double* x, std::size_t n);
    // sum_i w_i x_i^2
    double (*weighted_sumsq)(const double* w, const double* x, std::size_t n);
    // sum_i b_i x_i x_{i+1}   (b has n-1 entries)
    double (*band1_sum)(const double* b, const double* x, std::size_t n);
    // sum_i b_i x_i x_{i+2}   (b has n-2 entries)
    double (*band2_sum)(const double* b, const double* x, std::size_t n);
    // y = T x for symmetric tridiagonal T = (diag d, off e)
    void (*tridiag_apply)(const double* d, const double* e, const double* x,
                          double* y, std::size_t n);

    // complex vectors
    double (*csumsq)(const cxd* x, std::size_t n);
    double (*cweighted_sumsq)(const double* w, const cxd* x, std::size_t n);
    // sum_i b_i Re(conj(x_i) x_{i+1}) and Im(...)
    double (*cband1_re)(const double* b, const cxd* x, std::size_t n);
    double (*cband1_im)(const double* b, const cxd* x, std::size_t n);
    // sum_i b_i Re(conj(x_i) x_{i+2}) and Im(...)
    double (*cband2_re)(const double* b, const cxd* x, std::size_t n);
    double (*cband2_im)(const double* b, const cxd* x, std::size_t n);
};

/// Active kernel table (dispatch decided on first use).
const Ops& active();

/// Name of the active instruction set ("scalar" or "avx2").
const char* active_name();

/// Table for a specific ISA; throws input_error if unavailable on this CPU.
const Ops& table(Isa isa);

bool avx2_available();

// Convenience wrappers through the active table.
inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double sumsq(const double* x, std::size_t n) { return active().sumsq(x, n); }
inline double weighted_sumsq(const double* w, const double* x, std::size_t n) { return active().weighted_sumsq(w, x, n); }
inline double band1_sum(const double* b, const double* x, std::size_t n) { return active().band1_sum(b, x, n); }
inline double band2_sum(const double* b, const double* x, std::size_t n) { return active().band2_sum(b, x, n); }
inline void tridiag_apply(const double* d, const double* e, const double* x, double* y, std::size_t n) { active().tridiag_apply(d, e, x, y, n); }
inline double csumsq(const cxd* x, std::size_t n) { return active().csumsq(x, n); }
inline double cweighted_sumsq(const double* w, const cxd* x, std::size_t n) { return active().cweighted_sumsq(w, x, n); }
inline double cband1_re(const double* b, const cxd* x, std::size_t n) { return active().cband1_re(b, x, n); }
inline double cband1_im(const double* b, const cxd* x, std::size_t n) { return active().cband1_im(b, x, n); }
inline double cband2_re(const double* b, const cxd* x, std::size_t n) { return active().cband2_re(b, x, n); }
inline double cband2_im(const double* b, const cxd* x, std::size_t n) { return active().cband2_im(b, x, n); }

namespace detail {
Ops scalar_table();
#if defined(SSQ_HAVE_AVX2_TU)
Ops avx2_table();
#endif
} // namespace detail

} // namespace ssq::kernels
