#include "ssq/moments.hpp"

#include <cmath>

#include "ssq/errors.hpp"
#include "ssq/kernels.hpp"

namespace ssq {

SpinMoments moments(const StateVector& state, const BasisCoeffs& basis) {
    const auto* psi = state.amplitudes().data();
    const std::size_t d = state.amplitudes().size();

    const double n2 = kernels::csumsq(psi, d);
    if (std::abs(n2 - 1.0) > 1e-9)
        throw normalization_error("moments: state is not normalized");

    namespace k = kernels;
    const double mean_jz = k::cweighted_sumsq(basis.m.data(), psi, d);
    const double mean_jz2 = k::cweighted_sumsq(basis.m2.data(), psi, d);
    const double mean_jx = k::cband1_re(basis.lower.data(), psi, d);
    const double mean_jy = k::cband1_im(basis.lower.data(), psi, d);

    const double diag = k::cweighted_sumsq(basis.jx2_diag.data(), psi, d);
    const double off2_re = (d >= 3) ? k::cband2_re(basis.jx2_off2.data(), psi, d) : 0.0;
    const double off2_im = (d >= 3) ? k::cband2_im(basis.jx2_off2.data(), psi, d) : 0.0;
    const double mean_jx2 = diag + 2.0 * off2_re;
    const double mean_jy2 = diag - 2.0 * off2_re;
    const double mean_sym_xy = 2.0 * off2_im; // <{Jx,Jy}/2>

    SpinMoments m;
    m.mean_jx = mean_jx;
    m.mean_jy = mean_jy;
    m.mean_jz = mean_jz;
    m.var_jx = std::max(0.0, mean_jx2 - mean_jx * mean_jx);
    m.var_jy = std::max(0.0, mean_jy2 - mean_jy * mean_jy);
    m.var_jz = std::max(0.0, mean_jz2 - mean_jz * mean_jz);
    m.cov_jxjy = mean_sym_xy - mean_jx * mean_jy;
    return m;
}

SpinMoments moments(const StateVector& state) {
    return moments(state, BasisCoeffs(state.spin()));
}

double squeezing_parameter(const SpinMoments& m, const Spin& spin) {
    if (m.mean_jz == 0.0)
        throw undefined_xi_error("squeezing_parameter: <Jz> = 0, xi undefined");
    return std::sqrt(2.0 * spin.j()) * std::sqrt(m.var_jx) / std::abs(m.mean_jz);
}

HeisenbergReport check_heisenberg(const SpinMoments& m) {
    constexpr double tol = 1e-9;
    auto term = [](const char* axes, double va, double vb, double mc) {
        const double p = va * vb - 0.25 * mc * mc;
        return HeisenbergTerm{axes, p, std::abs(p) <= tol, p < -tol};
    };
    HeisenbergReport r;
    r.terms = {term("xy", m.var_jx, m.var_jy, m.mean_jz),
               term("yz", m.var_jy, m.var_jz, m.mean_jx),
               term("zx", m.var_jz, m.var_jx, m.mean_jy)};
    for (const auto& t : r.terms) r.any_violation = r.any_violation || t.violated;
    return r;
}

} // namespace ssq
