#include "ssq/spin.hpp"

#include <cmath>

#include "ssq/kernels.hpp"
#include "ssq/state.hpp"

namespace ssq {

BasisCoeffs::BasisCoeffs(const Spin& spin) {
    const int d = spin.dimension();
    const double c = spin.casimir();
    m.resize(d);
    m2.resize(d);
    for (int i = 0; i < d; ++i) {
        m[i] = spin.m(i);
        m2[i] = m[i] * m[i];
    }
    lower.resize(d - 1);
    for (int i = 0; i + 1 < d; ++i) {
        const double mi = m[i];
        lower[i] = std::sqrt(c - mi * (mi - 1.0));
    }
    jx2_diag.resize(d);
    for (int i = 0; i < d; ++i) {
        const double bl = (i > 0) ? lower[i - 1] : 0.0;
        const double br = (i + 1 < d) ? lower[i] : 0.0;
        jx2_diag[i] = 0.25 * (bl * bl + br * br);
    }
    if (d >= 3) {
        jx2_off2.resize(d - 2);
        for (int i = 0; i + 2 < d; ++i) jx2_off2[i] = 0.25 * lower[i] * lower[i + 1];
    }
}

namespace {
constexpr double kNormTol = 1e-12;
}

StateVector::StateVector(Spin spin, std::vector<cxd> amplitudes)
    : spin_(spin), amps_(std::move(amplitudes)) {
    if (static_cast<int>(amps_.size()) != spin_.dimension())
        throw input_error("StateVector: amplitude count does not match dimension");
    const double n2 = kernels::csumsq(amps_.data(), amps_.size());
    if (std::abs(n2 - 1.0) > kNormTol)
        throw normalization_error("StateVector: amplitudes are not normalized");
}

StateVector StateVector::normalized(Spin spin, std::vector<cxd> amplitudes) {
    const double n2 = kernels::csumsq(amplitudes.data(), amplitudes.size());
    if (!(n2 > 0.0))
        throw normalization_error("StateVector: cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amplitudes) a *= inv;
    return StateVector(spin, std::move(amplitudes));
}

StateVector StateVector::normalized_real(Spin spin, const std::vector<double>& amplitudes) {
    std::vector<cxd> amps(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) amps[i] = cxd(amplitudes[i], 0.0);
    return normalized(spin, std::move(amps));
}

StateVector StateVector::coherent_up(Spin spin) {
    std::vector<cxd> amps(spin.dimension(), cxd(0.0, 0.0));
    amps[0] = cxd(1.0, 0.0);
    return StateVector(spin, std::move(amps));
}

double StateVector::norm2() const { return kernels::csumsq(amps_.data(), amps_.size()); }

} // namespace ssq
