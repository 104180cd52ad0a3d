#pragma once

#include <array>

#include "ssq/spin.hpp"
#include "ssq/state.hpp"

namespace ssq {

/// First and second moments of Jx, Jy, Jz for a state (hbar = 1).
struct SpinMoments {
    double mean_jx = 0.0;
    double mean_jy = 0.0;
    double mean_jz = 0.0;
    double var_jx = 0.0;
    double var_jy = 0.0;
    double var_jz = 0.0;
    /// Symmetrized covariance <{Jx,Jy}/2> - <Jx><Jy>, used for the rotated
    /// transverse-variance minimization.
    double cov_jxjy = 0.0;
};

/// Moments via the band structure of Jx, Jy, Jz in the |J,m> basis — O(d),
/// no dense operators. Requires a normalized state (throws
/// normalization_error otherwise).
SpinMoments moments(const StateVector& state);

/// Same, against a caller-provided BasisCoeffs (avoids re-deriving the
/// coefficient arrays in sweep loops).
SpinMoments moments(const StateVector& state, const BasisCoeffs& basis);

/// xi = sqrt(2J) * dJx / |<Jz>|. Throws undefined_xi_error for mean_jz = 0.
double squeezing_parameter(const SpinMoments& m, const Spin& spin);

/// One cyclic uncertainty product var_a*var_b - mean_c^2/4 (>= 0 up to
/// numerical tolerance for any quantum state).
struct HeisenbergTerm {
    const char* axes;  // "xy", "yz" or "zx"
    double product;    // var_a*var_b - mean_c^2/4
    bool saturated;    // |product| <= 1e-9 (minimum-uncertainty pair)
    bool violated;     // product < -1e-9
};

struct HeisenbergReport {
    std::array<HeisenbergTerm, 3> terms;
    bool any_violation = false;
};

HeisenbergReport check_heisenberg(const SpinMoments& m);

} // namespace ssq
