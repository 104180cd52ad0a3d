#pragma once

#include <vector>

#include "ssq/moments.hpp"
#include "ssq/spin.hpp"
#include "ssq/state.hpp"

namespace ssq {

enum class HamiltonianKind { one_axis, two_axis, adiabatic_ramp };

/// one_axis:       H = omega*Jz + chi*Jx²
/// two_axis:       H = omega*Jz + chi*(Jx² - Jy²)
/// adiabatic_ramp: H(t) = omega*Jz + chi(t)*Jx², chi(t) = chi*t/T (linear),
///                 omega < 0 required.
struct HamiltonianSpec {
    HamiltonianKind kind = HamiltonianKind::one_axis;
    double omega = 0.0;
    double chi = 1.0;
    double ramp_duration = 0.0; // T, adiabatic_ramp only

    double chi_at(double t) const;
    void validate() const;
};

struct TrajectorySample {
    double t;
    SpinMoments moments;
    double min_transverse_variance;
    double optimal_angle;
};

struct Trajectory {
    Spin spin;
    HamiltonianSpec spec;
    std::vector<TrajectorySample> samples;
    StateVector final_state;
    double max_norm_drift = 0.0; // max | ||psi||² - 1 | before renormalization
    int ramp_steps = 0;          // steps used by the adaptive ramp propagation
};

/// Exact spectral propagation for constant H (diagonalize once, apply phase
/// factors); step-wise constant-H propagation for ramps, with the step count
/// doubled until halving changes every reported moment by < 1e-8.
Trajectory evolve(const StateVector& initial, const HamiltonianSpec& spec,
                  const std::vector<double>& times);

struct TransverseMin {
    double variance;
    double angle; // radians from the x-axis, in (-pi/2, pi/2]; 0 if degenerate
};

/// Minimum over phi of Var(cos(phi) Jx + sin(phi) Jy): smaller eigenvalue of
/// the 2x2 covariance matrix of (Jx, Jy) and its eigendirection.
TransverseMin min_transverse_variance(const SpinMoments& m);
TransverseMin min_transverse_variance(const StateVector& state);

struct EhrenfestReport {
    bool non_adiabatic = false;      // sampling too coarse / quench-like ramp
    double max_ratio_deviation = 0.0; // max relative deviation from -omega/chi(t)
    int usable_intervals = 0;
};

/// Finite-differences d<Jx²>/d<Jz> along an adiabatic trajectory against the
/// Ehrenfest prediction -omega/chi(t).
EhrenfestReport ehrenfest_slope_check(const HamiltonianSpec& spec, const Trajectory& traj);

/// |<a|b>|²
double fidelity(const StateVector& a, const StateVector& b);

} // namespace ssq
