#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ssq/spin.hpp"
#include "ssq/state.hpp"

namespace ssq {

/// Annealed single-amplitude perturbation schedule for the stochastic
/// descent: the scale shrinks by shrink_factor after every
/// rejections_per_shrink consecutive rejections and the run stops once it
/// anneals below final_scale (or the iteration cap is hit).
struct PerturbationSchedule {
    double initial_scale = 0.1;
    double shrink_factor = 0.9;
    int rejections_per_shrink = 100;
    double final_scale = 1e-9;
    std::uint64_t max_iterations = 4000000;
};

struct VariationalResult {
    StateVector state;
    double x;                // <Jz>/J
    double f;                // Var(Jx)/J
    double mean_jx;
    double functional_value; // mu*<Jz> + Var(Jx), as tracked by the descent
    std::uint64_t iterations;
    std::uint64_t accepted;
    bool converged;
};

/// Greedy stochastic descent of mu*<Jz> + Var(Jx) over pure states:
/// perturb one randomly chosen amplitude, renormalize, accept iff the
/// functional strictly decreases. Deterministic for a fixed rng_seed.
/// Amplitudes are real unless complex_amplitudes is set.
VariationalResult variational_minimize(const Spin& spin, double mu, const StateVector& seed,
                                       const PerturbationSchedule& schedule,
                                       std::uint64_t rng_seed,
                                       bool complex_amplitudes = false);

enum class SeedKind { symmetric, tilt_plus, tilt_minus };

/// Deterministic restart seed: the diagonalization ground state of
/// mu*Jz + Jx², optionally tilted by a small rotation about y to break the
/// ±Jx symmetry toward one branch.
StateVector variational_seed(const Spin& spin, double mu, SeedKind kind,
                             double tilt_angle = 0.05);

struct MinimizeAtXOptions {
    PerturbationSchedule schedule{};
    std::uint64_t rng_seed = 1;
    bool complex_amplitudes = false;
    double x_tol = 1e-4;
    double tilt_angle = 0.05;
    /// restrict restarts to a subset of seeds (all three by default)
    std::vector<SeedKind> seeds = {SeedKind::symmetric, SeedKind::tilt_plus,
                                   SeedKind::tilt_minus};
};

/// Outer root-find on mu so the returned <Jz>/J matches x_target within
/// x_tol; inner multi-restart variational_minimize, best result returned.
VariationalResult minimize_at_x(const Spin& spin, double x_target,
                                const MinimizeAtXOptions& opts = {});

struct BifurcationReport {
    Spin spin;
    double x_critical;
    std::pair<double, double> bracket;
    std::vector<std::pair<double, double>> branch_samples; // (x, mean_jx)
    bool branches_indistinguishable = false;
};

struct BifurcationOptions {
    double x_lo = 0.80;
    double x_hi = 0.95;
    double bracket_width = 1e-3;
    double var_threshold = 1e-6; // broken branch must win by this much in Var(Jx)
    MinimizeAtXOptions inner{};
};

/// Bisection on x comparing the symmetric diagonalization solution against
/// symmetry-broken variational restarts; the critical x is where the broken
/// branch first beats the symmetric one by more than var_threshold.
BifurcationReport locate_bifurcation(const Spin& spin, const BifurcationOptions& opts = {});

} // namespace ssq
