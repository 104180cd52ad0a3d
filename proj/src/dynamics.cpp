#include "ssq/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ssq/errors.hpp"
#include "ssq/kernels.hpp"

namespace ssq {
namespace {

// Real symmetric H in the |J,m> basis. Diagonal and |m-m'|=2 couplings only.
Eigen::MatrixXd hamiltonian_matrix(const Spin& spin, const BasisCoeffs& basis,
                                   HamiltonianKind kind, double omega, double chi) {
    const int d = spin.dimension();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) h(i, i) = omega * basis.m[i];
    if (kind == HamiltonianKind::two_axis) {
        // Jx² - Jy²: diagonals cancel, off-2 couplings double
        for (int i = 0; i + 2 < d; ++i) {
            h(i, i + 2) += 2.0 * chi * basis.jx2_off2[i];
            h(i + 2, i) += 2.0 * chi * basis.jx2_off2[i];
        }
    } else {
        for (int i = 0; i < d; ++i) h(i, i) += chi * basis.jx2_diag[i];
        for (int i = 0; i + 2 < d; ++i) {
            h(i, i + 2) += chi * basis.jx2_off2[i];
            h(i + 2, i) += chi * basis.jx2_off2[i];
        }
    }
    return h;
}

struct SpectralPropagator {
    Eigen::MatrixXd v;      // eigenvectors (columns)
    Eigen::VectorXd lambda; // eigenvalues

    explicit SpectralPropagator(const Eigen::MatrixXd& h) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success)
            throw numerical_error("evolve: dense eigendecomposition failed");
        v = es.eigenvectors();
        lambda = es.eigenvalues();
    }

    void advance(Eigen::VectorXcd& psi, double dt) const {
        Eigen::VectorXcd a = v.transpose() * psi;
        for (Eigen::Index k = 0; k < a.size(); ++k)
            a(k) *= std::polar(1.0, -lambda(k) * dt);
        psi = v * a;
    }
};

TrajectorySample sample_from(const Spin& spin, const BasisCoeffs& basis, double t,
                             const Eigen::VectorXcd& psi) {
    std::vector<cxd> amps(psi.data(), psi.data() + psi.size());
    const StateVector state = StateVector::normalized(spin, std::move(amps));
    const SpinMoments m = moments(state, basis);
    const TransverseMin tm = min_transverse_variance(m);
    return TrajectorySample{t, m, tm.variance, tm.angle};
}

std::vector<TrajectorySample> propagate_ramp(const Spin& spin, const BasisCoeffs& basis,
                                             const HamiltonianSpec& spec,
                                             const std::vector<double>& times, int total_steps,
                                             Eigen::VectorXcd psi, double& norm_drift,
                                             Eigen::VectorXcd& final_psi) {
    std::vector<TrajectorySample> out;
    const double t_end = times.back();
    double t = 0.0;
    norm_drift = 0.0;
    std::size_t next_sample = 0;
    if (times[0] == 0.0) {
        out.push_back(sample_from(spin, basis, 0.0, psi));
        ++next_sample;
    }
    double prev_t = 0.0;
    for (std::size_t s = next_sample; s < times.size(); ++s) {
        const double seg = times[s] - prev_t;
        const int steps = std::max(1, static_cast<int>(std::lround(
                                          total_steps * (seg / std::max(t_end, 1e-300)))));
        const double dt = seg / steps;
        for (int k = 0; k < steps; ++k) {
            const double t_mid = prev_t + (k + 0.5) * dt;
            const SpectralPropagator prop(hamiltonian_matrix(
                spin, basis, HamiltonianKind::one_axis, spec.omega, spec.chi_at(t_mid)));
            prop.advance(psi, dt);
        }
        prev_t = times[s];
        t = times[s];
        norm_drift = std::max(norm_drift, std::abs(psi.squaredNorm() - 1.0));
        out.push_back(sample_from(spin, basis, t, psi));
    }
    final_psi = psi;
    return out;
}

double max_moment_delta(const std::vector<TrajectorySample>& a,
                        const std::vector<TrajectorySample>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const SpinMoments &ma = a[i].moments, &mb = b[i].moments;
        d = std::max({d, std::abs(ma.mean_jx - mb.mean_jx), std::abs(ma.mean_jy - mb.mean_jy),
                      std::abs(ma.mean_jz - mb.mean_jz), std::abs(ma.var_jx - mb.var_jx),
                      std::abs(ma.var_jy - mb.var_jy), std::abs(ma.var_jz - mb.var_jz),
                      std::abs(a[i].min_transverse_variance - b[i].min_transverse_variance)});
    }
    return d;
}

} // namespace

double HamiltonianSpec::chi_at(double t) const {
    if (kind != HamiltonianKind::adiabatic_ramp) return chi;
    if (t <= 0.0) return 0.0;
    if (t >= ramp_duration) return chi;
    return chi * (t / ramp_duration);
}

void HamiltonianSpec::validate() const {
    if (!std::isfinite(omega) || !std::isfinite(chi))
        throw input_error("HamiltonianSpec: omega and chi must be finite");
    if (kind == HamiltonianKind::adiabatic_ramp) {
        if (!(omega < 0.0))
            throw input_error("HamiltonianSpec: adiabatic ramp requires omega < 0");
        if (!(ramp_duration > 0.0))
            throw input_error("HamiltonianSpec: adiabatic ramp requires a positive duration");
        if (!(chi >= 0.0))
            throw input_error("HamiltonianSpec: adiabatic ramp requires chi >= 0");
    }
}

Trajectory evolve(const StateVector& initial, const HamiltonianSpec& spec,
                  const std::vector<double>& times) {
    spec.validate();
    if (times.empty()) throw input_error("evolve: no sample times");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1]))
            throw input_error("evolve: times must be nonnegative and strictly increasing");
    }
    const Spin spin = initial.spin();
    const BasisCoeffs basis(spin);
    const int d = spin.dimension();
    Eigen::VectorXcd psi0(d);
    for (int i = 0; i < d; ++i) psi0(i) = initial[i];

    Trajectory traj{spin, spec, {}, initial, 0.0, 0};

    if (spec.kind != HamiltonianKind::adiabatic_ramp) {
        const SpectralPropagator prop(
            hamiltonian_matrix(spin, basis, spec.kind, spec.omega, spec.chi));
        Eigen::VectorXcd psi = psi0;
        double prev_t = 0.0;
        for (double t : times) {
            prop.advance(psi, t - prev_t);
            prev_t = t;
            traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(psi.squaredNorm() - 1.0));
            traj.samples.push_back(sample_from(spin, basis, t, psi));
        }
        std::vector<cxd> amps(psi.data(), psi.data() + d);
        traj.final_state = StateVector::normalized(spin, std::move(amps));
    } else {
        constexpr double step_tol = 1e-8;
        int steps = std::max<int>(64, static_cast<int>(times.size()));
        double drift = 0.0;
        Eigen::VectorXcd fin;
        std::vector<TrajectorySample> coarse =
            propagate_ramp(spin, basis, spec, times, steps, psi0, drift, fin);
        bool ok = false;
        for (int iter = 0; iter < 14; ++iter) {
            steps *= 2;
            double drift2 = 0.0;
            Eigen::VectorXcd fin2;
            std::vector<TrajectorySample> fine =
                propagate_ramp(spin, basis, spec, times, steps, psi0, drift2, fin2);
            const double delta = max_moment_delta(coarse, fine);
            coarse = std::move(fine);
            drift = drift2;
            fin = std::move(fin2);
            if (delta < step_tol) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw numerical_error("evolve: ramp step-size control failed to reach 1e-8",
                                  step_tol);
        traj.samples = std::move(coarse);
        traj.max_norm_drift = drift;
        traj.ramp_steps = steps;
        std::vector<cxd> amps(fin.data(), fin.data() + d);
        traj.final_state = StateVector::normalized(spin, std::move(amps));
    }

    if (traj.max_norm_drift > 1e-9)
        throw numerical_error("evolve: state norm drifted beyond 1e-9", traj.max_norm_drift);
    return traj;
}

TransverseMin min_transverse_variance(const SpinMoments& m) {
    const double a = 0.5 * (m.var_jx + m.var_jy);
    const double b = 0.5 * (m.var_jx - m.var_jy);
    const double c = m.cov_jxjy;
    const double r = std::hypot(b, c);
    TransverseMin out;
    out.variance = std::max(0.0, a - r);
    if (r <= 1e-12 * std::max(1.0, a)) {
        out.angle = 0.0; // isotropic covariance, direction degenerate
        return out;
    }
    double phi = 0.5 * (std::atan2(c, b) + std::numbers::pi);
    // fold into (-pi/2, pi/2]
    while (phi > 0.5 * std::numbers::pi) phi -= std::numbers::pi;
    while (phi <= -0.5 * std::numbers::pi) phi += std::numbers::pi;
    out.angle = phi;
    return out;
}

TransverseMin min_transverse_variance(const StateVector& state) {
    return min_transverse_variance(moments(state));
}

EhrenfestReport ehrenfest_slope_check(const HamiltonianSpec& spec, const Trajectory& traj) {
    if (spec.kind != HamiltonianKind::adiabatic_ramp)
        throw input_error("ehrenfest_slope_check: requires an adiabatic_ramp trajectory");
    EhrenfestReport rep;
    const auto& s = traj.samples;
    const double j = traj.spin.j();
    const double jz_floor = 1e-9 * std::max(1.0, j);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double t0 = s[i].t, t1 = s[i + 1].t;
        const double chi0 = spec.chi_at(t0), chi1 = spec.chi_at(t1);
        if (spec.chi > 0.0 && std::abs(chi1 - chi0) > 0.1 * spec.chi) continue; // quench-like jump
        const double chi_mid = spec.chi_at(0.5 * (t0 + t1));
        if (!(chi_mid > 0.0)) continue;
        const auto jx2 = [](const TrajectorySample& ts) {
            return ts.moments.var_jx + ts.moments.mean_jx * ts.moments.mean_jx;
        };
        const double djz = s[i + 1].moments.mean_jz - s[i].moments.mean_jz;
        if (std::abs(djz) < jz_floor) continue;
        const double ratio = (jx2(s[i + 1]) - jx2(s[i])) / djz;
        const double target = -spec.omega / chi_mid;
        rep.max_ratio_deviation =
            std::max(rep.max_ratio_deviation, std::abs(ratio - target) / std::abs(target));
        ++rep.usable_intervals;
    }
    rep.non_adiabatic = rep.usable_intervals < 3;
    return rep;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.spin() != b.spin()) throw input_error("fidelity: spins differ");
    cxd overlap(0.0, 0.0);
    for (int i = 0; i < a.dimension(); ++i) overlap += std::conj(a[i]) * b[i];
    return std::norm(overlap);
}

} // namespace ssq
