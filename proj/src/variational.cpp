#include "ssq/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "ssq/curves.hpp"
#include "ssq/errors.hpp"
#include "ssq/kernels.hpp"
#include "ssq/moments.hpp"

namespace ssq {
namespace {

// e^{theta*B} with B = Im(Jy) (real antisymmetric), i.e. the rotation
// exp(-i*theta*Jy), via scaling-and-squaring on a truncated series.
Eigen::MatrixXd rotation_about_y_impl(const Spin& spin, double theta) {
    const int d = spin.dimension();
    const BasisCoeffs basis(spin);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) {
        b(i + 1, i) = 0.5 * basis.lower[i];
        b(i, i + 1) = -0.5 * basis.lower[i];
    }
    Eigen::MatrixXd k = theta * b;
    int squarings = 0;
    double norm = k.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.5 && squarings < 60) {
        k *= 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
    for (int order = 1; order <= 12; ++order) {
        term = (term * k) / static_cast<double>(order);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// Tilt seeds are requested once per mu evaluation; the rotation itself only
// depends on (spin, theta), so memoize it.
const Eigen::MatrixXd& rotation_about_y(const Spin& spin, double theta) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, Eigen::MatrixXd> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(spin.two_j(), theta);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, rotation_about_y_impl(spin, theta)).first;
    return it->second;
}

// Incrementally maintained sums for the real-amplitude functional
//   G = mu*<Jz> + Var(Jx)
// over an unnormalized coefficient vector.
struct RealFunctional {
    const BasisCoeffs& basis;
    double mu;
    std::vector<double> c;
    double n2 = 0, sz = 0, sx = 0, sxx_d = 0, sxx_o = 0;

    RealFunctional(const BasisCoeffs& b, double mu_, std::vector<double> c0)
        : basis(b), mu(mu_), c(std::move(c0)) {
        recompute();
    }

    void recompute() {
        const std::size_t d = c.size();
        namespace k = kernels;
        n2 = k::sumsq(c.data(), d);
        sz = k::weighted_sumsq(basis.m.data(), c.data(), d);
        sx = k::band1_sum(basis.lower.data(), c.data(), d);
        sxx_d = k::weighted_sumsq(basis.jx2_diag.data(), c.data(), d);
        sxx_o = (d >= 3) ? k::band2_sum(basis.jx2_off2.data(), c.data(), d) : 0.0;
    }

    double value() const {
        const double mz = sz / n2;
        const double mx = sx / n2;
        const double jx2 = (sxx_d + 2.0 * sxx_o) / n2;
        return mu * mz + (jx2 - mx * mx);
    }

    struct Delta {
        double n2, sz, sx, sxx_d, sxx_o;
    };

    Delta propose(std::size_t i, double delta) const {
        const std::size_t d = c.size();
        const double two_cd = 2.0 * c[i] * delta + delta * delta;
        Delta dl;
        dl.n2 = two_cd;
        dl.sz = basis.m[i] * two_cd;
        dl.sxx_d = basis.jx2_diag[i] * two_cd;
        double dsx = 0.0;
        if (i > 0) dsx += basis.lower[i - 1] * c[i - 1];
        if (i + 1 < d) dsx += basis.lower[i] * c[i + 1];
        dl.sx = delta * dsx;
        double dso = 0.0;
        if (i >= 2) dso += basis.jx2_off2[i - 2] * c[i - 2];
        if (i + 2 < d) dso += basis.jx2_off2[i] * c[i + 2];
        dl.sxx_o = delta * dso;
        return dl;
    }

    double value_with(const Delta& dl) const {
        const double n2n = n2 + dl.n2;
        const double mz = (sz + dl.sz) / n2n;
        const double mx = (sx + dl.sx) / n2n;
        const double jx2 = (sxx_d + dl.sxx_d + 2.0 * (sxx_o + dl.sxx_o)) / n2n;
        return mu * mz + (jx2 - mx * mx);
    }

    void apply(std::size_t i, double delta, const Delta& dl) {
        c[i] += delta;
        n2 += dl.n2;
        sz += dl.sz;
        sx += dl.sx;
        sxx_d += dl.sxx_d;
        sxx_o += dl.sxx_o;
    }

    void rescale_if_drifted() {
        if (n2 > 0.25 && n2 < 4.0) return;
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& x : c) x *= inv;
        recompute();
    }
};

// Complex-amplitude functional; proposals re-evaluate the moments in O(d),
// which is fine for the dimensions the complex mode is used at.
struct ComplexFunctional {
    const BasisCoeffs& basis;
    double mu;
    std::vector<cxd> c;

    double value() const {
        const std::size_t d = c.size();
        namespace k = kernels;
        const double n2 = k::csumsq(c.data(), d);
        const double mz = k::cweighted_sumsq(basis.m.data(), c.data(), d) / n2;
        const double mx = k::cband1_re(basis.lower.data(), c.data(), d) / n2;
        const double jx2 = (k::cweighted_sumsq(basis.jx2_diag.data(), c.data(), d) +
                            (d >= 3 ? 2.0 * k::cband2_re(basis.jx2_off2.data(), c.data(), d)
                                    : 0.0)) /
                           n2;
        return mu * mz + (jx2 - mx * mx);
    }
};

VariationalResult finish(const Spin& spin, double mu, std::vector<cxd> amps,
                         double tracked_value, std::uint64_t iters, std::uint64_t accepted,
                         bool converged) {
    StateVector state = StateVector::normalized(spin, std::move(amps));
    const SpinMoments m = moments(state);
    VariationalResult r{std::move(state),
                        m.mean_jz / spin.j(),
                        m.var_jx / spin.j(),
                        m.mean_jx,
                        tracked_value,
                        iters,
                        accepted,
                        converged};
    return r;
}

} // namespace

VariationalResult variational_minimize(const Spin& spin, double mu, const StateVector& seed,
                                       const PerturbationSchedule& schedule,
                                       std::uint64_t rng_seed, bool complex_amplitudes) {
    if (std::abs(seed.norm2() - 1.0) > 1e-9)
        throw normalization_error("variational_minimize: seed is not normalized");
    const BasisCoeffs basis(spin);
    const std::size_t d = seed.amplitudes().size();
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double scale = schedule.initial_scale;
    std::uint64_t iters = 0, accepted = 0;
    int consecutive_rejections = 0;
    bool converged = false;

    if (!complex_amplitudes) {
        std::vector<double> c0(d);
        for (std::size_t i = 0; i < d; ++i) {
            c0[i] = seed[static_cast<int>(i)].real();
            if (std::abs(seed[static_cast<int>(i)].imag()) > 1e-12)
                throw input_error(
                    "variational_minimize: complex seed passed to the real-amplitude mode");
        }
        RealFunctional fn(basis, mu, std::move(c0));
        std::uniform_int_distribution<std::size_t> pick(0, d - 1);
        double g = fn.value();
        std::uint64_t since_material = 0;
        while (iters < schedule.max_iterations) {
            ++iters;
            ++since_material;
            const std::size_t i = pick(rng);
            const double delta = scale * unit(rng);
            const auto dl = fn.propose(i, delta);
            const double g_new = fn.value_with(dl);
            if (g_new < g) {
                if (g - g_new > 1e-14 * std::max(1.0, std::abs(g))) since_material = 0;
                fn.apply(i, delta, dl);
                g = g_new;
                ++accepted;
                consecutive_rejections = 0;
                if ((accepted & 0xFFFF) == 0) {
                    fn.rescale_if_drifted();
                    g = fn.value();
                }
            } else if (++consecutive_rejections >= schedule.rejections_per_shrink) {
                consecutive_rejections = 0;
                scale *= schedule.shrink_factor;
                if (scale < schedule.final_scale) {
                    converged = true;
                    break;
                }
            }
            // rounding-level accepts keep resetting the rejection counter once
            // the scale reaches the double-precision floor; a long stretch
            // without material progress is convergence
            if (since_material >= 30000) {
                converged = true;
                break;
            }
        }
        std::vector<cxd> amps(d);
        for (std::size_t i = 0; i < d; ++i) amps[i] = cxd(fn.c[i], 0.0);
        return finish(spin, mu, std::move(amps), g, iters, accepted, converged);
    }

    ComplexFunctional fn{basis, mu, seed.amplitudes()};
    std::uniform_int_distribution<std::size_t> pick(0, 2 * d - 1);
    double g = fn.value();
    while (iters < schedule.max_iterations) {
        ++iters;
        const std::size_t slot = pick(rng);
        const std::size_t i = slot / 2;
        const double delta = scale * unit(rng);
        const cxd old = fn.c[i];
        fn.c[i] = (slot % 2 == 0) ? old + delta : old + cxd(0.0, delta);
        const double g_new = fn.value();
        if (g_new < g) {
            g = g_new;
            ++accepted;
            consecutive_rejections = 0;
        } else {
            fn.c[i] = old;
            if (++consecutive_rejections >= schedule.rejections_per_shrink) {
                consecutive_rejections = 0;
                scale *= schedule.shrink_factor;
                if (scale < schedule.final_scale) {
                    converged = true;
                    break;
                }
            }
        }
    }
    return finish(spin, mu, std::move(fn.c), g, iters, accepted, converged);
}

StateVector variational_seed(const Spin& spin, double mu, SeedKind kind, double tilt_angle) {
    const GroundStateResult g = ground_state_of(mu, spin);
    if (kind == SeedKind::symmetric) return g.state;
    const double theta = (kind == SeedKind::tilt_plus) ? tilt_angle : -tilt_angle;
    const Eigen::MatrixXd& rot = rotation_about_y(spin, theta);
    const int d = spin.dimension();
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = g.state[i].real();
    const Eigen::VectorXd w = rot * v;
    std::vector<double> amps(w.data(), w.data() + d);
    return StateVector::normalized_real(spin, amps);
}

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

VariationalResult best_of_restarts(const Spin& spin, double mu, const MinimizeAtXOptions& opts,
                                   std::uint64_t salt) {
    VariationalResult best{StateVector::coherent_up(spin), 0, 0, 0, 0, 0, 0, false};
    bool have = false;
    std::uint64_t idx = 0;
    for (SeedKind kind : opts.seeds) {
        const StateVector seed = variational_seed(spin, mu, kind, opts.tilt_angle);
        VariationalResult r =
            variational_minimize(spin, mu, seed, opts.schedule,
                                 mix_seed(opts.rng_seed, salt * 8 + idx), opts.complex_amplitudes);
        if (!have || r.functional_value < best.functional_value) {
            best = std::move(r);
            have = true;
        }
        ++idx;
    }
    return best;
}

} // namespace

VariationalResult minimize_at_x(const Spin& spin, double x_target,
                                const MinimizeAtXOptions& opts) {
    if (!(x_target >= 0.0) || x_target >= 1.0)
        throw input_error("minimize_at_x: x target must lie in [0,1)");

    double t_lo = 1e-8, t_hi = 1.0;
    std::uint64_t salt = 0;
    VariationalResult r_hi = best_of_restarts(spin, -t_hi, opts, salt++);
    int guard = 0;
    while (r_hi.x < x_target) {
        t_hi *= 10.0;
        if (++guard > 16)
            throw numerical_error("minimize_at_x: failed to bracket x target from above",
                                  r_hi.x);
        r_hi = best_of_restarts(spin, -t_hi, opts, salt++);
    }
    if (std::abs(r_hi.x - x_target) <= opts.x_tol) return r_hi;

    VariationalResult r_lo = best_of_restarts(spin, -t_lo, opts, salt++);
    while (r_lo.x > x_target) {
        t_lo /= 10.0;
        if (++guard > 32)
            throw numerical_error("minimize_at_x: failed to bracket x target from below",
                                  r_lo.x);
        r_lo = best_of_restarts(spin, -t_lo, opts, salt++);
    }
    if (std::abs(r_lo.x - x_target) <= opts.x_tol) return r_lo;

    VariationalResult best = (std::abs(r_lo.x - x_target) < std::abs(r_hi.x - x_target))
                                 ? std::move(r_lo)
                                 : std::move(r_hi);
    for (int it = 0; it < 90; ++it) {
        const double t_mid = std::sqrt(t_lo * t_hi);
        VariationalResult r = best_of_restarts(spin, -t_mid, opts, salt++);
        const bool closer = std::abs(r.x - x_target) < std::abs(best.x - x_target);
        const bool under = r.x < x_target;
        if (closer) best = std::move(r);
        if (std::abs(best.x - x_target) <= opts.x_tol) return best;
        if (under)
            t_lo = t_mid;
        else
            t_hi = t_mid;
    }
    throw numerical_error("minimize_at_x: root-find on mu did not reach the x target",
                          std::abs(best.x - x_target));
}

BifurcationReport locate_bifurcation(const Spin& spin, const BifurcationOptions& opts) {
    if (spin.is_integer_spin())
        throw input_error("locate_bifurcation: requires a half-integer spin");

    BifurcationReport report{spin, 1.0, {1.0, 1.0}, {}, false};
    if (spin.two_j() == 1) return report; // bifurcation degenerates to the coherent state

    // (f_sym - f_broken)*J, positive when the broken branch wins. The
    // variational x only matches the probe to x_tol, so the symmetric value
    // is taken from the refined tangent at each branch's own x — otherwise
    // the frontier slope times the x mismatch swamps the 1e-6 threshold.
    auto branch_gap = [&](double x) {
        const CurvePoint sym = refine_point(spin, x);
        auto sym_at = [&](double xq) { return sym.f + sym.slope * (xq - sym.x); };
        MinimizeAtXOptions plus = opts.inner;
        plus.seeds = {SeedKind::tilt_plus};
        MinimizeAtXOptions minus = opts.inner;
        minus.seeds = {SeedKind::tilt_minus};
        const VariationalResult rp = minimize_at_x(spin, x, plus);
        const VariationalResult rm = minimize_at_x(spin, x, minus);
        report.branch_samples.emplace_back(rp.x, rp.mean_jx);
        report.branch_samples.emplace_back(rm.x, rm.mean_jx);
        const double gap_p = sym_at(rp.x) - rp.f;
        const double gap_m = sym_at(rm.x) - rm.f;
        return std::max(gap_p, gap_m) * spin.j();
    };

    // The diagonalization family only reaches down to x = (J+1/2)/(2J) <= 2/3,
    // so the lower probe never moves below 0.72.
    double lo = opts.x_lo, hi = opts.x_hi;
    double gap_lo = branch_gap(lo);
    int expand = 0;
    while (gap_lo <= opts.var_threshold && lo > 0.72 + 0.04) {
        lo -= 0.04;
        if (++expand > 5) break;
        gap_lo = branch_gap(lo);
    }
    if (gap_lo <= opts.var_threshold) {
        report.branches_indistinguishable = true;
        report.x_critical = 0.5 * (lo + hi);
        report.bracket = {lo, hi};
        return report;
    }
    double gap_hi = branch_gap(hi);
    if (gap_hi > opts.var_threshold) {
        // broken branch still wins at the upper probe: report the open bracket
        report.branches_indistinguishable = true;
        report.x_critical = hi;
        report.bracket = {lo, hi};
        return report;
    }

    while (hi - lo > opts.bracket_width) {
        const double mid = 0.5 * (lo + hi);
        if (branch_gap(mid) > opts.var_threshold)
            lo = mid;
        else
            hi = mid;
    }
    report.x_critical = 0.5 * (lo + hi);
    report.bracket = {lo, hi};
    return report;
}

} // namespace ssq
