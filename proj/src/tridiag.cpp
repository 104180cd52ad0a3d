#include "ssq/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssq/errors.hpp"
#include "ssq/kernels.hpp"

namespace ssq {
namespace {

double matrix_scale(const SymTridiag& t) {
    const std::size_t n = t.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(t.diag[i]);
        if (i > 0) row += std::abs(t.off[i - 1]);
        if (i + 1 < n) row += std::abs(t.off[i]);
        s = std::max(s, row);
    }
    return s;
}

double pivot_floor(const SymTridiag& t) {
    double max_off2 = 1.0;
    for (double e : t.off) max_off2 = std::max(max_off2, e * e);
    return std::numeric_limits<double>::min() * max_off2;
}

int count_below(const SymTridiag& t, double sigma, double pivmin) {
    const std::size_t n = t.size();
    int count = 0;
    double q = t.diag[0] - sigma;
    if (std::abs(q) <= pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = (t.diag[i] - sigma) - t.off[i - 1] * t.off[i - 1] / q;
        if (std::abs(q) <= pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

// Tridiagonal LU with partial pivoting (dgttrf-style); fill-in goes to du2.
struct TriLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> swapped;

    TriLU(const SymTridiag& t, double sigma, double pivmin) {
        const std::size_t n = t.size();
        dl.assign(t.off.begin(), t.off.end());
        du.assign(t.off.begin(), t.off.end());
        d.resize(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - sigma;
        du2.assign(n >= 2 ? n - 2 : 0, 0.0);
        swapped.assign(n >= 1 ? n - 1 : 0, 0);

        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (std::abs(d[i]) <= pivmin) d[i] = (d[i] < 0.0 ? -pivmin : pivmin);
                const double fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                du[i] = temp;
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = 1;
            }
        }
        if (std::abs(d[n - 1]) <= pivmin) d[n - 1] = (d[n - 1] < 0.0 ? -pivmin : pivmin);
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t k = n; k-- > 2;) {
            const std::size_t i = k - 2;
            b[i] = (b[i] - du[i] * b[i + 1] - (i + 2 < n ? du2[i] * b[i + 2] : 0.0)) / d[i];
        }
    }
};

void fix_sign(std::vector<double>& v) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
        for (auto& x : v) x = -x;
}

} // namespace

int tridiag_count_below(const SymTridiag& t, double sigma) {
    return count_below(t, sigma, pivot_floor(t));
}

TridiagGround tridiag_ground_state(const SymTridiag& t, double rel_tol) {
    const std::size_t n = t.size();
    if (n == 0) throw input_error("tridiag_ground_state: empty matrix");
    if (t.off.size() + 1 != n) throw input_error("tridiag_ground_state: off size must be n-1");

    TridiagGround g;
    if (n == 1) {
        g.value = t.diag[0];
        g.vector = {1.0};
        g.residual = 0.0;
        return g;
    }

    const double scale = matrix_scale(t);
    const double pivmin = pivot_floor(t);
    const double tol = rel_tol * std::max(1.0, scale);

    // Gershgorin bracket, then bisect for the smallest eigenvalue.
    double lo = t.diag[0], hi = t.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < n) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    double width_floor = 2.0 * eps * std::max({std::abs(lo), std::abs(hi), 1.0});
    for (int iter = 0; iter < 210 && (hi - lo) > width_floor; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(t, mid, pivmin) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    double sigma = 0.5 * (lo + hi);

    // Inverse iteration; Rayleigh-quotient shift updates if the first
    // factorization is not accurate enough. A shift that lands on the
    // eigenvalue to the last bit produces enormous (or non-finite) solve
    // output: max-normalize before taking norms, and nudge the shift if the
    // solve still overflows.
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n), tv(n);
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<double> best_v;
    double best_value = sigma;
    const double sigma_unit = eps * std::max(1.0, std::max(std::abs(sigma), scale));

    for (int outer = 0; outer < 8; ++outer) {
        TriLU lu(t, sigma, pivmin);
        bool overflowed = false;
        for (int inner = 0; inner < 6; ++inner) {
            w = v;
            lu.solve(w);
            double wmax = 0.0;
            for (double x : w) wmax = std::max(wmax, std::abs(x));
            if (!std::isfinite(wmax) || wmax == 0.0) {
                overflowed = true;
                break;
            }
            for (auto& x : w) x /= wmax;
            const double nrm = std::sqrt(kernels::sumsq(w.data(), n));
            for (auto& x : w) x /= nrm;
            v = w;

            kernels::tridiag_apply(t.diag.data(), t.off.data(), v.data(), tv.data(), n);
            const double rho = kernels::dot(v.data(), tv.data(), n);
            double res2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = tv[i] - rho * v[i];
                res2 += r * r;
            }
            const double res = std::sqrt(res2);
            if (res < best_residual) {
                best_residual = res;
                best_v = v;
                best_value = rho;
            }
            if (res <= tol) {
                fix_sign(best_v);
                return TridiagGround{best_value, std::move(best_v), best_residual};
            }
        }
        if (overflowed) {
            // move the shift off the exactly singular point, growing the nudge
            sigma += static_cast<double>((outer + 1) * (outer + 1)) * 4.0 * sigma_unit;
            if (!best_v.empty()) v = best_v;
        } else if (!best_v.empty()) {
            sigma = best_value; // Rayleigh shift
            v = best_v;
        }
    }

    throw numerical_error("tridiag_ground_state: inverse iteration did not reach tolerance",
                          best_residual);
}

} // namespace ssq
