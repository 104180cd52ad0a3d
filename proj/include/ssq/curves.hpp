#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssq/moments.hpp"
#include "ssq/spin.hpp"
#include "ssq/state.hpp"

namespace ssq {

struct GroundStateResult {
    StateVector state;
    double energy;
    double residual;
};

/// Lowest eigenpair of mu*Jz + Jx². In the Jz basis the operator couples m
/// only to m, m±2, so it splits into two symmetric tridiagonal parity blocks;
/// the ground state is the lower of the two block minima (real amplitudes,
/// supported on a single block).
GroundStateResult ground_state_of(double mu, const Spin& spin);

/// One point of the optimal frontier: x = <Jz>/J, f = Var(Jx)/J, slope = -mu.
struct CurvePoint {
    double mu;
    double x;
    double f;
    double slope;
    double ground_energy;
};

/// Grid for curve computation: either a logarithmic sweep of -mu, or a list
/// of x targets each refined by bisection on mu to |x - target| <= 1e-6.
struct CurveGrid {
    double neg_mu_min = 1e-4;
    double neg_mu_max = 1e4;
    int points_per_decade = 50;
    std::vector<double> x_targets;

    bool is_sweep() const { return x_targets.empty(); }
    std::string canonical() const;
};

/// Tabulated optimal frontier with tangent-envelope evaluation.
///
/// Points are strictly increasing in x and end at the exact coherent point
/// (x=1, f=1/2), stored with slope=+inf (the tangent there is vertical; the
/// envelope only uses it at x=1 itself). For half-integer spins the table
/// keeps only the regime right of the bifurcation (x >= x_valid_lo), where
/// the diagonalization curve equals the frontier.
class CurveTable {
  public:
    CurveTable(Spin spin, std::vector<CurvePoint> points, double x_valid_lo);

    const Spin& spin() const { return spin_; }
    const std::vector<CurvePoint>& points() const { return points_; }
    double x_valid_lo() const { return x_valid_lo_; }
    double x_min() const { return points_.front().x; }

    bool covers(double x) const;

    /// Certified lower bound on F_J(|x|): max over tabulated tangents,
    /// clamped below at 0. Evaluates at |x| (F_J is even in x). Throws
    /// domain_error outside the covered interval.
    double lower_envelope(double x) const;

  private:
    Spin spin_;
    std::vector<CurvePoint> points_;
    double x_valid_lo_;
};

/// Validity edge of the diagonalization curve: 0 for integer spins, 1 for
/// J=1/2 (bifurcation at the coherent state), 0.88 for other half-integer
/// spins (upper edge of the bifurcation interval).
double curve_validity_edge(const Spin& spin);

CurveTable compute_curve(const Spin& spin, const CurveGrid& grid = {});

/// Closed-form lower bound on F_J(x) (never above the true frontier).
double analytic_bound(const Spin& spin, double x);

/// Same bound for a possibly huge effective spin passed directly as J.
double analytic_bound_j(double j, double x);

/// Single frontier point refined so that |x - x_target| <= 1e-6.
CurvePoint refine_point(const Spin& spin, double x_target);

// --- persistence -----------------------------------------------------------

/// Cache key over (two_j, grid spec, code version).
std::string curve_cache_key(const Spin& spin, const CurveGrid& grid);

/// CSV with header `two_j,mu,x,f,slope`, rows in ascending x, prefixed by
/// `#` metadata comment lines.
std::string curve_csv(const CurveTable& table, const std::vector<std::string>& meta_comments);
CurveTable parse_curve_csv(const std::string& text);

/// Reads the table from the cache directory if present (falling back to a
/// recompute on any parse/validation failure); writes the cache atomically
/// after computing.
CurveTable load_or_compute_curve(const Spin& spin, const CurveGrid& grid,
                                 const std::optional<std::filesystem::path>& cache_dir);

} // namespace ssq
