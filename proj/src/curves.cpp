#include "ssq/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ssq/csv.hpp"
#include "ssq/errors.hpp"
#include "ssq/tridiag.hpp"
#include "ssq/version.hpp"

namespace ssq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBifurcationUpperEdge = 0.88;

// Parity block p (0 or 1) of mu*Jz + Jx²: compressed indices i = p, p+2, ...
SymTridiag parity_block(double mu, const BasisCoeffs& basis, int p) {
    const int d = static_cast<int>(basis.m.size());
    SymTridiag t;
    for (int i = p; i < d; i += 2) {
        t.diag.push_back(mu * basis.m[i] + basis.jx2_diag[i]);
        if (i + 2 < d) t.off.push_back(basis.jx2_off2[i]);
    }
    return t;
}

struct CurveSolveContext {
    Spin spin;
    BasisCoeffs basis;
    explicit CurveSolveContext(const Spin& s) : spin(s), basis(s) {}
};

GroundStateResult ground_state_impl(double mu, const CurveSolveContext& ctx) {
    if (!std::isfinite(mu)) throw input_error("ground_state_of: mu must be finite");
    const int d = ctx.spin.dimension();

    TridiagGround best;
    int best_parity = 0;
    bool have = false;
    for (int p = 0; p < 2 && p < d; ++p) {
        const SymTridiag block = parity_block(mu, ctx.basis, p);
        TridiagGround g = tridiag_ground_state(block);
        if (!have || g.value < best.value) {
            best = std::move(g);
            best_parity = p;
            have = true;
        }
    }

    std::vector<cxd> amps(d, cxd(0.0, 0.0));
    for (std::size_t k = 0; k < best.vector.size(); ++k)
        amps[best_parity + 2 * k] = cxd(best.vector[k], 0.0);
    return GroundStateResult{StateVector(ctx.spin, std::move(amps)), best.value, best.residual};
}

CurvePoint point_from_mu(double mu, const CurveSolveContext& ctx) {
    const GroundStateResult g = ground_state_impl(mu, ctx);
    const SpinMoments m = moments(g.state, ctx.basis);
    if (std::abs(m.mean_jx) > 1e-8 || std::abs(m.mean_jy) > 1e-8)
        throw numerical_error("compute_curve: ground state at mu=" + io::format_double(mu) +
                                  " has nonzero <Jx> or <Jy> (symmetry breaking)",
                              std::max(std::abs(m.mean_jx), std::abs(m.mean_jy)));
    const double j = ctx.spin.j();
    double x = m.mean_jz / j;
    double f = m.var_jx / j;
    if (std::abs(x) < 1e-12) x = 0.0;
    if (f < 1e-14) f = std::max(f, 0.0);
    return CurvePoint{mu, x, f, -mu, g.energy};
}

// Thin to a minimum x spacing; within a cluster keep the smallest f.
// Exact endpoints (x=0 for integer spins, x=1) survive because they are
// cluster minima by construction.
std::vector<CurvePoint> sort_and_thin(std::vector<CurvePoint> pts, double min_dx) {
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
    std::vector<CurvePoint> out;
    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t j = i;
        std::size_t best = i;
        while (j < pts.size() && pts[j].x - pts[i].x < min_dx) {
            if (pts[j].f < pts[best].f) best = j;
            ++j;
        }
        // never drop the exact x=1 endpoint in favor of a near-saturated neighbor
        for (std::size_t k = i; k < j; ++k)
            if (pts[k].x == 1.0) best = k;
        out.push_back(pts[best]);
        i = j;
    }
    return out;
}

} // namespace

GroundStateResult ground_state_of(double mu, const Spin& spin) {
    return ground_state_impl(mu, CurveSolveContext(spin));
}

double curve_validity_edge(const Spin& spin) {
    if (spin.is_integer_spin()) return 0.0;
    if (spin.two_j() == 1) return 1.0;
    return kBifurcationUpperEdge;
}

CurveTable compute_curve(const Spin& spin, const CurveGrid& grid) {
    const CurveSolveContext ctx(spin);
    std::vector<CurvePoint> pts;

    if (grid.is_sweep()) {
        if (!(grid.neg_mu_min > 0.0) || !(grid.neg_mu_max >= grid.neg_mu_min) ||
            grid.points_per_decade < 1)
            throw input_error("compute_curve: invalid mu sweep grid");
        const double decades = std::log10(grid.neg_mu_max / grid.neg_mu_min);
        const int steps = std::max(1, static_cast<int>(std::lround(decades * grid.points_per_decade)));
        for (int k = 0; k <= steps; ++k) {
            const double t = grid.neg_mu_min * std::pow(10.0, decades * k / steps);
            pts.push_back(point_from_mu(-t, ctx));
        }
        if (spin.is_integer_spin()) {
            CurvePoint origin = point_from_mu(0.0, ctx);
            if (std::abs(origin.x) > 1e-8 || origin.f > 1e-8)
                throw numerical_error("compute_curve: mu=0 ground state is not |Jx=0>",
                                      std::max(std::abs(origin.x), origin.f));
            origin.x = 0.0;
            origin.f = 0.0;
            pts.push_back(origin);
        }
    } else {
        const double edge = curve_validity_edge(spin);
        for (double xt : grid.x_targets) {
            if (!(xt >= 0.0) || xt >= 1.0)
                throw input_error("compute_curve: x targets must lie in [0,1)");
            if (xt < edge)
                throw input_error(
                    "compute_curve: x target below the half-integer validity edge " +
                    io::format_double(edge) + "; use the variational search there");
            pts.push_back(refine_point(spin, xt));
        }
    }

    // exact coherent endpoint F_J(1) = 1/2
    pts.push_back(CurvePoint{-kInf, 1.0, 0.5, kInf, kNaN});

    const double edge = curve_validity_edge(spin);
    if (!spin.is_integer_spin()) {
        std::erase_if(pts, [edge](const CurvePoint& p) { return p.x < edge; });
    }

    pts = sort_and_thin(std::move(pts), 1e-5);
    return CurveTable(spin, std::move(pts), edge);
}

CurveTable::CurveTable(Spin spin, std::vector<CurvePoint> points, double x_valid_lo)
    : spin_(spin), points_(std::move(points)), x_valid_lo_(x_valid_lo) {
    if (points_.empty()) throw input_error("CurveTable: no points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const CurvePoint& p = points_[i];
        if (!(p.x >= -1e-12 && p.x <= 1.0 + 1e-12))
            throw input_error("CurveTable: x outside [0,1]");
        if (!(p.f >= 0.0) || p.f > 0.5 + 1e-9)
            throw input_error("CurveTable: f outside [0, 1/2]");
        if (i > 0 && !(p.x > points_[i - 1].x))
            throw input_error("CurveTable: x values must be strictly increasing");
    }
    if (points_.back().x == 1.0 && std::abs(points_.back().f - 0.5) > 1e-9)
        throw numerical_error("CurveTable: f(1) differs from 1/2",
                              std::abs(points_.back().f - 0.5));
    // convexity: second divided differences bounded below
    for (std::size_t i = 2; i < points_.size(); ++i) {
        const auto &a = points_[i - 2], &b = points_[i - 1], &c = points_[i];
        const double s01 = (b.f - a.f) / (b.x - a.x);
        const double s12 = (c.f - b.f) / (c.x - b.x);
        const double dd = (s12 - s01) / (c.x - a.x);
        if (dd < -1e-7)
            throw numerical_error("CurveTable: convexity violated", dd);
    }
}

bool CurveTable::covers(double x) const {
    const double ax = std::abs(x);
    return ax >= points_.front().x - 1e-12 && ax <= points_.back().x + 1e-12;
}

double CurveTable::lower_envelope(double x) const {
    const double ax = std::abs(x);
    if (!covers(x))
        throw domain_error("lower_envelope: x=" + io::format_double(x) +
                           " outside table domain [" + io::format_double(points_.front().x) +
                           ", " + io::format_double(points_.back().x) + "] (and its mirror)");
    double best = -kInf;
    for (const CurvePoint& p : points_) {
        double t;
        if (ax == p.x)
            t = p.f;
        else if (std::isfinite(p.slope))
            t = p.f + p.slope * (ax - p.x);
        else
            continue; // vertical tangent contributes only at its own x
        best = std::max(best, t);
    }
    return std::max(0.0, best);
}

double analytic_bound_j(double j, double x) {
    const double ax = std::abs(x);
    if (ax > 1.0 + 1e-12)
        throw domain_error("analytic_bound: |x| must be <= 1");
    const double jz = std::min(ax, 1.0) * j;
    const double a = j * (j + 1.0) - jz * jz;
    // a² - jz² factored as (J-jz)(J+jz+1)(a+jz): each factor is nonnegative,
    // so the radicand cannot go negative by cancellation
    const double rad = (j - jz) * (j + jz + 1.0) * (a + jz);
    if (rad < -1e-12)
        throw domain_error("analytic_bound: negative radicand");
    return std::max(0.0, 0.5 * (a - std::sqrt(std::max(rad, 0.0))) / j);
}

double analytic_bound(const Spin& spin, double x) { return analytic_bound_j(spin.j(), x); }

CurvePoint refine_point(const Spin& spin, double x_target) {
    if (!(x_target >= 0.0) || x_target >= 1.0)
        throw input_error("refine_point: x target must lie in [0,1)");
    const CurveSolveContext ctx(spin);
    constexpr double x_tol = 1e-6;

    double t_lo = 1e-8, t_hi = 1.0;
    CurvePoint p_hi = point_from_mu(-t_hi, ctx);
    int guard = 0;
    while (p_hi.x < x_target) {
        t_hi *= 10.0;
        if (++guard > 20)
            throw numerical_error("refine_point: cannot bracket x target near 1", p_hi.x);
        p_hi = point_from_mu(-t_hi, ctx);
    }
    CurvePoint p_lo = point_from_mu(-t_lo, ctx);
    while (p_lo.x > x_target) {
        t_lo /= 10.0;
        if (++guard > 40)
            throw numerical_error("refine_point: cannot bracket x target near 0", p_lo.x);
        p_lo = point_from_mu(-t_lo, ctx);
    }
    if (std::abs(p_lo.x - x_target) <= x_tol) return p_lo;
    if (std::abs(p_hi.x - x_target) <= x_tol) return p_hi;

    CurvePoint best = (std::abs(p_lo.x - x_target) < std::abs(p_hi.x - x_target)) ? p_lo : p_hi;
    for (int it = 0; it < 200; ++it) {
        const double t_mid = std::sqrt(t_lo * t_hi);
        const CurvePoint p = point_from_mu(-t_mid, ctx);
        if (std::abs(p.x - x_target) < std::abs(best.x - x_target)) best = p;
        if (std::abs(p.x - x_target) <= x_tol) return p;
        if (p.x < x_target)
            t_lo = t_mid;
        else
            t_hi = t_mid;
        if (t_hi / t_lo < 1.0 + 1e-15) break;
    }
    if (std::abs(best.x - x_target) <= x_tol) return best;
    throw numerical_error("refine_point: bisection on mu failed to reach the x target",
                          std::abs(best.x - x_target));
}

std::string CurveGrid::canonical() const {
    std::ostringstream os;
    if (is_sweep()) {
        os << "mu-sweep:" << io::format_double(neg_mu_min) << ':'
           << io::format_double(neg_mu_max) << ':' << points_per_decade;
    } else {
        os << "x-targets:";
        for (std::size_t i = 0; i < x_targets.size(); ++i) {
            if (i) os << ',';
            os << io::format_double(x_targets[i]);
        }
    }
    return os.str();
}

std::string curve_cache_key(const Spin& spin, const CurveGrid& grid) {
    return io::fnv1a64_hex("two_j=" + std::to_string(spin.two_j()) + ";grid=" +
                           grid.canonical() + ";version=" + kVersion);
}

std::string curve_csv(const CurveTable& table, const std::vector<std::string>& meta_comments) {
    std::ostringstream os;
    for (const auto& line : meta_comments) os << "# " << line << '\n';
    os << "two_j,mu,x,f,slope\n";
    for (const CurvePoint& p : table.points()) {
        os << table.spin().two_j() << ',' << io::format_double(p.mu) << ','
           << io::format_double(p.x) << ',' << io::format_double(p.f) << ','
           << io::format_double(p.slope) << '\n';
    }
    return os.str();
}

CurveTable parse_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    int two_j = 0;
    std::vector<CurvePoint> pts;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "two_j,mu,x,f,slope")
                throw input_error("curve CSV: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto fields = io::split_csv_line(line);
        if (fields.size() != 5) throw input_error("curve CSV: expected 5 fields");
        const int tj = static_cast<int>(io::parse_double(fields[0]));
        if (pts.empty())
            two_j = tj;
        else if (tj != two_j)
            throw input_error("curve CSV: inconsistent two_j");
        CurvePoint p;
        p.mu = io::parse_double(fields[1]);
        p.x = io::parse_double(fields[2]);
        p.f = io::parse_double(fields[3]);
        p.slope = io::parse_double(fields[4]);
        p.ground_energy = kNaN;
        pts.push_back(p);
    }
    if (!header_seen || pts.empty()) throw input_error("curve CSV: no data rows");
    const Spin spin(two_j);
    return CurveTable(spin, std::move(pts), curve_validity_edge(spin));
}

CurveTable load_or_compute_curve(const Spin& spin, const CurveGrid& grid,
                                 const std::optional<std::filesystem::path>& cache_dir) {
    namespace fs = std::filesystem;
    std::optional<fs::path> path;
    if (cache_dir) {
        path = *cache_dir / ("curve_" + std::to_string(spin.two_j()) + "_" +
                             curve_cache_key(spin, grid) + ".csv");
        if (fs::exists(*path)) {
            try {
                std::ifstream in(*path, std::ios::binary);
                std::ostringstream buf;
                buf << in.rdbuf();
                CurveTable t = parse_curve_csv(buf.str());
                if (t.spin() == spin) return t;
            } catch (const error&) {
                // stale or corrupt cache entry: fall through and recompute
            }
        }
    }
    CurveTable table = compute_curve(spin, grid);
    if (path) {
        const std::vector<std::string> meta = {
            "ssq curve cache v" + std::string(kVersion),
            "two_j=" + std::to_string(spin.two_j()),
            "grid=" + grid.canonical(),
            "key=" + curve_cache_key(spin, grid),
        };
        io::atomic_write(*path, curve_csv(table, meta));
    }
    return table;
}

} // namespace ssq
