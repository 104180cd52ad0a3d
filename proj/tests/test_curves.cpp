#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ssq/csv.hpp"
#include "ssq/curves.hpp"
#include "ssq/errors.hpp"
#include "ssq/moments.hpp"

using namespace ssq;
namespace fs = std::filesystem;

namespace {

// analytic frontier for J=1 (oracle)
double f1_closed(double x) { return 0.5 * (1.0 - std::sqrt(1.0 - x * x)); }

fs::path temp_dir(const char* tag) {
    const fs::path p = fs::temp_directory_path() / (std::string("ssq_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("ground_state_of limits") {
    // mu -> -inf: Jz term dominates, state -> |Jz=J>
    const auto far = ground_state_of(-1e6, Spin(2));
    const auto mf = moments(far.state);
    CHECK(mf.mean_jz == doctest::Approx(1.0).epsilon(1e-9));

    // mu = 0, integer spin: |Jx=0> with zero variance and zero mean spin
    const auto zero = ground_state_of(0.0, Spin(2));
    const auto mz = moments(zero.state);
    CHECK(std::abs(mz.var_jx) < 1e-12);
    CHECK(std::abs(mz.mean_jz) < 1e-12);
    CHECK(std::abs(zero.energy) < 1e-12);

    CHECK_THROWS_AS(ground_state_of(std::numeric_limits<double>::infinity(), Spin(2)),
                    input_error);
}

TEST_CASE("ground states have exact parity symmetry <Jx>=<Jy>=0") {
    for (double mu : {-1e-3, -0.3, -7.0, -500.0}) {
        for (int two_j : {2, 3, 8, 41}) {
            const auto g = ground_state_of(mu, Spin(two_j));
            const auto m = moments(g.state);
            CHECK(std::abs(m.mean_jx) < 1e-8);
            CHECK(std::abs(m.mean_jy) < 1e-8);
        }
    }
}

TEST_CASE("J=1 sweep reproduces the closed form") {
    const CurveTable table = compute_curve(Spin(2));
    CHECK(table.points().size() > 100);
    for (const auto& p : table.points()) {
        CHECK(std::abs(p.f - f1_closed(p.x)) < 1e-9);
    }
    CHECK(table.points().back().x == 1.0);
    CHECK(table.points().back().f == doctest::Approx(0.5));
    CHECK(table.points().front().x == 0.0);
    CHECK(table.points().front().f == 0.0);
}

TEST_CASE("curve energies are consistent with the moments") {
    const CurveTable table = compute_curve(Spin(4), CurveGrid{1e-2, 1e2, 10, {}});
    const double j = 2.0;
    for (const auto& p : table.points()) {
        if (!std::isfinite(p.mu)) continue;
        // E = mu*<Jz> + <Jx^2> for the eigenstate
        CHECK(p.ground_energy ==
              doctest::Approx(p.mu * p.x * j + p.f * j).epsilon(1e-10));
    }
}

TEST_CASE("J=1/2 table degenerates to the coherent point") {
    const CurveTable table = compute_curve(Spin(1));
    REQUIRE(table.points().size() == 1);
    CHECK(table.points()[0].x == 1.0);
    CHECK(table.points()[0].f == doctest::Approx(0.5));
    CHECK(table.x_valid_lo() == 1.0);
}

TEST_CASE("larger integer spins squeeze harder") {
    const CurvePoint p10 = refine_point(Spin(20), 0.9);
    CHECK(std::abs(p10.x - 0.9) <= 1e-6);
    CHECK(p10.f < f1_closed(0.9));

    const CurvePoint p1 = refine_point(Spin(2), 0.9);
    CHECK(p1.f == doctest::Approx(f1_closed(p1.x)).epsilon(1e-9));
    CHECK(p10.f < p1.f);
}

TEST_CASE("half-integer tables keep only the certified regime") {
    const CurveTable t = compute_curve(Spin(3));
    CHECK(t.x_valid_lo() == doctest::Approx(0.88));
    for (const auto& p : t.points()) CHECK(p.x >= 0.88);
    CHECK(t.points().back().x == 1.0);
    // below the edge the x-target mode refuses
    CurveGrid grid;
    grid.x_targets = {0.5};
    CHECK_THROWS_AS(compute_curve(Spin(3), grid), input_error);
}

TEST_CASE("analytic bound") {
    CHECK(analytic_bound(Spin(2), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(analytic_bound(Spin(7), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(analytic_bound(Spin(2), 0.0) == doctest::Approx(0.0));
    // frozen from direct arithmetic evaluation of the closed form
    CHECK(analytic_bound(Spin(2), 0.6) ==
          doctest::Approx(0.056848638866443424).epsilon(1e-12));
    CHECK(analytic_bound(Spin(2), 0.6) < f1_closed(0.6));
    CHECK(analytic_bound(Spin(2), -0.6) == analytic_bound(Spin(2), 0.6));
    CHECK_THROWS_AS(analytic_bound(Spin(2), 1.5), domain_error);
}

TEST_CASE("tangent envelope evaluation") {
    const CurveTable table = compute_curve(Spin(2));
    // at a tabulated x the tangent at that point dominates
    const auto& mid = table.points()[table.points().size() / 2];
    CHECK(table.lower_envelope(mid.x) == doctest::Approx(mid.f).epsilon(1e-12));
    // between grid points: below the curve but within 1e-4 of it
    for (double x : {0.123456, 0.4711, 0.81234, 0.97531}) {
        const double env = table.lower_envelope(x);
        CHECK(env <= f1_closed(x) + 1e-12);
        CHECK(env >= f1_closed(x) - 1e-4);
        CHECK(env >= analytic_bound(Spin(2), x) - 1e-9);
    }
    // symmetry F(-x) = F(x)
    CHECK(table.lower_envelope(-0.5) == table.lower_envelope(0.5));
    // endpoint
    CHECK(table.lower_envelope(1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(table.lower_envelope(1.5), domain_error);

    const CurveTable half = compute_curve(Spin(3));
    CHECK_THROWS_AS(half.lower_envelope(0.5), domain_error);
    CHECK(half.lower_envelope(0.95) > 0.0);
}

TEST_CASE("chord slopes are bracketed by the tangent slopes") {
    const CurveTable table = compute_curve(Spin(6), CurveGrid{1e-3, 1e3, 12, {}});
    const auto& pts = table.points();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!std::isfinite(pts[i + 1].slope)) continue; // endpoint has a vertical tangent
        const double chord = (pts[i + 1].f - pts[i].f) / (pts[i + 1].x - pts[i].x);
        CHECK(chord >= pts[i].slope - 1e-7);
        CHECK(chord <= pts[i + 1].slope + 1e-7);
    }
}

TEST_CASE("convexity holds across computed tables") {
    for (int two_j : {2, 4, 20}) {
        const CurveTable table = compute_curve(Spin(two_j));
        const auto& p = table.points();
        for (std::size_t i = 2; i < p.size(); ++i) {
            const double s01 = (p[i - 1].f - p[i - 2].f) / (p[i - 1].x - p[i - 2].x);
            const double s12 = (p[i].f - p[i - 1].f) / (p[i].x - p[i - 1].x);
            CHECK((s12 - s01) / (p[i].x - p[i - 2].x) >= -1e-7);
        }
    }
}

TEST_CASE("refine_point hits x targets") {
    for (double xt : {0.05, 0.5, 0.99}) {
        const CurvePoint p = refine_point(Spin(10), xt);
        CHECK(std::abs(p.x - xt) <= 1e-6);
        CHECK(p.slope == -p.mu);
    }
    CHECK_THROWS_AS(refine_point(Spin(10), 1.0), input_error);
}

TEST_CASE("curve CSV round-trips exactly") {
    const CurveTable table = compute_curve(Spin(5), CurveGrid{1e-2, 1e2, 8, {}});
    const std::string text = curve_csv(table, {"test meta line"});
    const CurveTable back = parse_curve_csv(text);
    REQUIRE(back.points().size() == table.points().size());
    for (std::size_t i = 0; i < table.points().size(); ++i) {
        CHECK(back.points()[i].x == table.points()[i].x);
        CHECK(back.points()[i].f == table.points()[i].f);
        CHECK(back.points()[i].mu == table.points()[i].mu);
        CHECK(back.points()[i].slope == table.points()[i].slope);
    }
    CHECK(back.spin() == table.spin());
    CHECK_THROWS_AS(parse_curve_csv("garbage"), input_error);
}

TEST_CASE("disk cache: warm load equals cold compute") {
    const fs::path dir = temp_dir("curvecache");
    const CurveGrid grid{1e-2, 1e2, 6, {}};
    const CurveTable cold = load_or_compute_curve(Spin(4), grid, dir);
    const fs::path file =
        dir / ("curve_4_" + curve_cache_key(Spin(4), grid) + ".csv");
    REQUIRE(fs::exists(file));
    std::ifstream in(file);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const CurveTable warm = load_or_compute_curve(Spin(4), grid, dir);
    REQUIRE(warm.points().size() == cold.points().size());
    for (std::size_t i = 0; i < warm.points().size(); ++i)
        CHECK(warm.points()[i].f == cold.points()[i].f);

    // corrupt entry falls back to a recompute
    {
        std::ofstream out(file);
        out << "two_j,mu,x,f,slope\nnot,a,valid,row,here\n";
    }
    const CurveTable healed = load_or_compute_curve(Spin(4), grid, dir);
    CHECK(healed.points().size() == cold.points().size());
    fs::remove_all(dir);
}

TEST_CASE("cache keys separate spins, grids and versions") {
    const CurveGrid a{1e-4, 1e4, 50, {}};
    const CurveGrid b{1e-4, 1e4, 25, {}};
    CurveGrid c;
    c.x_targets = {0.5};
    CHECK(curve_cache_key(Spin(2), a) != curve_cache_key(Spin(4), a));
    CHECK(curve_cache_key(Spin(2), a) != curve_cache_key(Spin(2), b));
    CHECK(curve_cache_key(Spin(2), a) != curve_cache_key(Spin(2), c));
}
