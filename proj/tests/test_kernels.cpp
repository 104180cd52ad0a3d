#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "ssq/kernels.hpp"

using namespace ssq;
namespace k = ssq::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<k::cxd> random_cvec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<k::cxd> v(n);
    for (auto& x : v) x = k::cxd(u(rng), u(rng));
    return v;
}

// reduction-order differences only: tolerance scaled by the term magnitudes
void check_close(double a, double b, double magnitude) {
    CHECK(std::abs(a - b) <= 1e-12 * (magnitude + 1.0));
}

} // namespace

TEST_CASE("scalar and avx2 kernel variants agree") {
    if (!k::avx2_available()) {
        MESSAGE("AVX2 unavailable; dispatch falls back to scalar");
        return;
    }
    const k::Ops& s = k::table(k::Isa::scalar);
    const k::Ops& a = k::table(k::Isa::avx2);
    std::mt19937_64 rng(7);

    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 127u, 1000u, 4097u}) {
        const auto x = random_vec(n, rng);
        const auto y = random_vec(n, rng);
        const auto w = random_vec(n, rng);
        const auto cx = random_cvec(n, rng);

        check_close(s.dot(x.data(), y.data(), n), a.dot(x.data(), y.data(), n), double(n));
        check_close(s.sumsq(x.data(), n), a.sumsq(x.data(), n), double(n));
        check_close(s.weighted_sumsq(w.data(), x.data(), n),
                    a.weighted_sumsq(w.data(), x.data(), n), double(n));
        check_close(s.band1_sum(w.data(), x.data(), n), a.band1_sum(w.data(), x.data(), n),
                    double(n));
        check_close(s.band2_sum(w.data(), x.data(), n), a.band2_sum(w.data(), x.data(), n),
                    double(n));
        check_close(s.csumsq(cx.data(), n), a.csumsq(cx.data(), n), 2.0 * n);
        check_close(s.cweighted_sumsq(w.data(), cx.data(), n),
                    a.cweighted_sumsq(w.data(), cx.data(), n), 2.0 * n);
        check_close(s.cband1_re(w.data(), cx.data(), n), a.cband1_re(w.data(), cx.data(), n),
                    2.0 * n);
        check_close(s.cband1_im(w.data(), cx.data(), n), a.cband1_im(w.data(), cx.data(), n),
                    2.0 * n);
        check_close(s.cband2_re(w.data(), cx.data(), n), a.cband2_re(w.data(), cx.data(), n),
                    2.0 * n);
        check_close(s.cband2_im(w.data(), cx.data(), n), a.cband2_im(w.data(), cx.data(), n),
                    2.0 * n);

        if (n >= 1) {
            std::vector<double> d = random_vec(n, rng);
            std::vector<double> e = random_vec(n > 0 ? n - 1 : 0, rng);
            std::vector<double> ys(n), ya(n);
            s.tridiag_apply(d.data(), e.data(), x.data(), ys.data(), n);
            a.tridiag_apply(d.data(), e.data(), x.data(), ya.data(), n);
            for (std::size_t i = 0; i < n; ++i) check_close(ys[i], ya[i], 3.0);
        }
    }
}

TEST_CASE("scalar kernels match naive formulas") {
    std::mt19937_64 rng(11);
    const std::size_t n = 57;
    const auto x = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    const auto c = random_cvec(n, rng);
    const k::Ops& s = k::table(k::Isa::scalar);

    double band1 = 0.0, band2 = 0.0, cre2 = 0.0, cim1 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) band1 += b[i] * x[i] * x[i + 1];
    for (std::size_t i = 0; i + 2 < n; ++i) band2 += b[i] * x[i] * x[i + 2];
    for (std::size_t i = 0; i + 2 < n; ++i) cre2 += b[i] * std::real(std::conj(c[i]) * c[i + 2]);
    for (std::size_t i = 0; i + 1 < n; ++i) cim1 += b[i] * std::imag(std::conj(c[i]) * c[i + 1]);

    CHECK(s.band1_sum(b.data(), x.data(), n) == doctest::Approx(band1).epsilon(1e-14));
    CHECK(s.band2_sum(b.data(), x.data(), n) == doctest::Approx(band2).epsilon(1e-14));
    CHECK(s.cband2_re(b.data(), c.data(), n) == doctest::Approx(cre2).epsilon(1e-13));
    CHECK(s.cband1_im(b.data(), c.data(), n) == doctest::Approx(cim1).epsilon(1e-13));
}

TEST_CASE("dispatch reports a valid ISA") {
    const char* name = k::active_name();
    CHECK((std::string(name) == "scalar" || std::string(name) == "avx2"));
    // the active table must be callable
    const double x[3] = {1.0, 2.0, 3.0};
    CHECK(k::sumsq(x, 3) == doctest::Approx(14.0));
}
