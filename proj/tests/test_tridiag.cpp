#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "ssq/errors.hpp"
#include "ssq/tridiag.hpp"

using namespace ssq;

namespace {

SymTridiag random_tridiag(std::size_t n, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    SymTridiag t;
    t.diag.resize(n);
    t.off.resize(n > 0 ? n - 1 : 0);
    for (auto& d : t.diag) d = u(rng);
    for (auto& e : t.off) e = u(rng);
    return t;
}

Eigen::MatrixXd dense_of(const SymTridiag& t) {
    const int n = static_cast<int>(t.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = t.diag[i];
    for (int i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = t.off[i];
        m(i + 1, i) = t.off[i];
    }
    return m;
}

} // namespace

TEST_CASE("2x2 closed form") {
    SymTridiag t{{1.0, 3.0}, {0.5}};
    const auto g = tridiag_ground_state(t);
    const double expected = 2.0 - std::sqrt(1.0 + 0.25);
    CHECK(g.value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(g.residual < 1e-12);
}

TEST_CASE("uniform chain has the known ground energy") {
    for (std::size_t n : {2u, 5u, 31u, 200u}) {
        SymTridiag t;
        t.diag.assign(n, 2.0);
        t.off.assign(n - 1, -1.0);
        const auto g = tridiag_ground_state(t);
        const double expected = 2.0 - 2.0 * std::cos(std::numbers::pi / (n + 1));
        CHECK(g.value == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("matches a dense eigensolver on random matrices") {
    std::mt19937_64 rng(99);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 21u, 100u, 500u}) {
        for (int rep = 0; rep < 4; ++rep) {
            const double scale = (rep % 2 == 0) ? 1.0 : 1e4;
            const SymTridiag t = random_tridiag(n, rng, scale);
            const auto g = tridiag_ground_state(t);

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_of(t));
            const double ref = es.eigenvalues()(0);
            CHECK(std::abs(g.value - ref) < 1e-12 * std::max(1.0, scale * 3));
            CHECK(g.residual <= 1e-10 * std::max(1.0, scale * 3));

            Eigen::Map<const Eigen::VectorXd> v(g.vector.data(), n);
            const double overlap = std::abs(v.dot(es.eigenvectors().col(0)));
            CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("Sturm count partitions the spectrum") {
    std::mt19937_64 rng(3);
    const SymTridiag t = random_tridiag(40, rng, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_of(t));
    for (double sigma : {-3.0, -1.0, 0.0, 0.5, 2.5}) {
        int expected = 0;
        for (int i = 0; i < 40; ++i)
            if (es.eigenvalues()(i) < sigma) ++expected;
        CHECK(tridiag_count_below(t, sigma) == expected);
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(tridiag_ground_state(SymTridiag{{}, {}}), input_error);
    CHECK_THROWS_AS(tridiag_ground_state(SymTridiag{{1.0, 2.0}, {}}), input_error);
    const auto g = tridiag_ground_state(SymTridiag{{4.0}, {}});
    CHECK(g.value == doctest::Approx(4.0));
    CHECK(g.vector.size() == 1);
}
