#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ssq/errors.hpp"
#include "ssq/moments.hpp"
#include "ssq/operators.hpp"
#include "ssq/spin.hpp"
#include "support/random_states.hpp"

using namespace ssq;

TEST_CASE("Spin type invariants") {
    CHECK_THROWS_AS(Spin(0), input_error);
    CHECK_THROWS_AS(Spin(-3), input_error);
    CHECK(Spin(1).j() == doctest::Approx(0.5));
    CHECK(Spin(1).dimension() == 2);
    CHECK_FALSE(Spin(1).is_integer_spin());
    CHECK(Spin(2).is_integer_spin());
    CHECK(Spin(4).m(0) == doctest::Approx(2.0));
    CHECK(Spin(4).m(4) == doctest::Approx(-2.0));
}

TEST_CASE("J=1/2 operators are the Pauli matrices over 2") {
    const auto ops = build_operators(Spin(1));
    CHECK(ops.jx.entries(0, 1).real() == doctest::Approx(0.5));
    CHECK(ops.jx.entries(1, 0).real() == doctest::Approx(0.5));
    CHECK(ops.jx.entries(0, 0) == cxd(0.0, 0.0));
    CHECK(ops.jz.entries(0, 0).real() == doctest::Approx(0.5));
    CHECK(ops.jz.entries(1, 1).real() == doctest::Approx(-0.5));
    CHECK(ops.jy.entries(0, 1) == cxd(0.0, -0.5));
    CHECK(ops.jy.entries(1, 0) == cxd(0.0, 0.5));
}

TEST_CASE("J=1 ladder element and Casimir trace") {
    const auto ops = build_operators(Spin(2));
    // <m=1|Jx|m=0>: indices 0 (m=1) and 1 (m=0)
    CHECK(ops.jx.entries(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    for (int two_j : {1, 2, 3, 7, 10, 20}) {
        const Spin spin(two_j);
        const auto o = build_operators(spin);
        const Eigen::MatrixXcd cas =
            o.jx.entries * o.jx.entries + o.jy.entries * o.jy.entries + o.jz.entries * o.jz.entries;
        CHECK(std::abs(cas.trace().real() - spin.dimension() * spin.casimir()) < 1e-9);
        // Casimir is proportional to the identity
        CHECK((cas - spin.casimir() * Eigen::MatrixXcd::Identity(spin.dimension(),
                                                                 spin.dimension()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("commutators close the angular momentum algebra") {
    for (int two_j : {1, 2, 3, 7, 40, 400}) {
        const Spin spin(two_j);
        const auto o = build_operators(spin);
        const cxd i_unit(0.0, 1.0);
        const auto comm = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
            return a * b - b * a;
        };
        // product entries grow like J(J+1), so rounding scales with J
        const double tol = 1e-12 * std::max(1.0, spin.j());
        CHECK((comm(o.jx.entries, o.jy.entries) - i_unit * o.jz.entries).cwiseAbs().maxCoeff() <
              tol);
        CHECK((comm(o.jy.entries, o.jz.entries) - i_unit * o.jx.entries).cwiseAbs().maxCoeff() <
              tol);
        CHECK((comm(o.jz.entries, o.jx.entries) - i_unit * o.jy.entries).cwiseAbs().maxCoeff() <
              tol);
        CHECK(o.jx.hermiticity_defect() < 1e-12);
        CHECK(o.jy.hermiticity_defect() < 1e-12);
        CHECK(o.jx2.hermiticity_defect() < 1e-12);
    }
}

TEST_CASE("moments of reference states") {
    for (int two_j : {1, 2, 5, 20}) {
        const Spin spin(two_j);
        const auto m = moments(StateVector::coherent_up(spin));
        CHECK(m.mean_jz == doctest::Approx(spin.j()).epsilon(1e-13));
        CHECK(m.var_jx == doctest::Approx(spin.j() / 2).epsilon(1e-12));
        CHECK(m.var_jy == doctest::Approx(spin.j() / 2).epsilon(1e-12));
        CHECK(std::abs(m.var_jz) < 1e-12);
        CHECK(std::abs(m.mean_jx) < 1e-13);
        CHECK(std::abs(m.mean_jy) < 1e-13);
    }

    // (|up> + |down>)/sqrt(2) is the Jx = +1/2 eigenstate
    const Spin half(1);
    const StateVector plus = StateVector::normalized(half, {cxd(1, 0), cxd(1, 0)});
    const auto mp = moments(plus);
    CHECK(mp.mean_jx == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(mp.var_jx) < 1e-14);
    CHECK(std::abs(mp.mean_jz) < 1e-14);
}

TEST_CASE("band-kernel moments agree with dense operators") {
    std::mt19937_64 rng(42);
    for (int two_j : {1, 2, 3, 5, 12, 25}) {
        const Spin spin(two_j);
        const auto o = build_operators(spin);
        const Eigen::MatrixXcd jy2 = o.jy.entries * o.jy.entries;
        const Eigen::MatrixXcd jz2 = o.jz.entries * o.jz.entries;
        const Eigen::MatrixXcd sym_xy =
            0.5 * (o.jx.entries * o.jy.entries + o.jy.entries * o.jx.entries);
        for (int rep = 0; rep < 25; ++rep) {
            const StateVector psi = testing::random_state(spin, rng);
            const SpinMoments m = moments(psi);
            const double ex = expectation(o.jx, psi);
            const double ey = expectation(o.jy, psi);
            const double ez = expectation(o.jz, psi);
            const double ex2 = expectation(OperatorMatrix{spin, o.jx2.entries, true}, psi);
            const double ey2 = expectation(OperatorMatrix{spin, jy2, true}, psi);
            const double ez2 = expectation(OperatorMatrix{spin, jz2, true}, psi);
            const double exy = expectation(OperatorMatrix{spin, sym_xy, true}, psi);
            CHECK(m.mean_jx == doctest::Approx(ex).epsilon(1e-12));
            CHECK(m.mean_jy == doctest::Approx(ey).epsilon(1e-12));
            CHECK(m.mean_jz == doctest::Approx(ez).epsilon(1e-12));
            CHECK(std::abs(m.var_jx - (ex2 - ex * ex)) < 1e-11);
            CHECK(std::abs(m.var_jy - (ey2 - ey * ey)) < 1e-11);
            CHECK(std::abs(m.var_jz - (ez2 - ez * ez)) < 1e-11);
            CHECK(std::abs(m.cov_jxjy - (exy - ex * ey)) < 1e-11);
        }
    }
}

TEST_CASE("moments are invariant under a global phase") {
    std::mt19937_64 rng(5);
    const Spin spin(7);
    const StateVector psi = testing::random_state(spin, rng);
    auto amps = psi.amplitudes();
    const cxd phase = std::polar(1.0, 1.23456);
    for (auto& a : amps) a *= phase;
    const StateVector psi2(spin, std::move(amps));
    const SpinMoments a = moments(psi), b = moments(psi2);
    CHECK(a.mean_jx == doctest::Approx(b.mean_jx).epsilon(1e-13));
    CHECK(a.var_jx == doctest::Approx(b.var_jx).epsilon(1e-13));
    CHECK(a.mean_jz == doctest::Approx(b.mean_jz).epsilon(1e-13));
}

TEST_CASE("normalization is enforced") {
    const Spin spin(2);
    CHECK_THROWS_AS(StateVector(spin, {cxd(1, 0), cxd(1, 0), cxd(0, 0)}), normalization_error);
    CHECK_THROWS_AS(StateVector::normalized(spin, {cxd(0, 0), cxd(0, 0), cxd(0, 0)}),
                    normalization_error);
    CHECK_NOTHROW(StateVector::normalized(spin, {cxd(3, 0), cxd(0, 4), cxd(1, 1)}));
}

TEST_CASE("squeezing parameter") {
    const Spin spin(20); // J = 10
    SpinMoments coherent;
    coherent.var_jx = spin.j() / 2;
    coherent.mean_jz = spin.j();
    CHECK(squeezing_parameter(coherent, spin) == doctest::Approx(1.0));

    SpinMoments squeezed;
    squeezed.var_jx = spin.j() / 8;
    squeezed.mean_jz = spin.j();
    CHECK(squeezing_parameter(squeezed, spin) == doctest::Approx(0.5));

    SpinMoments bad;
    bad.var_jx = 1.0;
    bad.mean_jz = 0.0;
    CHECK_THROWS_AS(squeezing_parameter(bad, spin), undefined_xi_error);
}

TEST_CASE("coherent state saturates the x-y uncertainty product") {
    const auto m = moments(StateVector::coherent_up(Spin(9)));
    const auto rep = check_heisenberg(m);
    CHECK_FALSE(rep.any_violation);
    CHECK(rep.terms[0].saturated); // var_jx*var_jy == mean_jz²/4
}

TEST_CASE("random states never violate the uncertainty relation") {
    std::mt19937_64 rng(2024);
    for (int two_j : {1, 2, 7, 20}) {
        const Spin spin(two_j);
        for (int rep = 0; rep < 2500; ++rep) {
            const StateVector psi = testing::random_state(spin, rng);
            const SpinMoments m = moments(psi);
            const auto rep_h = check_heisenberg(m);
            CHECK_FALSE(rep_h.any_violation);
            const double len2 = m.mean_jx * m.mean_jx + m.mean_jy * m.mean_jy +
                                m.mean_jz * m.mean_jz;
            CHECK(len2 <= spin.casimir() + 1e-9);
        }
    }
}

TEST_CASE("|Jx=0> eigenstate of an integer spin has no violations") {
    const Spin spin(2);
    const StateVector jx0 =
        StateVector::normalized(spin, {cxd(1, 0), cxd(0, 0), cxd(-1, 0)});
    const SpinMoments m = moments(jx0);
    CHECK(std::abs(m.var_jx) < 1e-14);
    CHECK(std::abs(m.mean_jz) < 1e-14);
    CHECK_FALSE(check_heisenberg(m).any_violation);
}
