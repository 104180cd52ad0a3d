#include "ssq/operators.hpp"

#include <cmath>

#include "ssq/errors.hpp"

namespace ssq {

double OperatorMatrix::hermiticity_defect() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

AngularMomentumOps build_operators(const Spin& spin) {
    const int d = spin.dimension();
    const BasisCoeffs basis(spin);

    Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) jz(i, i) = basis.m[i];

    Eigen::MatrixXcd jx = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) {
        const double half_b = 0.5 * basis.lower[i];
        jx(i, i + 1) = half_b;
        jx(i + 1, i) = half_b;
        // J- lowers m: row i+1, col i carries +i*b/2, the adjoint entry -i*b/2
        jy(i + 1, i) = cxd(0.0, half_b);
        jy(i, i + 1) = cxd(0.0, -half_b);
    }

    AngularMomentumOps ops{
        OperatorMatrix{spin, jx, true},
        OperatorMatrix{spin, jy, true},
        OperatorMatrix{spin, jz, true},
        OperatorMatrix{spin, jx * jx, true},
    };
    return ops;
}

double expectation(const OperatorMatrix& op, const StateVector& state) {
    const int d = state.dimension();
    if (op.spin != state.spin())
        throw input_error("expectation: operator and state have different spins");
    Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(), d);
    const cxd value = psi.dot(op.entries * psi); // Eigen's dot conjugates the left factor
    if (op.hermitian && std::abs(value.imag()) > 1e-10)
        throw numerical_error("expectation: imaginary residue above 1e-10 for hermitian operator",
                              std::abs(value.imag()));
    return value.real();
}

} // namespace ssq
