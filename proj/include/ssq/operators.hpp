#pragma once

#include <Eigen/Dense>

#include "ssq/spin.hpp"
#include "ssq/state.hpp"

namespace ssq {

/// Dense operator in the |J,m> basis (m = J ... -J ordering).
struct OperatorMatrix {
    Spin spin;
    Eigen::MatrixXcd entries;
    bool hermitian = false;

    /// Max |A - A^dagger| entry; 0 for exactly hermitian storage.
    double hermiticity_defect() const;
};

struct AngularMomentumOps {
    OperatorMatrix jx;
    OperatorMatrix jy;
    OperatorMatrix jz;
    OperatorMatrix jx2; // exact matrix square of jx
};

/// Jz diagonal with entries m; Jx = (J+ + J-)/2 and Jy = (J+ - J-)/2i from
/// the ladder elements <m±1|J±|m> = sqrt(J(J+1) - m(m±1)); Jx² as the matrix
/// square of Jx.
AngularMomentumOps build_operators(const Spin& spin);

/// <psi|A|psi>. Checks that the imaginary residue of a hermitian expectation
/// stays below 1e-10 before discarding it.
double expectation(const OperatorMatrix& op, const StateVector& state);

} // namespace ssq
