#pragma once

#include <vector>

namespace ssq {

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
};

struct TridiagGround {
    double value = 0.0;            // smallest eigenvalue
    std::vector<double> vector;    // unit eigenvector, largest entry positive
    double residual = 0.0;         // ||T v - value*v||_2
};

/// Smallest eigenpair of a symmetric tridiagonal matrix: Sturm-sequence
/// bisection for the eigenvalue, then shifted inverse iteration (Rayleigh
/// refinement on stagnation) for the eigenvector.
///
/// rel_tol bounds the residual relative to the matrix scale:
///   ||T v - lambda v|| <= rel_tol * max(1, ||T||_inf).
/// Throws numerical_error (carrying the achieved residual) on non-convergence.
TridiagGround tridiag_ground_state(const SymTridiag& t, double rel_tol = 1e-10);

/// Number of eigenvalues strictly below sigma (Sturm count).
int tridiag_count_below(const SymTridiag& t, double sigma);

} // namespace ssq
