#pragma once

#include <vector>

#include "ssq/errors.hpp"

namespace ssq {

/// Spin quantum number, stored as 2J so half-integers stay exact.
/// The |J,m> basis is ordered m = J, J-1, ..., -J throughout the library.
class Spin {
  public:
    explicit Spin(int two_j) : two_j_(two_j) {
        if (two_j < 1) throw input_error("Spin: two_j must be >= 1 (J >= 1/2)");
    }

    static Spin from_two_j(int two_j) { return Spin(two_j); }

    int two_j() const { return two_j_; }
    double j() const { return 0.5 * two_j_; }
    int dimension() const { return two_j_ + 1; }
    bool is_integer_spin() const { return two_j_ % 2 == 0; }

    /// m value of basis index i (descending ordering: m(0) = J).
    double m(int i) const { return 0.5 * (two_j_ - 2 * i); }

    /// J(J+1), the Casimir eigenvalue.
    double casimir() const {
        const double jj = j();
        return jj * (jj + 1.0);
    }

    friend bool operator==(const Spin& a, const Spin& b) { return a.two_j_ == b.two_j_; }
    friend bool operator!=(const Spin& a, const Spin& b) { return !(a == b); }

  private:
    int two_j_;
};

/// Precomputed basis arrays for a given spin, shared by the moment kernels,
/// the parity-block eigensolver and the variational search.
///
/// With b_i = <m_{i+1}|J-|m_i> = sqrt(J(J+1) - m_i(m_i - 1)) the nonzero
/// matrix elements in the descending-m ordering are
///   Jx[i,i+1] = Jx[i+1,i] = b_i/2,
///   Jx2[i,i]   = (b_{i-1}^2 + b_i^2)/4,
///   Jx2[i,i+2] = b_i b_{i+1}/4.
struct BasisCoeffs {
    std::vector<double> m;        // m values, size d
    std::vector<double> m2;       // m^2, size d
    std::vector<double> lower;    // b_i, size d-1
    std::vector<double> jx2_diag; // size d
    std::vector<double> jx2_off2; // size d-2

    explicit BasisCoeffs(const Spin& spin);
};

} // namespace ssq
