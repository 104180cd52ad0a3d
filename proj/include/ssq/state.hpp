#pragma once

#include <complex>
#include <vector>

#include "ssq/spin.hpp"

namespace ssq {

using cxd = std::complex<double>;

/// Normalized state over the |J,m> basis, amplitudes indexed m = J ... -J.
class StateVector {
  public:
    /// Requires amplitudes already normalized: | ||a||^2 - 1 | <= 1e-12.
    StateVector(Spin spin, std::vector<cxd> amplitudes);

    /// Scales the amplitudes to unit norm (errors only on the zero vector).
    static StateVector normalized(Spin spin, std::vector<cxd> amplitudes);
    static StateVector normalized_real(Spin spin, const std::vector<double>& amplitudes);

    /// The coherent state |Jz = J>.
    static StateVector coherent_up(Spin spin);

    const Spin& spin() const { return spin_; }
    int dimension() const { return static_cast<int>(amps_.size()); }
    const std::vector<cxd>& amplitudes() const { return amps_; }
    const cxd& operator[](int i) const { return amps_[i]; }

    double norm2() const;

  private:
    Spin spin_;
    std::vector<cxd> amps_;
};

} // namespace ssq
