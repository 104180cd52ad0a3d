#pragma once

#include <complex>
#include <random>
#include <vector>

#include "ssq/spin.hpp"
#include "ssq/state.hpp"

namespace ssq::testing {

inline StateVector random_state(const Spin& spin, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cxd> amps(spin.dimension());
    for (auto& a : amps) a = cxd(gauss(rng), gauss(rng));
    return StateVector::normalized(spin, std::move(amps));
}

inline StateVector random_real_state(const Spin& spin, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> amps(spin.dimension());
    for (auto& a : amps) a = gauss(rng);
    return StateVector::normalized_real(spin, amps);
}

} // namespace ssq::testing
