// Shared helpers for the test suites: random unitaries, statistical bounds
// and a few frequently used states.

#pragma once

#include "photonkd/core.hpp"

#include <cmath>

namespace photonkd::testing {

inline double three_sigma(double p, double n) {
    return 3.0 * std::sqrt(p * (1.0 - p) / n);
}

// Random U(2) element from four uniform angles.
inline Operator2 random_unitary2(RandomStream &rng) {
    const double theta = rng.uniform() * M_PI;
    const double a = rng.uniform() * 2.0 * M_PI;
    const double b = rng.uniform() * 2.0 * M_PI;
    const double c = rng.uniform() * 2.0 * M_PI;
    const Complex ea = std::polar(1.0, a);
    const Complex eb = std::polar(1.0, b);
    const Complex ec = std::polar(1.0, c);
    Mat2 m;
    m << ea * std::cos(theta), eb * std::sin(theta),
        -std::conj(eb) * std::sin(theta) * ec, std::conj(ea) * std::cos(theta) * ec;
    return Operator2(m);
}

inline PureState4 random_state4(RandomStream &rng) {
    Vec4 v;
    for (int i = 0; i < 4; ++i)
        v(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    return PureState4::from_unnormalized(v);
}

} // namespace photonkd::testing
