#pragma once

#include <random>

#include "dche/params.hpp"
#include "dche/types.hpp"

namespace testsupport {

using dche::complex;

// Independent log-gamma oracle: Stirling's series with Bernoulli-number
// corrections after shifting the argument by 30, carried in long double so
// the oracle noise stays well under the library's 1e-13 contract.
// Deliberately unrelated to the rational approximation used by the library.
inline complex gamma_oracle(const complex& zd) {
    using cld = std::complex<long double>;
    constexpr long double b[] = {1.0L / 12.0L,        -1.0L / 360.0L, 1.0L / 1260.0L,
                                 -1.0L / 1680.0L,     1.0L / 1188.0L, -691.0L / 360360.0L,
                                 1.0L / 156.0L},
                          ln2pi = 1.83787706640934548356065947281L;
    cld z(zd.real(), zd.imag());
    cld shift(0.0L, 0.0L);
    for (int k = 0; k < 30; ++k) {
        shift += std::log(z);
        z += 1.0L;
    }
    cld s = (z - 0.5L) * std::log(z) - z + 0.5L * ln2pi;
    cld zp = z;
    for (long double bk : b) {
        s += bk / zp;
        zp *= z * z;
    }
    const cld g = std::exp(s - shift);
    return {static_cast<double>(g.real()), static_cast<double>(g.imag())};
}

// Deterministic non-degenerate parameter draw with |A_p| in [lo, hi].
inline dche::DcheParams random_params(std::mt19937& rng, double lo = 0.25, double hi = 1.1) {
    std::uniform_real_distribution<double> mag(lo, hi);
    std::uniform_real_distribution<double> phase(-dche::pi, dche::pi);
    dche::DcheParams p;
    for (int q = -2; q <= 2; ++q) p.a(q) = std::polar(mag(rng), phase(rng));
    return p;
}

inline complex random_unit(std::mt19937& rng) {
    std::uniform_real_distribution<double> phase(-dche::pi, dche::pi);
    return std::polar(1.0, phase(rng));
}

} // namespace testsupport
