#pragma once

#include <cmath>
#include <complex>

#include "dche/errors.hpp"

namespace dche {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Tolerance bundle shared by the solver stages. All values strictly positive.
struct Tolerances {
    double ode_rel = 1e-12;         ///< relative local error of the path integrator
    double ode_abs = 1e-14;         ///< absolute local error of the path integrator
    double newton_tol = 1e-13;      ///< stopping threshold of the index/coefficient iteration
    double series_tail_tol = 1e-16; ///< relative size below which series tails count as negligible
    double onray_angle_tol = 1e-12; ///< angular tolerance (radians) for Stokes-ray detection

    void check() const {
        if (ode_rel <= 0 || ode_abs <= 0 || newton_tol <= 0 || series_tail_tol <= 0 ||
            onray_angle_tol <= 0)
            throw Error("tolerances must be strictly positive");
    }
};

/// Which half-open interval the complex argument is taken in.
/// The exponent labels at infinity use [-pi, pi); everything tied to the
/// principal sheet of z, and the labels at the origin, use (-pi, pi].
enum class ArgConvention {
    lower_closed, ///< arg in [-pi, pi)
    upper_closed, ///< arg in (-pi, pi]
};

/// Argument of z in the requested convention.
inline double arg_in(const complex& z, ArgConvention conv) {
    double a = std::arg(z); // libm: (-pi, pi], but -pi can appear for im = -0.0
    if (conv == ArgConvention::lower_closed) {
        if (a == pi) a = -pi;
    } else {
        if (a == -pi) a = pi;
    }
    return a;
}

/// z^e with the branch of arg z fixed by `conv`. Requires z != 0.
inline complex branch_power(const complex& z, const complex& e, ArgConvention conv) {
    const complex log_z(std::log(std::abs(z)), arg_in(z, conv));
    return std::exp(e * log_z);
}

} // namespace dche
