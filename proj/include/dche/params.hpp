#pragma once

#include <array>
#include <string>
#include <utility>

#include "dche/types.hpp"

namespace dche {

/// Coefficients B_p, p = -2..2, of the normal form
/// (z d/dz)^2 y + (sum_p B_p z^p) y = 0.
struct NormalFormParams {
    std::array<complex, 5> B{}; // index i holds B_{i-2}

    complex& b(int p) { return B[static_cast<std::size_t>(p + 2)]; }
    const complex& b(int p) const { return B[static_cast<std::size_t>(p + 2)]; }
};

/// Coefficients A_p, p = -2..2, of the working form
/// z^2 w'' + (sum_p A_p z^p) w = 0. Non-degenerate means A_2 * A_-2 != 0.
struct DcheParams {
    std::array<complex, 5> A{}; // index i holds A_{i-2}

    complex& a(int p) { return A[static_cast<std::size_t>(p + 2)]; }
    const complex& a(int p) const { return A[static_cast<std::size_t>(p + 2)]; }

    double abs_sum() const {
        double s = 0.0;
        for (const complex& c : A) s += std::abs(c);
        return s;
    }
};

/// The four parameters of the Jaffe-Lay form on t with singular points t = +-1.
struct JaffeLayParams {
    complex alpha;
    complex beta;
    complex gamma;
    complex delta;
};

/// Radial Schroedinger problem in the dimensionless variable z = r/r0.
/// v holds the potential strengths that map directly onto A_-2, A_-1, A_0, A_1;
/// the 1/r^2 strength is given net of the centrifugal term l(l+1), which
/// cancels by construction. energy is the A_2 value.
struct RadialProblem {
    int l = 0;
    std::array<complex, 4> v{};
    complex energy;
};

/// Returns the params unchanged iff A_2 * A_-2 != 0, else throws
/// DegenerateEquation.
const DcheParams& validate(const DcheParams& a);

DcheParams from_normal_form(const NormalFormParams& b);
NormalFormParams to_normal_form(const DcheParams& a);

DcheParams from_jaffe_lay(const JaffeLayParams& j);

/// Maps a point t (|t| < 1, t != +-1) of the Jaffe-Lay variable to
/// (z, prefactor) with z = (1+t)/(1-t) and y(t) = prefactor * w(z).
std::pair<complex, complex> jaffe_lay_point_map(const complex& t, const JaffeLayParams& j);

DcheParams from_radial(const RadialProblem& r);

/// JSON object form {"A": [[re,im] x5]} ordered p = -2..2.
std::string params_to_json(const DcheParams& a);
DcheParams params_from_json(const std::string& text);

} // namespace dche
