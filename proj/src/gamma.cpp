#include "dche/gamma.hpp"

#include <array>

namespace dche {

namespace {

// Rational (Lanczos-type) approximation, g = 607/128, 15 terms.
// Coefficients frozen; accuracy is pinned by tests against an independent
// Stirling-series oracle and the classical functional equations.
constexpr double kLanczosG = 4.7421875; // 607/128
constexpr std::array<double, 15> kLanczosC = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

bool is_nonpositive_integer(const complex& s) {
    return s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real());
}

// Valid for Re s >= 1/2.
complex lanczos_right_half(const complex& s) {
    const complex x = s - 1.0;
    complex acc(kLanczosC[0], 0.0);
    for (std::size_t k = 1; k < kLanczosC.size(); ++k)
        acc += kLanczosC[k] / (x + static_cast<double>(k));
    const complex t = x + kLanczosG + 0.5;
    return std::sqrt(2.0 * pi) * std::exp((x + 0.5) * std::log(t) - t) * acc;
}

} // namespace

complex complex_gamma(const complex& s) {
    if (is_nonpositive_integer(s))
        throw PoleOfGamma("gamma pole at non-positive integer");
    if (s.real() >= 0.5) return lanczos_right_half(s);
    // Reflection: Gamma(s) Gamma(1-s) = pi / sin(pi s).
    return pi / (std::sin(pi * s) * lanczos_right_half(1.0 - s));
}

complex reciprocal_gamma(const complex& s) {
    if (is_nonpositive_integer(s)) return {0.0, 0.0};
    return 1.0 / complex_gamma(s);
}

} // namespace dche
