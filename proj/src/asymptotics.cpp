#include "dche/asymptotics.hpp"

#include <algorithm>
#include <limits>

namespace dche {

namespace {

constexpr double kRatioFloor = 1e-290;

bool in_window_infinity(double arg_alpha) {
    // Window of label 4: arg in [-pi/2, pi/2), arg measured in [-pi, pi).
    return arg_alpha >= -pi / 2.0 && arg_alpha < pi / 2.0;
}

bool in_window_origin(double arg_beta) {
    // Label 6: arg in (-pi/2, pi/2], arg measured in (-pi, pi].
    return arg_beta > -pi / 2.0 && arg_beta <= pi / 2.0;
}

double ldexp_clamped(double x, long e) {
    if (x == 0.0) return 0.0;
    if (e > 4000) return x > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    if (e < -4000) return 0.0;
    return std::ldexp(x, static_cast<int>(e));
}

} // namespace

void ScaledComplex::normalize() {
    const double m = std::max(std::abs(mant.real()), std::abs(mant.imag()));
    if (m == 0.0) {
        e2 = 0;
        return;
    }
    int ex = 0;
    std::frexp(m, &ex);
    mant = complex(std::ldexp(mant.real(), -ex), std::ldexp(mant.imag(), -ex));
    e2 += ex;
}

complex ScaledComplex::times(const complex& k) const {
    const complex p = mant * k;
    return {ldexp_clamped(p.real(), e2), ldexp_clamped(p.imag(), e2)};
}

complex ScaledComplex::product(const ScaledComplex& a, const ScaledComplex& b) {
    const complex p = a.mant * b.mant;
    const long e = a.e2 + b.e2;
    return {ldexp_clamped(p.real(), e), ldexp_clamped(p.imag(), e)};
}

const std::vector<complex>& FormalSolutionInfinity::ratio_chain() const {
    if (breakdown) throw RatioBreakdown("ratio chain undefined: a coefficient vanishes");
    return ratios;
}

const std::vector<complex>& FormalSolutionOrigin::ratio_chain() const {
    if (breakdown) throw RatioBreakdown("ratio chain undefined: a coefficient vanishes");
    return ratios;
}

FormalCoefficientStream::FormalCoefficientStream(const std::vector<complex>& ratios,
                                                 bool breakdown,
                                                 const std::vector<ScaledComplex>& raw)
    : ratios_(&ratios),
      raw_(&raw),
      breakdown_(breakdown),
      max_m_(breakdown ? static_cast<int>(raw.size()) - 1 : static_cast<int>(ratios.size())) {
    if (breakdown_ && !raw_->empty()) cur_ = (*raw_)[0];
}

void FormalCoefficientStream::advance() {
    if (m_ >= max_m_) throw Error("coefficient stream exhausted");
    ++m_;
    if (breakdown_) {
        cur_ = (*raw_)[static_cast<std::size_t>(m_)];
    } else {
        cur_.mant *= (*ratios_)[static_cast<std::size_t>(m_ - 1)];
        cur_.normalize();
    }
}

std::pair<FormalSolutionInfinity, FormalSolutionInfinity> exponents_at_infinity(
    const DcheParams& a) {
    if (std::abs(a.a(2)) == 0.0) throw DegenerateEquation("exponents_at_infinity: A_2 = 0");
    const complex root = std::sqrt(-a.a(2));

    FormalSolutionInfinity f3, f4;
    f3.label = 3;
    f4.label = 4;
    if (in_window_infinity(arg_in(root, ArgConvention::lower_closed))) {
        f4.alpha = root;
        f3.alpha = -root;
    } else {
        f4.alpha = -root;
        f3.alpha = root;
    }
    f3.mu = -a.a(1) / (2.0 * f3.alpha);
    f4.mu = -a.a(1) / (2.0 * f4.alpha);
    return {f3, f4};
}

std::pair<FormalSolutionOrigin, FormalSolutionOrigin> exponents_at_origin(const DcheParams& a) {
    if (std::abs(a.a(-2)) == 0.0) throw DegenerateEquation("exponents_at_origin: A_-2 = 0");
    const complex root = std::sqrt(-a.a(-2));

    FormalSolutionOrigin f5, f6;
    f5.label = 5;
    f6.label = 6;
    if (in_window_origin(arg_in(root, ArgConvention::upper_closed))) {
        f6.beta = root;
        f5.beta = -root;
    } else {
        f6.beta = -root;
        f5.beta = root;
    }
    f5.rho = 1.0 + a.a(-1) / (2.0 * f5.beta);
    f6.rho = 1.0 + a.a(-1) / (2.0 * f6.beta);
    return {f5, f6};
}

namespace {

// Raw coefficients of either recurrence in scaled form:
//   2 s m k_m = [(poly(m)) + A_0] k_{m-1} + Ap1 k_{m-2} + Ap2 k_{m-3}
// with poly(m) = (m-mu)(m-1-mu) at infinity, (m-1+rho)(m-2+rho) at the origin.
template <typename PolyFn>
std::vector<ScaledComplex> raw_coefficients(const complex& two_s, const complex& a0,
                                            const complex& ap1, const complex& ap2, int count,
                                            PolyFn poly) {
    std::vector<ScaledComplex> raw(static_cast<std::size_t>(count) + 1);
    raw[0] = {complex(1.0, 0.0), 0};
    for (int m = 1; m <= count; ++m) {
        const long e_base = raw[static_cast<std::size_t>(m - 1)].e2;
        complex acc = (poly(m) + a0) * raw[static_cast<std::size_t>(m - 1)].mant;
        if (m >= 2) {
            const ScaledComplex& k2 = raw[static_cast<std::size_t>(m - 2)];
            acc += ap1 * complex(ldexp_clamped(k2.mant.real(), k2.e2 - e_base),
                                 ldexp_clamped(k2.mant.imag(), k2.e2 - e_base));
        }
        if (m >= 3) {
            const ScaledComplex& k3 = raw[static_cast<std::size_t>(m - 3)];
            acc += ap2 * complex(ldexp_clamped(k3.mant.real(), k3.e2 - e_base),
                                 ldexp_clamped(k3.mant.imag(), k3.e2 - e_base));
        }
        ScaledComplex next{acc / (two_s * static_cast<double>(m)), e_base};
        next.normalize();
        raw[static_cast<std::size_t>(m)] = next;
    }
    return raw;
}

// Derives the ratio chain from scaled raw coefficients; false when undefined.
bool ratios_from_raw(const std::vector<ScaledComplex>& raw, std::vector<complex>& out) {
    out.clear();
    out.reserve(raw.size() - 1);
    for (std::size_t m = 1; m < raw.size(); ++m) {
        if (raw[m - 1].is_zero()) return false;
        const complex q_mant = raw[m].mant / raw[m - 1].mant;
        const double q_re = ldexp_clamped(q_mant.real(), raw[m].e2 - raw[m - 1].e2);
        const double q_im = ldexp_clamped(q_mant.imag(), raw[m].e2 - raw[m - 1].e2);
        const complex q(q_re, q_im);
        if (!std::isfinite(q_re) || !std::isfinite(q_im) || std::abs(q) < kRatioFloor)
            return false;
        out.push_back(q);
    }
    return true;
}

} // namespace

void coefficient_ratios_infinity(const DcheParams& a, FormalSolutionInfinity& f, int count) {
    if (count < 3) throw Error("coefficient_ratios_infinity: count must be at least 3");
    const complex mu = f.mu;
    std::vector<ScaledComplex> raw =
        raw_coefficients(2.0 * f.alpha, a.a(0), a.a(-1), a.a(-2), count, [mu](int m) {
            const double md = static_cast<double>(m);
            return (md - mu) * (md - 1.0 - mu);
        });
    f.breakdown = !ratios_from_raw(raw, f.ratios);
    if (f.breakdown) {
        f.ratios.clear();
        f.raw = std::move(raw);
    } else {
        f.raw.clear();
    }
}

void coefficient_ratios_origin(const DcheParams& a, FormalSolutionOrigin& f, int count) {
    if (count < 3) throw Error("coefficient_ratios_origin: count must be at least 3");
    const complex rho = f.rho;
    std::vector<ScaledComplex> raw =
        raw_coefficients(2.0 * f.beta, a.a(0), a.a(1), a.a(2), count, [rho](int m) {
            const double md = static_cast<double>(m);
            return (md - 1.0 + rho) * (md - 2.0 + rho);
        });
    f.breakdown = !ratios_from_raw(raw, f.ratios);
    if (f.breakdown) {
        f.ratios.clear();
        f.raw = std::move(raw);
    } else {
        f.raw.clear();
    }
}

namespace {

// Optimal truncation: sum until the first term-magnitude increase.
template <typename Formal>
AsymptoticValue sum_to_smallest_term(const Formal& f, const complex& prefactor,
                                     const complex& z_factor) {
    FormalCoefficientStream coeffs = coefficient_stream(f);
    ScaledComplex zpow{complex(1.0, 0.0), 0};

    complex sum(1.0, 0.0);
    double prev_mag = 1.0;
    int used = 1;
    double omitted = 0.0;
    double last_ratio_mag = 0.0;
    while (coeffs.m() < coeffs.max_m()) {
        coeffs.advance();
        zpow.mant *= z_factor;
        zpow.normalize();
        const complex term = ScaledComplex::product(coeffs.current(), zpow);
        const double mag = std::abs(term);
        if (!(mag < prev_mag)) {
            if (coeffs.m() == 1)
                throw NoDecreasingTerm("asymptotic series grows from the first term");
            omitted = mag;
            break;
        }
        last_ratio_mag = (prev_mag > 0.0) ? mag / prev_mag : 0.0;
        sum += term;
        prev_mag = mag;
        ++used;
        if (coeffs.m() == coeffs.max_m()) omitted = mag * last_ratio_mag;
    }
    return {prefactor * sum, omitted * std::abs(prefactor), used};
}

} // namespace

AsymptoticValue evaluate_asymptotic(const FormalSolutionInfinity& f, const complex& z,
                                    ArgConvention conv) {
    if (std::abs(z) == 0.0) throw Error("evaluate_asymptotic: z = 0");
    const complex prefactor = std::exp(f.alpha * z) * branch_power(z, f.mu, conv);
    return sum_to_smallest_term(f, prefactor, 1.0 / z);
}

AsymptoticValue evaluate_asymptotic(const FormalSolutionOrigin& f, const complex& z,
                                    ArgConvention conv) {
    if (std::abs(z) == 0.0) throw Error("evaluate_asymptotic: z = 0");
    const complex prefactor = std::exp(f.beta / z) * branch_power(z, f.rho, conv);
    return sum_to_smallest_term(f, prefactor, z);
}

} // namespace dche
