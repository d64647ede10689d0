#pragma once

#include <utility>
#include <vector>

#include "dche/params.hpp"
#include "dche/types.hpp"

namespace dche {

/// Complex number with a separate power-of-two exponent, used to carry the
/// factorially growing asymptotic coefficients without overflow.
struct ScaledComplex {
    complex mant{0.0, 0.0};
    long e2 = 0;

    void normalize();
    /// a * k materialized as a plain complex (saturates to inf when huge,
    /// flushes to zero when tiny).
    complex times(const complex& k) const;
    bool is_zero() const { return mant == complex(0.0, 0.0); }

    static complex product(const ScaledComplex& a, const ScaledComplex& b);
};

/// Formal solution exp(alpha z) z^mu sum_m a_m z^-m at infinity. The primary
/// stored form is the chain of successive ratios a_m / a_{m-1} (a_0 = 1);
/// when some coefficient vanishes the chain is undefined and the raw
/// coefficients are kept in scaled form instead.
struct FormalSolutionInfinity {
    complex alpha;
    complex mu;
    std::vector<complex> ratios; // ratios[m-1] = a_m / a_{m-1}; empty on breakdown
    bool breakdown = false;
    std::vector<ScaledComplex> raw; // raw[m] = a_m, filled only on breakdown
    int label = 0;                  // 3 or 4

    int coefficient_count() const {
        return breakdown ? static_cast<int>(raw.size()) - 1 : static_cast<int>(ratios.size());
    }
    /// The ratio chain; throws RatioBreakdown when undefined.
    const std::vector<complex>& ratio_chain() const;
};

/// Formal solution exp(beta / z) z^rho sum_m b_m z^m at the origin.
struct FormalSolutionOrigin {
    complex beta;
    complex rho;
    std::vector<complex> ratios;
    bool breakdown = false;
    std::vector<ScaledComplex> raw;
    int label = 0; // 5 or 6

    int coefficient_count() const {
        return breakdown ? static_cast<int>(raw.size()) - 1 : static_cast<int>(ratios.size());
    }
    const std::vector<complex>& ratio_chain() const;
};

/// Streams the scaled coefficients a_0, a_1, ... of a formal solution.
class FormalCoefficientStream {
public:
    FormalCoefficientStream(const std::vector<complex>& ratios, bool breakdown,
                            const std::vector<ScaledComplex>& raw);

    int max_m() const { return max_m_; }
    int m() const { return m_; }
    void advance();
    const ScaledComplex& current() const { return cur_; }
    complex times(const complex& k) const { return cur_.times(k); }

private:
    const std::vector<complex>* ratios_;
    const std::vector<ScaledComplex>* raw_;
    bool breakdown_;
    int max_m_;
    int m_ = 0;
    ScaledComplex cur_{complex(1.0, 0.0), 0};
};

inline FormalCoefficientStream coefficient_stream(const FormalSolutionInfinity& f) {
    return {f.ratios, f.breakdown, f.raw};
}
inline FormalCoefficientStream coefficient_stream(const FormalSolutionOrigin& f) {
    return {f.ratios, f.breakdown, f.raw};
}

/// Exponent stubs (coefficients not yet filled) with sector-correct labels:
/// arg alpha_4 in [-pi/2, pi/2) measured in [-pi, pi). Returned as
/// (label 3, label 4).
std::pair<FormalSolutionInfinity, FormalSolutionInfinity> exponents_at_infinity(
    const DcheParams& a);

/// Exponent stubs with arg beta_6 in (-pi/2, pi/2] measured in (-pi, pi].
/// Returned as (label 5, label 6).
std::pair<FormalSolutionOrigin, FormalSolutionOrigin> exponents_at_origin(const DcheParams& a);

/// Fills `count` coefficients by the forward recurrence seeded from the exact
/// low-order values; stores the ratio chain, or the raw scaled coefficients
/// when the chain is undefined.
void coefficient_ratios_infinity(const DcheParams& a, FormalSolutionInfinity& f, int count);
void coefficient_ratios_origin(const DcheParams& a, FormalSolutionOrigin& f, int count);

struct AsymptoticValue {
    complex value;
    double est_error; // magnitude of the first omitted term times the prefactor
    int terms_used;
};

/// Optimally truncated sum of the asymptotic series times its prefactor.
/// Throws NoDecreasingTerm when the terms grow from the start.
AsymptoticValue evaluate_asymptotic(const FormalSolutionInfinity& f, const complex& z,
                                    ArgConvention conv);
AsymptoticValue evaluate_asymptotic(const FormalSolutionOrigin& f, const complex& z,
                                    ArgConvention conv);

} // namespace dche
