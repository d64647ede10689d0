#include "dche/connection.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dche/gamma.hpp"

namespace dche {

namespace {

constexpr double kSpreadTol = 1e-8;    // accepted n-consistency spread
constexpr int kTailRunLength = 5;      // consecutive negligible terms to stop a sum

// Angular distance of theta to the nearest multiple of 2 pi.
double ray_distance(double theta) {
    return std::abs(theta - 2.0 * pi * std::nearbyint(theta / (2.0 * pi)));
}

// exp(e * (ln r + i phi)) for a base given by modulus and (unwrapped) argument.
complex power_with_arg(double base_mod, double base_arg, const complex& e) {
    return std::exp(e * complex(std::log(base_mod), base_arg));
}

struct BranchContext {
    bool onray;
    double s; // +1 or -1: the e^{+-i pi} reading of the minus sign (off-ray only)
};

// The minus sign in front of the exponent base is read as e^{+-i pi} so that
// the combined argument of the exponential-series variable stays inside
// (-pi, pi). `theta` is that combined argument before the sign insertion.
BranchContext classify_ray(double theta, const Tolerances& tol, bool require_offray,
                           const char* what) {
    if (ray_distance(theta) <= tol.onray_angle_tol) {
        if (require_offray)
            throw AmbiguousBranch(std::string(what) + ": z lies on the Stokes ray");
        return {true, 0.0};
    }
    return {false, theta > 0.0 ? -1.0 : 1.0};
}

double parity_sign(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

} // namespace

int select_n(const DcheParams& a, const complex& delta) {
    const double bound = a.abs_sum() + 2.0;
    for (int n = 1;; ++n) {
        const complex nd = static_cast<double>(n) + delta;
        if (std::abs(nd * (nd - 1.0)) > bound) return n;
    }
}

namespace {

// Shared accumulation: stops cleanly after kTailRunLength consecutive
// negligible terms. The far Laurent tail of a truncated solution carries a
// reflection artifact of the boundary condition; once the terms have passed
// their minimum and start growing from that noise floor, the partial sum at
// the minimum is the converged value (same optimal-truncation semantics as
// the asymptotic sums).
class WronskianSum {
public:
    explicit WronskianSum(double tail_tol) : tail_tol_(tail_tol) {}

    // Feeds one term; true when the sum is converged and should be read off.
    bool feed(const complex& term) {
        const double mag = std::abs(term);
        sum_ += term;
        max_ = std::max(max_, mag);
        quiet_ = (max_ > 0.0 && mag < tail_tol_ * max_) ? quiet_ + 1 : 0;
        if (mag > 0.0) {
            if (mag <= min_) {
                min_ = mag;
                sum_at_min_ = sum_;
            } else if (min_ <= 1e-12 * max_ && mag > 1e2 * min_) {
                sum_ = sum_at_min_; // the growth is the tail artifact
                return true;
            }
        }
        return quiet_ >= kTailRunLength;
    }

    const complex& value() const { return sum_; }
    double max_term() const { return max_; }

private:
    double tail_tol_;
    complex sum_{0.0, 0.0};
    complex sum_at_min_{0.0, 0.0};
    double max_ = 0.0;
    double min_ = 1e300;
    int quiet_ = 0;
};

} // namespace

namespace {

complex gamma_coefficient_impl(int n, const MultiplicativeSolution& w,
                               const FormalSolutionInfinity& f, const Tolerances& tol,
                               double* term_scale) {
    FormalCoefficientStream a_m = coefficient_stream(f);
    const complex shift = 1.0 + w.nu - f.mu + static_cast<double>(n);

    WronskianSum acc(tol.series_tail_tol);
    for (int m = 0;; ++m) {
        const long idx = static_cast<long>(n) + m;
        if (idx + 1 > w.n_hi)
            throw InsufficientTruncation(
                "gamma_coefficient: Laurent range exhausted before the tail criterion");
        const complex kernel =
            f.alpha * w.coeff(idx) - (shift + 2.0 * static_cast<double>(m)) * w.coeff(idx + 1);
        const complex term = a_m.times(kernel);
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
            throw InsufficientTruncation("gamma_coefficient: series term overflow");
        if (acc.feed(term)) break;
        if (a_m.m() >= a_m.max_m())
            throw InsufficientTruncation("gamma_coefficient: coefficient stream exhausted");
        a_m.advance();
    }
    if (term_scale) *term_scale = acc.max_term();
    return acc.value();
}

complex eta_coefficient_impl(int n, const MultiplicativeSolution& w,
                             const FormalSolutionOrigin& f, const Tolerances& tol,
                             double* term_scale) {
    FormalCoefficientStream b_m = coefficient_stream(f);
    const complex shift = 1.0 + w.nu - f.rho + static_cast<double>(n);

    WronskianSum acc(tol.series_tail_tol);
    for (int m = 0;; ++m) {
        const long idx = static_cast<long>(n) - m;
        if (idx + 1 < -w.m_lo)
            throw InsufficientTruncation(
                "eta_coefficient: Laurent range exhausted before the tail criterion");
        const complex kernel =
            -f.beta * w.coeff(idx + 2) - (shift - 2.0 * static_cast<double>(m)) * w.coeff(idx + 1);
        const complex term = b_m.times(kernel);
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
            throw InsufficientTruncation("eta_coefficient: series term overflow");
        if (acc.feed(term)) break;
        if (b_m.m() >= b_m.max_m())
            throw InsufficientTruncation("eta_coefficient: coefficient stream exhausted");
        b_m.advance();
    }
    if (term_scale) *term_scale = acc.max_term();
    return acc.value();
}

} // namespace

complex gamma_coefficient(int n, const MultiplicativeSolution& w,
                          const FormalSolutionInfinity& f, const Tolerances& tol) {
    return gamma_coefficient_impl(n, w, f, tol, nullptr);
}

complex eta_coefficient(int n, const MultiplicativeSolution& w, const FormalSolutionOrigin& f,
                        const Tolerances& tol) {
    return eta_coefficient_impl(n, w, f, tol, nullptr);
}

namespace {

// Consistency over n, n+1, n+2. A vanishing Wronskian cannot pass a relative
// test, so each evaluation also reports the absolute magnitude below which
// its result is indistinguishable from zero; agreement within that floor
// counts as consistent.
template <typename OneN>
WronskianResult wronskian_with_consistency(int n0, bool onray, OneN one_n) {
    complex values[3];
    double floors[3];
    for (int k = 0; k < 3; ++k) values[k] = one_n(n0 + k, floors[k]);
    double scale = 0.0, floor = 0.0;
    for (int k = 0; k < 3; ++k) {
        scale = std::max(scale, std::abs(values[k]));
        floor = std::max(floor, floors[k]);
    }
    double spread = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            spread = std::max(spread, std::abs(values[i] - values[j]));
    // Accept by relative agreement, or by absolute agreement at the
    // roundoff floor (which dominates whenever the sum cancels heavily).
    if (spread > kSpreadTol * scale && spread > floor)
        throw InsufficientTruncation("wronskian: values at n, n+1, n+2 disagree");
    return {values[0], n0, spread / std::max(scale, floor), onray};
}

// Absolute zero floor: roundoff of the coefficient sum transported through
// the gamma/power prefactor, with generous slack.
double zero_floor(double prefactor_mag, double term_scale) {
    return 1e-10 * prefactor_mag * term_scale;
}

} // namespace

WronskianResult wronskian_mult_formal(const MultiplicativeSolution& w,
                                      const FormalSolutionInfinity& f, double arg_z,
                                      const DcheParams& a, const Tolerances& tol,
                                      bool require_offray) {
    const complex delta = w.nu + f.mu;
    const double alpha_mod = std::abs(f.alpha);
    const double alpha_arg = arg_in(f.alpha, ArgConvention::lower_closed);
    // Stokes ray of w_t at infinity: arg z = -arg alpha_t.
    const BranchContext br =
        classify_ray(alpha_arg + arg_z, tol, require_offray, "wronskian at infinity");

    const int n0 = select_n(a, delta);
    return wronskian_with_consistency(n0, br.onray, [&](int n, double& floor) {
        double term_scale = 0.0;
        const complex g = gamma_coefficient_impl(n, w, f, tol, &term_scale);
        const complex nd = static_cast<double>(n) + delta;
        const complex gam = complex_gamma(nd + 1.0);
        complex base, result;
        if (br.onray) {
            base = power_with_arg(alpha_mod, alpha_arg, nd);
            result = parity_sign(n) * std::cos(pi * delta) * gam * g / base;
        } else {
            base = power_with_arg(alpha_mod, alpha_arg + br.s * pi, nd);
            result = gam * g / base;
        }
        floor = zero_floor(std::abs(gam) / std::abs(base), term_scale);
        return result;
    });
}

WronskianResult wronskian_mult_formal(const MultiplicativeSolution& w,
                                      const FormalSolutionOrigin& f, double arg_z,
                                      const DcheParams& a, const Tolerances& tol,
                                      bool require_offray) {
    const complex delta = -(w.nu + f.rho); // exponent shift of the origin matching
    const double beta_mod = std::abs(f.beta);
    const double beta_arg = arg_in(f.beta, ArgConvention::upper_closed);
    // Stokes ray of w_t at the origin: arg z = arg beta_t.
    const BranchContext br =
        classify_ray(beta_arg - arg_z, tol, require_offray, "wronskian at origin");

    const int n0 = select_n(a, delta);
    return wronskian_with_consistency(n0, br.onray, [&](int n, double& floor) {
        double term_scale = 0.0;
        const complex e = eta_coefficient_impl(-n, w, f, tol, &term_scale);
        const complex nd = static_cast<double>(n) + delta; // n - nu - rho
        const complex gam = complex_gamma(nd + 1.0);
        complex base, result;
        if (br.onray) {
            base = power_with_arg(beta_mod, beta_arg, nd);
            result = parity_sign(n) * std::cos(pi * (w.nu + f.rho)) * gam * e / base;
        } else {
            base = power_with_arg(beta_mod, beta_arg + br.s * pi, nd);
            result = gam * e / base;
        }
        floor = zero_floor(std::abs(gam) / std::abs(base), term_scale);
        return result;
    });
}

complex wronskian_formal_pair(const FormalSolutionInfinity& f_a,
                              const FormalSolutionInfinity& f_b) {
    if (f_a.label == 3 && f_b.label == 4) return 2.0 * f_b.alpha;
    if (f_a.label == 4 && f_b.label == 3) return -2.0 * f_a.alpha;
    throw Error("wronskian_formal_pair: labels must be {3,4}");
}

complex wronskian_formal_pair(const FormalSolutionOrigin& f_a, const FormalSolutionOrigin& f_b) {
    if (f_a.label == 5 && f_b.label == 6) return 2.0 * f_a.beta;
    if (f_a.label == 6 && f_b.label == 5) return -2.0 * f_b.beta;
    throw Error("wronskian_formal_pair: labels must be {5,6}");
}

ConnectionTable connection_table(const MultiplicativeSolution& w1,
                                 const MultiplicativeSolution& w2,
                                 const FormalSolutionInfinity& f3,
                                 const FormalSolutionInfinity& f4,
                                 const FormalSolutionOrigin& f5, const FormalSolutionOrigin& f6,
                                 double arg_z, const DcheParams& a, const Tolerances& tol) {
    ConnectionTable tbl;
    tbl.arg_z = arg_z;
    tbl.w34 = wronskian_formal_pair(f3, f4);
    tbl.w56 = wronskian_formal_pair(f5, f6);

    const MultiplicativeSolution* mult[2] = {&w1, &w2};
    for (int j = 0; j < 2; ++j) {
        const WronskianResult wj4 = wronskian_mult_formal(*mult[j], f4, arg_z, a, tol);
        const WronskianResult wj3 = wronskian_mult_formal(*mult[j], f3, arg_z, a, tol);
        const WronskianResult wj6 = wronskian_mult_formal(*mult[j], f6, arg_z, a, tol);
        const WronskianResult wj5 = wronskian_mult_formal(*mult[j], f5, arg_z, a, tol);
        // T_{j,r} = W[w_j, w_s] / W[w_r, w_s] for {r,s} = {3,4} and {5,6}.
        tbl.t[j][0] = wj4.value / tbl.w34;
        tbl.t[j][1] = wj3.value / (-tbl.w34);
        tbl.t[j][2] = wj6.value / tbl.w56;
        tbl.t[j][3] = wj5.value / (-tbl.w56);
        tbl.diag[j][0] = wj4;
        tbl.diag[j][1] = wj3;
        tbl.diag[j][2] = wj6;
        tbl.diag[j][3] = wj5;
    }
    return tbl;
}

complex heaviside_partial_sum(const complex& xi, const complex& delta, int n_lo, int n_hi) {
    const double a = std::arg(xi);
    if (std::abs(a) >= pi)
        throw BranchViolation("heaviside_partial_sum: |arg xi| must be < pi");
    const complex log_xi(std::log(std::abs(xi)), a);
    complex sum(0.0, 0.0);
    for (int n = n_lo; n <= n_hi; ++n) {
        const complex nd = static_cast<double>(n) + delta;
        const complex rg = reciprocal_gamma(nd + 1.0);
        if (rg == complex(0.0, 0.0)) continue;
        sum += std::exp(nd * log_xi) * rg;
    }
    return sum;
}

GlobalSolution solve_connection_problem(const DcheParams& a, double arg_z,
                                        const Tolerances& tol,
                                        std::optional<complex> nu1_hint) {
    validate(a);
    SolvePairOptions opts;
    opts.nu1_hint = nu1_hint;

    // The gamma/eta tails need more Laurent coefficients than the index
    // iteration itself; escalate on InsufficientTruncation.
    const int max_attempts = 5;
    for (int attempt = 0;; ++attempt) {
        auto [w1, w2] = solve_multiplicative_pair(a, tol, opts);

        GlobalSolution g;
        g.params = a;
        std::tie(g.f3, g.f4) = exponents_at_infinity(a);
        std::tie(g.f5, g.f6) = exponents_at_origin(a);
        const int count = std::max(w1.m_lo + w1.n_hi, w2.m_lo + w2.n_hi) + 8;
        coefficient_ratios_infinity(a, g.f3, count);
        coefficient_ratios_infinity(a, g.f4, count);
        coefficient_ratios_origin(a, g.f5, count);
        coefficient_ratios_origin(a, g.f6, count);

        try {
            g.table = connection_table(w1, w2, g.f3, g.f4, g.f5, g.f6, arg_z, a, tol);
        } catch (const InsufficientTruncation&) {
            if (attempt + 1 >= max_attempts) throw;
            opts.initial_m += 16;
            opts.initial_n += 16;
            continue;
        }
        g.w1 = std::move(w1);
        g.w2 = std::move(w2);
        return g;
    }
}

std::string connection_table_to_json(const ConnectionTable& tbl) {
    nlohmann::json j;
    j["arg_z"] = tbl.arg_z;
    for (int jj = 1; jj <= 2; ++jj)
        for (int tt = 3; tt <= 6; ++tt) {
            const std::string key = std::to_string(jj) + std::to_string(tt);
            const complex v = tbl.T(jj, tt);
            j["T"][key] = {v.real(), v.imag()};
            const WronskianResult& d = tbl.diagnostics(jj, tt);
            j["diag"][key] = {{"n_used", d.n_used},
                              {"consistency_err", d.consistency_err},
                              {"onray", d.onray}};
        }
    return j.dump();
}

} // namespace dche
