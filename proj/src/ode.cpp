#include "dche/ode.hpp"

#include <algorithm>

namespace dche {

namespace {

// Dormand-Prince 5(4) tableau. b5 is the last stage row (FSAL); e = b5 - b4
// gives the embedded error estimate.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0, e4 = b4 - 393.0 / 640.0,
                 e5 = b5 + 92097.0 / 339200.0, e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

} // namespace

std::vector<complex> integrate_path(const FieldFn& field, const PathFn& path, double theta_end,
                                    std::vector<complex> state, const Tolerances& tol) {
    tol.check();
    if (!(theta_end > 0.0)) throw Error("integrate_path: theta_end must be positive");

    const std::size_t n = state.size();
    std::vector<complex> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), dw(n);

    auto eval = [&](double theta, const std::vector<complex>& y, std::vector<complex>& out) {
        const PathPoint p = path(theta);
        field(p.z, y, dw);
        for (std::size_t i = 0; i < n; ++i) out[i] = p.dz * dw[i];
    };

    double theta = 0.0;
    double h = theta_end * 1e-3;
    const double h_min = theta_end * 1e-13;
    double err_prev = 1e-4;
    bool rejected = false;

    eval(theta, state, k1);
    while (theta < theta_end) {
        if (h < h_min) throw StepUnderflow("integrate_path: step size underflow");
        if (theta + h > theta_end) h = theta_end - theta;

        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * a21 * k1[i];
        eval(theta + h / 5.0, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(theta + 3.0 * h / 10.0, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = state[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(theta + 4.0 * h / 5.0, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = state[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(theta + 8.0 * h / 9.0, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = state[i] +
                     h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval(theta + h, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = state[i] +
                      h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval(theta + h, ynew, k7);

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const complex e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc =
                tol.ode_abs + tol.ode_rel * std::max(std::abs(state[i]), std::abs(ynew[i]));
            const double q = std::abs(e) / sc;
            err_sq += q * q;
        }
        double err = std::sqrt(err_sq / static_cast<double>(n));
        if (!std::isfinite(err)) err = 1e16;

        if (err <= 1.0) {
            theta += h;
            state.swap(ynew);
            k1.swap(k7); // FSAL
            // PI controller (orders 5/4): exponents 0.7/5 and 0.4/5.
            const double e_clamped = std::max(err, 1e-16);
            double fac = 0.9 * std::pow(e_clamped, -0.14) * std::pow(err_prev, 0.08);
            fac = std::clamp(fac, 0.2, rejected ? 1.0 : 10.0);
            h *= fac;
            err_prev = e_clamped;
            rejected = false;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            rejected = true;
        }
    }
    return state;
}

} // namespace dche
