#include "dche/global.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <ostream>

namespace dche {

namespace {

// 2x2 solve by Cramer; `scale` guards the singularity test.
bool solve_2x2(const complex& a11, const complex& a12, const complex& a21, const complex& a22,
               const complex& r1, const complex& r2, complex& x1, complex& x2) {
    const complex det = a11 * a22 - a12 * a21;
    const double scale = std::abs(a11) * std::abs(a22) + std::abs(a12) * std::abs(a21) + 1e-300;
    if (std::abs(det) < 1e-13 * scale) return false;
    x1 = (r1 * a22 - r2 * a12) / det;
    x2 = (a11 * r2 - a21 * r1) / det;
    return true;
}

} // namespace

RegularCombination regular_at_origin(const ConnectionTable& tbl) {
    RegularCombination rc;
    if (!solve_2x2(tbl.T(1, 5), tbl.T(2, 5), tbl.T(1, 6), tbl.T(2, 6), complex(1.0, 0.0),
                   complex(0.0, 0.0), rc.zeta1, rc.zeta2))
        throw NoRegularSelection(
            "regular_at_origin: both multiplicative solutions share the recessive behaviour");
    rc.t_reg3 = rc.zeta1 * tbl.T(1, 3) + rc.zeta2 * tbl.T(2, 3);
    rc.t_reg4 = rc.zeta1 * tbl.T(1, 4) + rc.zeta2 * tbl.T(2, 4);
    return rc;
}

namespace {

struct RegSample {
    complex t4;
    complex t3;
};

RegSample reg_at(const DcheParams& base, const complex& a2, const Tolerances& tol) {
    DcheParams p = base;
    p.a(2) = a2;
    const GlobalSolution g = solve_connection_problem(p, 0.0, tol);
    const RegularCombination rc = regular_at_origin(g.table);
    return {rc.t_reg4, rc.t_reg3};
}

} // namespace

std::vector<BoundStateRoot> bound_state_search(const DcheParams& base, double a2_lo,
                                               double a2_hi, const Tolerances& tol, int grid) {
    if (!(a2_hi > a2_lo)) throw NoRootInInterval("bound_state_search: empty interval");
    if (grid < 2) throw Error("bound_state_search: grid must have at least 2 points");

    std::vector<double> xs(static_cast<std::size_t>(grid));
    std::vector<RegSample> fs(static_cast<std::size_t>(grid));
    const double step = (a2_hi - a2_lo) / static_cast<double>(grid - 1);
    for (int i = 0; i < grid; ++i) xs[static_cast<std::size_t>(i)] = a2_lo + step * i;

    // Exceptions must not escape the parallel region; capture the first one
    // by sample order and rethrow after the loop.
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(grid));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < grid; ++i) {
        try {
            fs[static_cast<std::size_t>(i)] = reg_at(base, xs[static_cast<std::size_t>(i)], tol);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

    double max_mag = 0.0, max_im = 0.0;
    for (const RegSample& s : fs) {
        max_mag = std::max(max_mag, std::abs(s.t4));
        max_im = std::max(max_im, std::abs(s.t4.imag()));
    }
    const bool real_scan = max_im <= 1e-8 * (max_mag + 1e-300);

    // Candidate starting pairs for the secant refinement.
    std::vector<std::pair<double, double>> starts;
    if (real_scan) {
        for (int i = 0; i + 1 < grid; ++i) {
            const double f0 = fs[static_cast<std::size_t>(i)].t4.real();
            const double f1 = fs[static_cast<std::size_t>(i + 1)].t4.real();
            if (f0 == 0.0) starts.emplace_back(xs[static_cast<std::size_t>(i)],
                                               xs[static_cast<std::size_t>(i)] + 0.25 * step);
            else if (f0 * f1 < 0.0)
                starts.emplace_back(xs[static_cast<std::size_t>(i)],
                                    xs[static_cast<std::size_t>(i + 1)]);
        }
    } else {
        for (int i = 1; i + 1 < grid; ++i) {
            const double m0 = std::abs(fs[static_cast<std::size_t>(i - 1)].t4);
            const double m1 = std::abs(fs[static_cast<std::size_t>(i)].t4);
            const double m2 = std::abs(fs[static_cast<std::size_t>(i + 1)].t4);
            if (m1 < m0 && m1 < m2)
                starts.emplace_back(xs[static_cast<std::size_t>(i - 1)],
                                    xs[static_cast<std::size_t>(i + 1)]);
        }
    }
    if (starts.empty()) throw NoRootInInterval("bound_state_search: no sign change");

    std::vector<BoundStateRoot> roots;
    for (const auto& [s0, s1] : starts) {
        complex x0(s0, 0.0), x1(s1, 0.0);
        RegSample f0 = reg_at(base, x0, tol);
        RegSample f1 = reg_at(base, x1, tol);
        bool ok = false;
        for (int it = 0; it < 48; ++it) {
            const double res = std::abs(f1.t4) / (std::abs(f1.t3) + 1e-300);
            if (res <= 1e-10) {
                ok = true;
                break;
            }
            const complex denom = f1.t4 - f0.t4;
            if (std::abs(denom) == 0.0) break;
            const complex x2 = x1 - f1.t4 * (x1 - x0) / denom;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = reg_at(base, x1, tol);
        }
        if (!ok) continue;
        const double residual = std::abs(f1.t4) / (std::abs(f1.t3) + 1e-300);
        bool duplicate = false;
        for (const BoundStateRoot& r : roots)
            if (std::abs(r.a2 - x1) < 1e-7 * (a2_hi - a2_lo)) duplicate = true;
        if (!duplicate) roots.push_back({x1, residual});
    }
    if (roots.empty()) throw NoRootInInterval("bound_state_search: refinement found no root");
    std::sort(roots.begin(), roots.end(),
              [](const BoundStateRoot& a, const BoundStateRoot& b) {
                  return a.a2.real() < b.a2.real();
              });
    return roots;
}

MatchCoefficients match_at_unit_point(const MultiplicativeSolution& w1,
                                      const MultiplicativeSolution& w2, const complex& value,
                                      const complex& slope, const Tolerances& tol) {
    const auto [v1, d1] = evaluate_multiplicative(w1, complex(1.0, 0.0),
                                                  ArgConvention::upper_closed, tol);
    const auto [v2, d2] = evaluate_multiplicative(w2, complex(1.0, 0.0),
                                                  ArgConvention::upper_closed, tol);
    MatchCoefficients m;
    if (!solve_2x2(v1, v2, d1, d2, value, slope, m.xi1, m.xi2))
        throw SingularMatch("match_at_unit_point: Wronskian matrix at z = 1 is singular");
    return m;
}

MatchCoefficients match_jaffe_lay(const MultiplicativeSolution& w1,
                                  const MultiplicativeSolution& w2, const Tolerances& tol) {
    return match_at_unit_point(w1, w2, complex(1.0, 0.0), complex(-0.5, 0.0), tol);
}

std::vector<GlobalSample> evaluate_global(const RegularCombination& rc,
                                          const MultiplicativeSolution& w1,
                                          const MultiplicativeSolution& w2,
                                          const std::vector<double>& z_points,
                                          const Tolerances& tol) {
    std::vector<GlobalSample> out;
    out.reserve(z_points.size());
    for (double z : z_points) {
        if (!(z > 0.0)) throw Error("evaluate_global: z points must be positive");
        const complex zc(z, 0.0);
        const auto [v1, d1] = evaluate_multiplicative(w1, zc, ArgConvention::upper_closed, tol);
        const auto [v2, d2] = evaluate_multiplicative(w2, zc, ArgConvention::upper_closed, tol);
        out.push_back({z, rc.zeta1 * v1 + rc.zeta2 * v2, rc.zeta1 * d1 + rc.zeta2 * d2});
    }
    return out;
}

void write_samples_csv(std::ostream& os, const std::vector<GlobalSample>& samples) {
    os << "z,re_w,im_w,re_dw,im_dw\n";
    char buf[512];
    for (const GlobalSample& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.14e,%.14e,%.14e,%.14e,%.14e\n", s.z, s.w.real(),
                      s.w.imag(), s.dw.real(), s.dw.imag());
        os << buf;
    }
}

} // namespace dche
