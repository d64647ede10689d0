#pragma once

#include <iosfwd>
#include <vector>

#include "dche/connection.hpp"
#include "dche/floquet.hpp"
#include "dche/types.hpp"

namespace dche {

/// Combination w_reg = zeta_1 w_1 + zeta_2 w_2 that is asymptotic to w_5 as
/// z -> 0+ (coefficient of w_5 normalized to 1, coefficient of w_6 zero),
/// together with its behaviour at infinity.
struct RegularCombination {
    complex zeta1, zeta2;
    complex t_reg3, t_reg4;
};

/// Solves zeta_1 T_{1,5} + zeta_2 T_{2,5} = 1, zeta_1 T_{1,6} + zeta_2 T_{2,6} = 0.
/// Throws NoRegularSelection when the system is singular.
RegularCombination regular_at_origin(const ConnectionTable& tbl);

struct BoundStateRoot {
    complex a2;
    double residual; // |T_reg,4| / |T_reg,3| at the root
};

/// Scans T_reg,4 over A_2 in [a2_lo, a2_hi] on `grid` samples, brackets sign
/// changes (or |T_reg,4| minima when the values are not real) and refines by
/// secant iteration. Throws NoRootInInterval when nothing brackets.
std::vector<BoundStateRoot> bound_state_search(const DcheParams& base, double a2_lo,
                                               double a2_hi, const Tolerances& tol,
                                               int grid = 32);

struct MatchCoefficients {
    complex xi1, xi2;
};

/// Solves w_1(1) xi_1 + w_2(1) xi_2 = value, w_1'(1) xi_1 + w_2'(1) xi_2 = slope.
MatchCoefficients match_at_unit_point(const MultiplicativeSolution& w1,
                                      const MultiplicativeSolution& w2, const complex& value,
                                      const complex& slope, const Tolerances& tol);

/// The matching system with right-hand side (1, -1/2).
MatchCoefficients match_jaffe_lay(const MultiplicativeSolution& w1,
                                  const MultiplicativeSolution& w2, const Tolerances& tol);

struct GlobalSample {
    double z;
    complex w;
    complex dw;
};

/// w_reg and its derivative on the given positive abscissas.
std::vector<GlobalSample> evaluate_global(const RegularCombination& rc,
                                          const MultiplicativeSolution& w1,
                                          const MultiplicativeSolution& w2,
                                          const std::vector<double>& z_points,
                                          const Tolerances& tol);

/// CSV export: header row, columns z, Re w, Im w, Re w', Im w', scientific
/// notation with 15 significant digits.
void write_samples_csv(std::ostream& os, const std::vector<GlobalSample>& samples);

} // namespace dche
