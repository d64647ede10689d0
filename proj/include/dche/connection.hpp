#pragma once

#include <optional>
#include <string>

#include "dche/asymptotics.hpp"
#include "dche/floquet.hpp"
#include "dche/params.hpp"
#include "dche/types.hpp"

namespace dche {

/// One computed Wronskian W[w_j, w_t] with its self-consistency diagnostics.
struct WronskianResult {
    complex value;
    int n_used = 0;
    double consistency_err = 0.0; // relative spread over n_used, n_used+1, n_used+2
    bool onray = false;
};

/// The eight connection factors T_{j,t}, j in {1,2}, t in {3,4,5,6},
/// evaluated for a given arg z on the principal sheet.
struct ConnectionTable {
    double arg_z = 0.0;
    complex t[2][4];             // t[j-1][t-3]
    WronskianResult diag[2][4];  // numerator diagnostics per entry
    complex w34;                 // W[w_3, w_4] = 2 alpha_4
    complex w56;                 // W[w_5, w_6] = 2 beta_5

    complex T(int j, int tt) const { return t[j - 1][tt - 3]; }
    const WronskianResult& diagnostics(int j, int tt) const { return diag[j - 1][tt - 3]; }
};

/// Smallest positive n with |(n+delta)(n+delta-1)| > sum_p |A_p| + 2.
int select_n(const DcheParams& a, const complex& delta);

/// Coefficient of the Wronskian expansion at infinity:
///   gamma_n = sum_m a_m [alpha c_{n+m} - (n+2m+1+nu-mu) c_{n+m+1}].
/// Throws InsufficientTruncation if the Laurent range is exhausted before the
/// tail criterion (five consecutive negligible terms) is met.
complex gamma_coefficient(int n, const MultiplicativeSolution& w,
                          const FormalSolutionInfinity& f, const Tolerances& tol);

/// Origin counterpart:
///   eta_n = sum_m b_m [-beta c_{n-m+2} - (n-2m+1+nu-rho) c_{n-m+1}].
complex eta_coefficient(int n, const MultiplicativeSolution& w, const FormalSolutionOrigin& f,
                        const Tolerances& tol);

/// W[w_j, w_t] for a formal solution at infinity via the exponential-series
/// matching; detects the Stokes ray of w_t and applies the on-ray average
/// there. `require_offray` turns a near-ray request into AmbiguousBranch.
WronskianResult wronskian_mult_formal(const MultiplicativeSolution& w,
                                      const FormalSolutionInfinity& f, double arg_z,
                                      const DcheParams& a, const Tolerances& tol,
                                      bool require_offray = false);
WronskianResult wronskian_mult_formal(const MultiplicativeSolution& w,
                                      const FormalSolutionOrigin& f, double arg_z,
                                      const DcheParams& a, const Tolerances& tol,
                                      bool require_offray = false);

/// W[w_3, w_4] = 2 alpha_4 a_{0,3} a_{0,4} and the swapped sign; likewise
/// W[w_5, w_6] = 2 beta_5 b_{0,5} b_{0,6}. Labels must be {3,4} or {5,6}.
complex wronskian_formal_pair(const FormalSolutionInfinity& f_a,
                              const FormalSolutionInfinity& f_b);
complex wronskian_formal_pair(const FormalSolutionOrigin& f_a, const FormalSolutionOrigin& f_b);

/// All eight factors T_{j,r} = W[w_j, w_s] / W[w_r, w_s].
ConnectionTable connection_table(const MultiplicativeSolution& w1,
                                 const MultiplicativeSolution& w2,
                                 const FormalSolutionInfinity& f3,
                                 const FormalSolutionInfinity& f4,
                                 const FormalSolutionOrigin& f5, const FormalSolutionOrigin& f6,
                                 double arg_z, const DcheParams& a, const Tolerances& tol);

/// Partial sum of the two-sided exponential series
/// sum_n xi^(n+delta) / Gamma(n+1+delta); diagnostic only. Requires
/// |arg xi| < pi, else throws BranchViolation.
complex heaviside_partial_sum(const complex& xi, const complex& delta, int n_lo, int n_hi);

/// Everything the downstream stages need for one parameter set.
struct GlobalSolution {
    DcheParams params;
    MultiplicativeSolution w1, w2;
    FormalSolutionInfinity f3, f4;
    FormalSolutionOrigin f5, f6;
    ConnectionTable table;
};

/// Full pipeline: multiplicative pair (escalating truncation on
/// InsufficientTruncation), formal solutions, and the connection table.
GlobalSolution solve_connection_problem(const DcheParams& a, double arg_z,
                                        const Tolerances& tol,
                                        std::optional<complex> nu1_hint = {});

/// JSON dump {"arg_z":x,"T":{"13":[re,im],...},"diag":{...}}.
std::string connection_table_to_json(const ConnectionTable& tbl);

} // namespace dche
