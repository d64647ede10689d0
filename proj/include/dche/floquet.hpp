#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dche/params.hpp"
#include "dche/types.hpp"

namespace dche {

/// Monodromy data for one circuit around the origin along the unit circle.
struct CircuitMatrix {
    complex c11, c12, c21, c22;
    complex det;
    complex lambda1, lambda2;

    complex trace() const { return c11 + c22; }
};

/// Multiplicative (Floquet) solution w = z^nu * sum_n c_n z^n, n = -m_lo..n_hi,
/// normalized to c_0 = 1. The index is reduced to Re nu in [-1/2, 1/2) with
/// a snap of the upper boundary onto -1/2.
struct MultiplicativeSolution {
    complex nu;
    std::vector<complex> coeffs; // coeffs[k] = c_{k - m_lo}
    int m_lo = 0;
    int n_hi = 0;
    double recurrence_residual = 0.0; // max |row of the coefficient recurrence|
    int label = 0;                    // 1 or 2

    complex coeff(long n) const {
        const long k = n + m_lo;
        if (k < 0 || k >= static_cast<long>(coeffs.size())) return {0.0, 0.0};
        return coeffs[static_cast<std::size_t>(k)];
    }
    double max_abs_coeff() const;
};

/// Integrates the equation once around the unit circle for the two canonical
/// initial-condition sets and packs the resulting circuit matrix.
CircuitMatrix compute_circuit_matrix(const DcheParams& a, const Tolerances& tol);

/// Both index seeds from the circuit-matrix eigenvalues, reduced to
/// Re nu in [-1/2, 1/2). First element carries the "+" square-root sign.
/// Throws LogarithmicCase when the discriminant is numerically zero.
std::pair<complex, complex> index_seeds(const CircuitMatrix& c);

/// Approximate null vector of the truncated recurrence matrix at the index
/// seed, normalized to sum |c|^2 = 1. Deterministic (two rounds of inverse
/// iteration from a constant start vector).
std::vector<complex> seed_coefficients(const DcheParams& a, const complex& nu0, int m_lo,
                                       int n_hi);

/// One truncation level of the bordered iteration. c0 must have
/// m_lo + n_hi + 1 entries ordered by ascending n.
MultiplicativeSolution newton_refine(const DcheParams& a, const complex& nu0,
                                     std::vector<complex> c0, int m_lo, int n_hi,
                                     const Tolerances& tol, int max_iter = 50);

struct SolvePairOptions {
    int initial_m = 16;
    int initial_n = 16;
    int escalation_step = 8;
    int max_truncation = 512;
    /// Optional orientation: label 1 goes to the solution whose index is
    /// closest (mod 1) to this value.
    std::optional<complex> nu1_hint;
};

/// Full driver: circuit matrix, seeding, bordered refinement with truncation
/// escalation, index-sum check and deterministic labeling.
std::pair<MultiplicativeSolution, MultiplicativeSolution> solve_multiplicative_pair(
    const DcheParams& a, const Tolerances& tol, const SolvePairOptions& opts = {});

/// Series evaluation of w and w' at z != 0; z^nu uses arg z per `conv`.
/// Throws InsufficientTruncation when a boundary term is not negligible at
/// this z.
std::pair<complex, complex> evaluate_multiplicative(const MultiplicativeSolution& w,
                                                    const complex& z, ArgConvention conv,
                                                    const Tolerances& tol);

/// Index reduced modulo 1 into Re in [-1/2, 1/2); *shift receives the integer
/// subtracted. Values within 1e-9 of the upper boundary are snapped to -1/2.
complex reduce_index(const complex& nu, long* shift = nullptr);

/// Distance from x to the nearest integer.
double integer_distance(const complex& x);

/// JSON dump {"nu":[re,im],"m_lo":M,"n_hi":N,"coeffs":[[re,im],...]}.
std::string multiplicative_to_json(const MultiplicativeSolution& w);

} // namespace dche
