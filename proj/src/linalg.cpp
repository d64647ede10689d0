#include "dche/linalg.hpp"

#include <utility>

namespace dche {

std::vector<complex> lu_solve(ComplexMatrix m, std::vector<complex> rhs) {
    const int n = m.size();
    if (static_cast<int>(rhs.size()) != n)
        throw Error("lu_solve: dimension mismatch");

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(m(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < 1e-300)
            throw SingularMatrix("lu_solve: pivot underflow");
        if (piv != k) {
            for (int j = k; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(rhs[k], rhs[piv]);
        }
        const complex inv_piv = 1.0 / m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const complex f = m(i, k) * inv_piv;
            if (f == complex(0.0, 0.0)) continue;
            m(i, k) = f;
            for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            rhs[i] -= f * rhs[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        complex s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * rhs[j];
        rhs[i] = s / m(i, i);
    }
    return rhs;
}

} // namespace dche
