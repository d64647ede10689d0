#pragma once

#include <vector>

#include "dche/types.hpp"

namespace dche {

/// Dense square complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

    int size() const { return n_; }
    complex& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const complex& operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }

private:
    int n_ = 0;
    std::vector<complex> a_;
};

/// Solves m x = rhs by LU with partial pivoting. The matrix is taken by value
/// and factored in place. Throws SingularMatrix when a pivot underflows 1e-300.
std::vector<complex> lu_solve(ComplexMatrix m, std::vector<complex> rhs);

} // namespace dche
