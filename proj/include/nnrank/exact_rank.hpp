#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace nnrank {

/// Dense row-major matrix of arbitrary-precision integers.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void swap_rows(std::size_t a, std::size_t b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpz_class> data_;
};

/// Exact rank by fraction-free (Bareiss) elimination to row echelon form.
///
/// Every intermediate entry is a minor of the input, so each division by the
/// previous pivot is exact and entries stay integral.
std::size_t exact_rank(IntegerMatrix m);

}  // namespace nnrank
