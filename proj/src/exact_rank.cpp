#include "nnrank/exact_rank.hpp"

#include <utility>

namespace nnrank {

void IntegerMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

std::size_t exact_rank(IntegerMatrix m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    mpz_class prev_pivot = 1;
    mpz_class tmp;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot_row = rank;
        while (pivot_row < rows && sgn(m(pivot_row, col)) == 0) ++pivot_row;
        if (pivot_row == rows) continue;
        m.swap_rows(rank, pivot_row);

        const mpz_class& pivot = m(rank, col);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            const mpz_class factor = m(i, col);
            for (std::size_t j = col + 1; j < cols; ++j) {
                // m(i,j) = (pivot * m(i,j) - factor * m(rank,j)) / prev_pivot
                tmp = pivot * m(i, j);
                tmp -= factor * m(rank, j);
                mpz_divexact(m(i, j).get_mpz_t(), tmp.get_mpz_t(), prev_pivot.get_mpz_t());
            }
            m(i, col) = 0;
        }
        prev_pivot = pivot;
        ++rank;
    }
    return rank;
}

}  // namespace nnrank
