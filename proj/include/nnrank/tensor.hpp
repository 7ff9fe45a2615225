#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace nnrank {

using Seed = std::uint64_t;
using MultiIndex = std::vector<std::size_t>;

/// Tensor format N_1 x ... x N_d.
///
/// Modes and multi-indices are 0-based inside the library; the 1-based
/// convention is applied only when reading or writing files.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims);
    Shape(std::initializer_list<std::size_t> dims);

    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    std::size_t total() const noexcept;
    std::size_t dim_sum() const noexcept;

    /// Mode whose fibers are used by the slice decomposition: the last mode
    /// of maximal dimension.
    std::size_t fiber_mode() const noexcept;

    /// Product of all dims except the fiber mode. This is the maximal
    /// nonnegative rank of the format.
    std::size_t slice_bound() const noexcept;

    /// Row-major linear offset (last index fastest).
    std::size_t offset(std::span<const std::size_t> index) const;
    MultiIndex unravel(std::size_t offset) const;

    Shape permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
};

class DenseTensor {
public:
    DenseTensor() = default;
    /// Zero tensor.
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double at(std::span<const std::size_t> index) const { return values_[shape_.offset(index)]; }
    double& at(std::span<const std::size_t> index) { return values_[shape_.offset(index)]; }
    double at(std::initializer_list<std::size_t> index) const;
    double& at(std::initializer_list<std::size_t> index);

    bool is_nonnegative() const noexcept;
    bool is_zero() const noexcept;
    double max_entry() const noexcept;
    double norm() const noexcept;

    /// Matrix accessors for order-2 tensors.
    std::size_t rows() const { return shape_.dim(0); }
    std::size_t cols() const { return shape_.dim(1); }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols() + j]; }

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator*=(double scale);

    DenseTensor permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    std::vector<double> values_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double scale, DenseTensor t);

DenseTensor zero_matrix(std::size_t rows, std::size_t cols);
DenseTensor identity_matrix(std::size_t n);
DenseTensor make_matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

/// One factor vector per mode.
struct Rank1Term {
    std::vector<std::vector<double>> factors;

    bool conforms_to(const Shape& shape) const noexcept;
    bool is_nonnegative() const noexcept;
    Rank1Term permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const Rank1Term&, const Rank1Term&) = default;
};

/// Ordered list of rank-1 terms over a shape; the term count is the
/// rank of the expression and is never reduced implicitly.
class Decomposition {
public:
    Decomposition() = default;
    explicit Decomposition(Shape shape);
    Decomposition(Shape shape, std::vector<Rank1Term> terms);

    const Shape& shape() const noexcept { return shape_; }
    const std::vector<Rank1Term>& terms() const noexcept { return terms_; }
    std::size_t rank() const noexcept { return terms_.size(); }

    void push_back(Rank1Term term);
    bool is_nonnegative() const noexcept;

    /// Terms of this followed by terms of other (same shape).
    Decomposition concatenated(const Decomposition& other) const;
    Decomposition permuted(std::span<const std::size_t> perm) const;

private:
    Shape shape_;
    std::vector<Rank1Term> terms_;
};

/// t[i_1..i_d] = prod_j factors[j][i_j].
DenseTensor outer(const Rank1Term& term, const Shape& shape);

/// Sum of outer products; the empty decomposition gives the zero tensor.
DenseTensor eval_cp(const Decomposition& dec);

double frobenius_distance(const DenseTensor& a, const DenseTensor& b);

/// Unfold into a matrix whose rows run over row_modes (in increasing mode
/// order, row-major) and whose columns run over the remaining modes.
DenseTensor flatten(const DenseTensor& t, std::span<const std::size_t> row_modes);

/// Number of singular values above tol * sigma_max. Zero matrix has rank 0.
std::size_t matrix_rank(const DenseTensor& m, double tol = 1e-9);

}  // namespace nnrank
