#include "nnrank/tensor.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nnrank/errors.hpp"

namespace nnrank {

namespace {

void check_permutation(std::span<const std::size_t> perm, std::size_t order) {
    if (perm.size() != order) throw ShapeMismatch("permutation length differs from tensor order");
    std::vector<bool> seen(order, false);
    for (auto p : perm) {
        if (p >= order || seen[p]) throw InvalidArgument("not a permutation of the modes");
        seen[p] = true;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Shape

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw InvalidArgument("shape must have order >= 1");
    for (auto n : dims_) {
        if (n == 0) throw InvalidArgument("every dimension must be >= 1");
    }
}

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

std::size_t Shape::total() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t Shape::dim_sum() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0});
}

std::size_t Shape::fiber_mode() const noexcept {
    std::size_t best = 0;
    for (std::size_t j = 1; j < dims_.size(); ++j) {
        if (dims_[j] >= dims_[best]) best = j;
    }
    return best;
}

std::size_t Shape::slice_bound() const noexcept {
    if (dims_.empty()) return 0;
    return total() / dims_[fiber_mode()];
}

std::size_t Shape::offset(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) throw ShapeMismatch("multi-index length differs from order");
    std::size_t off = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
        if (index[j] >= dims_[j]) throw InvalidArgument("multi-index out of range");
        off = off * dims_[j] + index[j];
    }
    return off;
}

MultiIndex Shape::unravel(std::size_t offset) const {
    MultiIndex index(dims_.size());
    for (std::size_t j = dims_.size(); j-- > 0;) {
        index[j] = offset % dims_[j];
        offset /= dims_[j];
    }
    return index;
}

Shape Shape::permuted(std::span<const std::size_t> perm) const {
    check_permutation(perm, order());
    std::vector<std::size_t> dims(order());
    for (std::size_t k = 0; k < order(); ++k) dims[k] = dims_[perm[k]];
    return Shape(std::move(dims));
}

// ---------------------------------------------------------------------------
// DenseTensor

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)), values_(shape_.total(), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_.total()) {
        throw ShapeMismatch("value count " + std::to_string(values_.size()) +
                            " does not match shape total " + std::to_string(shape_.total()));
    }
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
    return values_[shape_.offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) {
    return values_[shape_.offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

bool DenseTensor::is_nonnegative() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

bool DenseTensor::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double DenseTensor::max_entry() const noexcept {
    if (values_.empty()) return 0.0;
    return *std::max_element(values_.begin(), values_.end());
}

double DenseTensor::norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    if (shape_ != other.shape_) throw ShapeMismatch("cannot add tensors of different shapes");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double scale) {
    for (double& v : values_) v *= scale;
    return *this;
}

DenseTensor DenseTensor::permuted(std::span<const std::size_t> perm) const {
    DenseTensor out(shape_.permuted(perm));
    MultiIndex old_index(shape_.order());
    for (std::size_t off = 0; off < out.size(); ++off) {
        const auto index = out.shape().unravel(off);
        for (std::size_t k = 0; k < index.size(); ++k) old_index[perm[k]] = index[k];
        out.values_[off] = values_[shape_.offset(old_index)];
    }
    return out;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) {
    a += b;
    return a;
}

DenseTensor operator*(double scale, DenseTensor t) {
    t *= scale;
    return t;
}

DenseTensor zero_matrix(std::size_t rows, std::size_t cols) { return DenseTensor(Shape{rows, cols}); }

DenseTensor identity_matrix(std::size_t n) {
    DenseTensor m = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseTensor make_matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major) {
    return DenseTensor(Shape{rows, cols}, std::move(row_major));
}

// ---------------------------------------------------------------------------
// Rank1Term / Decomposition

bool Rank1Term::conforms_to(const Shape& shape) const noexcept {
    if (factors.size() != shape.order()) return false;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (factors[j].size() != shape.dims()[j]) return false;
    }
    return true;
}

bool Rank1Term::is_nonnegative() const noexcept {
    return std::all_of(factors.begin(), factors.end(), [](const auto& f) {
        return std::all_of(f.begin(), f.end(), [](double v) { return v >= 0.0; });
    });
}

Rank1Term Rank1Term::permuted(std::span<const std::size_t> perm) const {
    check_permutation(perm, factors.size());
    Rank1Term out;
    out.factors.reserve(factors.size());
    for (auto p : perm) out.factors.push_back(factors[p]);
    return out;
}

Decomposition::Decomposition(Shape shape) : shape_(std::move(shape)) {}

Decomposition::Decomposition(Shape shape, std::vector<Rank1Term> terms) : shape_(std::move(shape)) {
    terms_.reserve(terms.size());
    for (auto& t : terms) push_back(std::move(t));
}

void Decomposition::push_back(Rank1Term term) {
    if (!term.conforms_to(shape_)) throw ShapeMismatch("rank-1 term does not conform to shape");
    terms_.push_back(std::move(term));
}

bool Decomposition::is_nonnegative() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.is_nonnegative(); });
}

Decomposition Decomposition::concatenated(const Decomposition& other) const {
    if (shape_ != other.shape_) throw ShapeMismatch("cannot concatenate decompositions of different shapes");
    Decomposition out = *this;
    for (const auto& t : other.terms_) out.terms_.push_back(t);
    return out;
}

Decomposition Decomposition::permuted(std::span<const std::size_t> perm) const {
    Decomposition out(shape_.permuted(perm));
    for (const auto& t : terms_) out.terms_.push_back(t.permuted(perm));
    return out;
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void accumulate_outer(const Rank1Term& term, const Shape& shape, std::span<double> out) {
    const std::size_t d = shape.order();
    // Odometer over multi-indices in row-major order, carrying partial
    // products so each entry costs one multiplication.
    MultiIndex index(d, 0);
    std::vector<double> prefix(d + 1, 1.0);
    for (std::size_t j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * term.factors[j][0];
    for (std::size_t off = 0; off < out.size(); ++off) {
        out[off] += prefix[d];
        std::size_t j = d;
        while (j-- > 0) {
            if (++index[j] < shape.dims()[j]) break;
            index[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1)) break;
        for (std::size_t k = j; k < d; ++k) prefix[k + 1] = prefix[k] * term.factors[k][index[k]];
    }
}

}  // namespace

DenseTensor outer(const Rank1Term& term, const Shape& shape) {
    if (!term.conforms_to(shape)) throw ShapeMismatch("rank-1 term does not conform to shape");
    DenseTensor t(shape);
    accumulate_outer(term, shape, t.values());
    return t;
}

DenseTensor eval_cp(const Decomposition& dec) {
    DenseTensor t(dec.shape());
    for (const auto& term : dec.terms()) accumulate_outer(term, dec.shape(), t.values());
    return t;
}

double frobenius_distance(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeMismatch("frobenius_distance: shapes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

DenseTensor flatten(const DenseTensor& t, std::span<const std::size_t> row_modes) {
    const Shape& shape = t.shape();
    const std::size_t d = shape.order();
    std::vector<bool> is_row(d, false);
    for (auto m : row_modes) {
        if (m >= d) throw InvalidArgument("flatten: mode out of range");
        is_row[m] = true;
    }
    const auto n_row = static_cast<std::size_t>(std::count(is_row.begin(), is_row.end(), true));
    if (n_row == 0 || n_row == d) throw InvalidArgument("flatten: row modes must be a nonempty proper subset");

    std::size_t rows = 1;
    for (std::size_t j = 0; j < d; ++j) {
        if (is_row[j]) rows *= shape.dim(j);
    }
    DenseTensor m = zero_matrix(rows, shape.total() / rows);
    for (std::size_t off = 0; off < t.size(); ++off) {
        const auto index = shape.unravel(off);
        std::size_t r = 0;
        std::size_t c = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (is_row[j]) {
                r = r * shape.dim(j) + index[j];
            } else {
                c = c * shape.dim(j) + index[j];
            }
        }
        m(r, c) = t[off];
    }
    return m;
}

std::size_t matrix_rank(const DenseTensor& m, double tol) {
    if (m.shape().order() != 2) throw ShapeMismatch("matrix_rank expects an order-2 tensor");
    if (tol < 0.0) throw InvalidArgument("matrix_rank: tolerance must be nonnegative");
    Eigen::MatrixXd a(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
    const double cutoff = tol * sigma(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff) ++rank;
    }
    return rank;
}

}  // namespace nnrank
