#include "nnrank/generic_rank.hpp"

#include <algorithm>

#include "nnrank/errors.hpp"
#include "nnrank/random.hpp"
#include "nnrank/tensor_io.hpp"

namespace nnrank {

namespace {

/// Evaluates the closed-form Jacobian for any scalar type. `factor(k, j, l)`
/// returns entry l of the mode-j vector of term k; `store(row, col, value)`
/// receives each potentially nonzero entry.
template <class T, class Factor, class Store>
void fill_jacobian(const Shape& shape, std::size_t r, Factor factor, Store store) {
    const std::size_t d = shape.order();
    std::vector<std::size_t> mode_offset(d, 0);
    for (std::size_t j = 1; j < d; ++j) mode_offset[j] = mode_offset[j - 1] + shape.dim(j - 1);
    const std::size_t term_stride = shape.dim_sum();

    std::vector<T> prefix(d + 1);
    std::vector<T> suffix(d + 1);
    for (std::size_t row = 0; row < shape.total(); ++row) {
        const auto index = shape.unravel(row);
        for (std::size_t k = 0; k < r; ++k) {
            prefix[0] = 1;
            for (std::size_t j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * factor(k, j, index[j]);
            suffix[d] = 1;
            for (std::size_t j = d; j-- > 0;) suffix[j] = suffix[j + 1] * factor(k, j, index[j]);
            for (std::size_t j = 0; j < d; ++j) {
                store(row, k * term_stride + mode_offset[j] + index[j], T(prefix[j] * suffix[j + 1]));
            }
        }
    }
}

}  // namespace

std::size_t jacobian_rank_cap(const Shape& shape, std::size_t r) {
    return std::min(shape.total(), r * (shape.dim_sum() - shape.order() + 1));
}

DenseTensor jacobian(const Shape& shape, const Decomposition& dec) {
    if (dec.shape() != shape) throw ShapeMismatch("jacobian: decomposition shape differs");
    if (dec.rank() == 0) throw InvalidArgument("jacobian: need at least one term");
    DenseTensor jac = zero_matrix(shape.total(), dec.rank() * shape.dim_sum());
    const auto& terms = dec.terms();
    fill_jacobian<double>(
        shape, dec.rank(), [&](std::size_t k, std::size_t j, std::size_t l) { return terms[k].factors[j][l]; },
        [&](std::size_t row, std::size_t col, double v) { jac(row, col) = v; });
    return jac;
}

IntegerMatrix jacobian_exact(const Shape& shape, const IntegerPoint& point) {
    for (const auto& term : point) {
        if (term.size() != shape.order()) throw ShapeMismatch("jacobian_exact: term order differs");
        for (std::size_t j = 0; j < term.size(); ++j) {
            if (term[j].size() != shape.dim(j)) throw ShapeMismatch("jacobian_exact: factor length differs");
        }
    }
    if (point.empty()) throw InvalidArgument("jacobian_exact: need at least one term");
    IntegerMatrix jac(shape.total(), point.size() * shape.dim_sum());
    fill_jacobian<mpz_class>(
        shape, point.size(),
        [&](std::size_t k, std::size_t j, std::size_t l) -> const mpz_class& { return point[k][j][l]; },
        [&](std::size_t row, std::size_t col, mpz_class v) { jac(row, col) = std::move(v); });
    return jac;
}

IntegerPoint random_integer_point(const Shape& shape, std::size_t r, Seed seed) {
    Rng rng(seed);
    std::uniform_int_distribution<long> entry(-kPointBox, kPointBox);
    IntegerPoint point(r);
    for (auto& term : point) {
        term.resize(shape.order());
        for (std::size_t j = 0; j < shape.order(); ++j) {
            term[j].resize(shape.dim(j));
            for (auto& v : term[j]) v = entry(rng);
        }
    }
    return point;
}

JacobianReport jacobian_generic_rank(const Shape& shape, std::size_t r, std::size_t trials, Seed seed) {
    if (r == 0) throw InvalidArgument("jacobian_generic_rank: r must be >= 1");
    if (trials == 0) throw InvalidArgument("jacobian_generic_rank: trials must be >= 1");
    JacobianReport report;
    report.shape = shape;
    report.r = r;
    report.point_seed = seed;
    report.jac_rows = shape.total();
    report.jac_cols = r * shape.dim_sum();
    report.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto point = random_integer_point(shape, r, derive_seed(seed, t));
        report.achieved_rank = std::max(report.achieved_rank, exact_rank(jacobian_exact(shape, point)));
    }
    report.full_row_rank = report.achieved_rank == report.jac_rows;
    return report;
}

std::size_t expected_generic_rank(const Shape& shape) {
    if (shape.order() < 2) throw InvalidArgument("expected_generic_rank: order must be >= 2");
    const std::size_t per_term = shape.dim_sum() - shape.order() + 1;
    return (shape.total() + per_term - 1) / per_term;
}

std::size_t generic_rank(const Shape& shape, Seed seed, std::size_t trials) {
    auto full = [&](std::size_t r) { return jacobian_generic_rank(shape, r, trials, seed).full_row_rank; };
    const std::size_t per_term = shape.dim_sum() - shape.order() + 1;
    std::size_t r = std::max<std::size_t>(1, (shape.total() + per_term - 1) / per_term);
    const std::size_t ceiling = std::max<std::size_t>(shape.slice_bound(), 1);
    while (!full(r)) {
        if (r >= ceiling) {
            throw Error("generic_rank: Jacobian deficient at the slice bound; increase trials");
        }
        ++r;
    }
    while (r > 1 && full(r - 1)) --r;
    return r;
}

nlohmann::json to_json(const JacobianReport& report) {
    nlohmann::json j;
    j["dims"] = report.shape.dims();
    j["r"] = report.r;
    j["point_seed"] = report.point_seed;
    j["jac_rows"] = report.jac_rows;
    j["jac_cols"] = report.jac_cols;
    j["achieved_rank"] = report.achieved_rank;
    j["full_row_rank"] = report.full_row_rank;
    j["trials"] = report.trials;
    return j;
}

JacobianReport jacobian_report_from_json(const nlohmann::json& j) {
    try {
        JacobianReport report;
        report.shape = shape_from_json(j.at("dims"));
        report.r = j.at("r").get<std::size_t>();
        report.point_seed = j.at("point_seed").get<Seed>();
        report.jac_rows = j.at("jac_rows").get<std::size_t>();
        report.jac_cols = j.at("jac_cols").get<std::size_t>();
        report.achieved_rank = j.at("achieved_rank").get<std::size_t>();
        report.full_row_rank = j.at("full_row_rank").get<bool>();
        report.trials = j.at("trials").get<std::size_t>();
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad Jacobian report: ") + e.what());
    }
}

}  // namespace nnrank
