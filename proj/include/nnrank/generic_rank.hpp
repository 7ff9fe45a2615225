#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "nnrank/exact_rank.hpp"
#include "nnrank/tensor.hpp"

namespace nnrank {

/// Outcome of the Jacobian full-row-rank test for the CP map with r terms.
struct JacobianReport {
    Shape shape;
    std::size_t r = 0;
    Seed point_seed = 0;
    std::size_t jac_rows = 0;  ///< prod N_j
    std::size_t jac_cols = 0;  ///< r * sum N_j
    std::size_t achieved_rank = 0;
    bool full_row_rank = false;
    std::size_t trials = 0;

    friend bool operator==(const JacobianReport&, const JacobianReport&) = default;
};

/// Half-width of the box [-B, B] random Jacobian points are drawn from.
inline constexpr long kPointBox = 101;
inline constexpr std::size_t kDefaultTrials = 3;

/// Upper bound on the Jacobian rank implied by the (d-1)-dimensional scaling
/// stabilizer of each term: min(prod N_j, r * (sum N_j - d + 1)).
std::size_t jacobian_rank_cap(const Shape& shape, std::size_t r);

/// Integer factors of a rank-r point, term-major then mode.
using IntegerPoint = std::vector<std::vector<std::vector<mpz_class>>>;

/// Closed-form Jacobian of the CP map at dec.
///
/// Rows follow the row-major multi-index order of the tensor; columns are
/// ordered term-major, then mode, then coordinate. Entry
/// d t[i_1..i_d] / d a[k][j][l] = [l == i_j] * prod_{m != j} a[k][m][i_m].
DenseTensor jacobian(const Shape& shape, const Decomposition& dec);

/// Same closed form evaluated in exact integer arithmetic.
IntegerMatrix jacobian_exact(const Shape& shape, const IntegerPoint& point);

/// Random integer point with entries uniform in [-kPointBox, kPointBox].
IntegerPoint random_integer_point(const Shape& shape, std::size_t r, Seed seed);

/// Maximum exact Jacobian rank over `trials` random integer points. Trial t
/// uses a point derived from (seed, t), so the result does not depend on
/// the order in which trials run.
JacobianReport jacobian_generic_rank(const Shape& shape, std::size_t r, std::size_t trials = kDefaultTrials,
                                     Seed seed = 0);

/// Smallest r whose Jacobian reaches full row rank. Starts at the
/// dimension-count estimate, steps up while deficient, then confirms
/// minimality by stepping down.
std::size_t generic_rank(const Shape& shape, Seed seed = 0, std::size_t trials = kDefaultTrials);

/// ceil(prod N_j / (sum N_j - d + 1)). A heuristic: it under-predicts on
/// defective formats such as 3x3x3. Requires d >= 2.
std::size_t expected_generic_rank(const Shape& shape);

nlohmann::json to_json(const JacobianReport& report);
JacobianReport jacobian_report_from_json(const nlohmann::json& j);

}  // namespace nnrank
