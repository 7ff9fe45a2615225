#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "nnrank/tensor.hpp"

namespace nnrank {

struct MaxRankCertificate;

enum class LowerProvenance { zero, flattening, fooling_set, rank_le_2_rule, witness_ball };
enum class UpperProvenance { zero, slice, ntf_fit, rank_le_2_rule };

std::string_view to_string(LowerProvenance p) noexcept;
std::string_view to_string(UpperProvenance p) noexcept;

/// Certified bounds lower <= nnrank <= upper.
struct RankInterval {
    std::size_t lower = 0;
    std::size_t upper = 0;
    LowerProvenance lower_provenance = LowerProvenance::zero;
    UpperProvenance upper_provenance = UpperProvenance::zero;
    /// Nonnegative decomposition with `upper` terms, when one was built.
    std::optional<Decomposition> upper_decomposition;

    bool exact() const noexcept { return lower == upper; }
};

struct NtfConfig {
    std::size_t restarts = 20;
    std::size_t max_iters = 2000;
    double residual_tol = 1e-8;  ///< relative
    Seed seed = 0;
    /// Initial factor entries are uniform(0, init_scale); 0 selects the
    /// maximum entry of the target tensor.
    double init_scale = 0.0;
    bool record_history = false;

    void validate() const;
};

struct NtfResult {
    Decomposition decomposition;
    double relative_residual = 0.0;
    std::size_t iterations_used = 0;
    bool converged = false;
    /// Squared-error objective after each sweep of the returned restart
    /// (only when NtfConfig::record_history is set).
    std::vector<double> objective_history;
};

/// Slice decomposition: one rank-1 term per nonzero fiber along the fiber
/// mode, with basis vectors in every other mode. Reconstructs t exactly and
/// has at most shape.slice_bound() terms.
Decomposition canonical_decomposition(const DenseTensor& t);

/// Number of nonzero fibers along the fiber mode.
std::size_t nonzero_fiber_count(const DenseTensor& t);

/// Largest matrix rank over the single-mode flattenings (plus the 2-vs-2
/// splits for order 4).
std::size_t flattening_rank_lower_bound(const DenseTensor& t, double tol = 1e-9);

using MatrixPosition = std::pair<std::size_t, std::size_t>;

/// Support positions whose pairwise cross products m[i,l]*m[k,j] vanish.
/// Exact maximum when min(rows, cols) <= 6, greedy otherwise.
std::vector<MatrixPosition> fooling_set(const DenseTensor& m);
std::size_t fooling_set_lower_bound(const DenseTensor& m);
bool is_fooling_set(const DenseTensor& m, const std::vector<MatrixPosition>& set);

/// Best of cfg.restarts HALS runs fitting r nonnegative terms to t. The
/// search stops at the first converged restart.
NtfResult ntf_fit(const DenseTensor& t, std::size_t r, const NtfConfig& cfg = {});

/// Assemble the interval from flattening/fooling-set lower bounds, the
/// matrix rank <= 2 rule, an optional ball certificate for t, the nonzero
/// fiber count and an ascending NTF scan.
RankInterval nnrank_interval(const DenseTensor& t, const NtfConfig& cfg = {},
                             const MaxRankCertificate* certificate = nullptr);

}  // namespace nnrank
