#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nnrank/generic_rank.hpp"
#include "nnrank/tensor.hpp"

namespace nnrank {

/// Multi-indices whose 1-based coordinate sum is divisible by the fiber-mode
/// dimension, returned 0-based in lexicographic order. Every fiber along the
/// fiber mode contains exactly one of them, so there are slice_bound() in
/// total.
std::vector<MultiIndex> index_set(const Shape& shape);

/// Indicator tensor of index_set and the radius 1/(3N) of the ball around it
/// in which every nonnegative tensor has nonnegative rank N = slice_bound().
struct WitnessBall {
    Shape shape;
    std::vector<MultiIndex> support;
    DenseTensor center;
    double radius = 0.0;
};

WitnessBall witness_tensor(const Shape& shape);

/// Exact 1/(3N) as a rational.
mpq_class witness_radius_exact(const Shape& shape);

struct MaxRankCertificate {
    Shape shape;
    DenseTensor tensor;
    double distance = 0.0;
    double margin = 0.0;  ///< radius - distance
    std::size_t certified_rank = 0;
};

/// Certifies nnrank t = slice_bound() when t lies strictly inside the
/// witness ball. Ball membership is decided in exact rational arithmetic.
/// Throws OutsideBall, NegativeEntry or ShapeMismatch.
MaxRankCertificate certify_max_rank(const DenseTensor& t, const Shape& shape);
std::optional<MaxRankCertificate> try_certify_max_rank(const DenseTensor& t);

/// Evidence that r is a typical nonnegative rank of the format: a
/// nonnegative N-term decomposition (head: first r terms, tail: the rest)
/// whose sum lies in the witness ball, together with a full-row-rank
/// Jacobian of the r-term CP map at the head.
struct TypicalityCertificate {
    Shape shape;
    std::size_t r = 0;
    Seed seed = 0;
    double perturbation = 0.0;  ///< final box width delta of the factor noise
    Decomposition head;
    Decomposition tail;
    DenseTensor witness;  ///< eval_cp(head)
    DenseTensor total;    ///< eval_cp(head) + eval_cp(tail)
    double radius = 0.0;
    double ball_margin = 0.0;
    JacobianReport jacobian_report;
};

/// Factor entries are snapped to multiples of 2^-kSnapBits.
inline constexpr int kSnapBits = 30;
inline constexpr std::size_t kWitnessRetries = 10;

/// Builds a certificate for r in [generic rank, slice_bound()]. Throws
/// RankOutOfRange (r outside that range) or RetriesExhausted.
TypicalityCertificate typical_rank_witness(const Shape& shape, std::size_t r, Seed seed = 0);

struct VerificationResult {
    bool ok = false;
    std::vector<std::string> reasons;
};

/// Independent recheck of every certificate field. The ball test and the
/// Jacobian rank are exact; the stored witness and total must match the
/// factors to 1e-12 relative.
VerificationResult verify_typicality_certificate(const TypicalityCertificate& cert);

nlohmann::json to_json(const WitnessBall& ball);
nlohmann::json to_json(const MaxRankCertificate& cert);

/// Factor entries are written as exact decimal strings; the reader rejects
/// strings that are not exactly representable.
nlohmann::json to_json(const TypicalityCertificate& cert);
TypicalityCertificate typicality_certificate_from_json(const nlohmann::json& j);

}  // namespace nnrank
