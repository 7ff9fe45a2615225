#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nnrank/nonneg_rank.hpp"
#include "nnrank/random.hpp"
#include "nnrank/tensor.hpp"

namespace nnrank {

struct Distribution {
    enum class Kind { uniform01, exponential, indicator_noise };
    Kind kind = Kind::uniform01;
    double sigma = 0.0;  ///< indicator_noise only

    static Distribution uniform01() { return {Kind::uniform01, 0.0}; }
    static Distribution exponential() { return {Kind::exponential, 0.0}; }
    static Distribution indicator_noise(double sigma) { return {Kind::indicator_noise, sigma}; }

    /// "uniform01", "exponential", "indicator-noise" (sigma separately) or
    /// "indicator-noise:<sigma>".
    static Distribution parse(const std::string& name, double sigma = 0.0);
    std::string name() const;
};

/// i.i.d. nonnegative entries; indicator_noise gives T0 + |Normal(0, sigma)|.
DenseTensor sample_tensor(const Shape& shape, const Distribution& dist, Rng& rng);

struct ExperimentConfig {
    Shape shape;
    std::size_t samples = 1;
    Distribution distribution;
    Seed seed = 0;
    NtfConfig ntf;
    /// 0 picks std::thread::hardware_concurrency(). Results never depend
    /// on it.
    std::size_t workers = 0;

    void validate() const;
};

struct SampleOutcome {
    std::size_t lower = 0;
    std::size_t upper = 0;
    LowerProvenance lower_provenance = LowerProvenance::zero;
    UpperProvenance upper_provenance = UpperProvenance::zero;
    bool ball_certified = false;

    bool exact() const noexcept { return lower == upper; }
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<SampleOutcome> samples;
    /// (lower, upper) -> count; exact ranks have lower == upper.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> histogram;
    double exact_fraction = 0.0;
    std::size_t grank_used = 0;
    std::size_t slice_bound = 0;
    std::size_t ball_certified = 0;
    std::vector<std::size_t> flagged;  ///< sample indices outside the range
    bool range_check = false;
};

ExperimentReport run_census(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentReport& report);
std::string to_csv(const ExperimentReport& report);

}  // namespace nnrank
