#include "nnrank/experiments.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "nnrank/errors.hpp"
#include "nnrank/generic_rank.hpp"
#include "nnrank/witness.hpp"

namespace nnrank {

using nlohmann::json;

Distribution Distribution::parse(const std::string& name, double sigma) {
    if (name == "uniform01") return uniform01();
    if (name == "exponential") return exponential();
    std::string base = name;
    if (const auto colon = name.find(':'); colon != std::string::npos) {
        base = name.substr(0, colon);
        try {
            sigma = std::stod(name.substr(colon + 1));
        } catch (const std::exception&) {
            throw InvalidArgument("bad sigma in distribution \"" + name + "\"");
        }
    }
    if (base == "indicator-noise") {
        if (!(sigma > 0.0)) throw InvalidArgument("indicator-noise needs sigma > 0");
        return indicator_noise(sigma);
    }
    throw InvalidArgument("unknown distribution \"" + name + "\"");
}

std::string Distribution::name() const {
    switch (kind) {
        case Kind::uniform01: return "uniform01";
        case Kind::exponential: return "exponential";
        case Kind::indicator_noise: return "indicator-noise";
    }
    return "?";
}

DenseTensor sample_tensor(const Shape& shape, const Distribution& dist, Rng& rng) {
    switch (dist.kind) {
        case Distribution::Kind::uniform01: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            DenseTensor t(shape);
            for (double& v : t.values()) v = u(rng);
            return t;
        }
        case Distribution::Kind::exponential: {
            std::exponential_distribution<double> e(1.0);
            DenseTensor t(shape);
            for (double& v : t.values()) v = e(rng);
            return t;
        }
        case Distribution::Kind::indicator_noise: {
            if (!(dist.sigma > 0.0)) throw InvalidArgument("indicator-noise needs sigma > 0");
            std::normal_distribution<double> n(0.0, dist.sigma);
            DenseTensor t = witness_tensor(shape).center;
            for (double& v : t.values()) v += std::abs(n(rng));
            return t;
        }
    }
    throw InvalidArgument("unknown distribution");
}

void ExperimentConfig::validate() const {
    if (shape.order() == 0) throw InvalidArgument("census: shape required");
    if (samples < 1) throw InvalidArgument("census: samples must be >= 1");
    if (distribution.kind == Distribution::Kind::indicator_noise && !(distribution.sigma > 0.0)) {
        throw InvalidArgument("census: indicator-noise needs sigma > 0");
    }
    ntf.validate();
}

namespace {

SampleOutcome run_sample(const ExperimentConfig& cfg, std::size_t index) {
    Rng rng = make_rng(cfg.seed, index);
    const DenseTensor t = sample_tensor(cfg.shape, cfg.distribution, rng);
    NtfConfig ntf = cfg.ntf;
    ntf.seed = derive_seed(cfg.ntf.seed ^ cfg.seed, index);
    const auto certificate = try_certify_max_rank(t);
    const RankInterval interval = nnrank_interval(t, ntf, certificate ? &*certificate : nullptr);
    return SampleOutcome{interval.lower, interval.upper, interval.lower_provenance, interval.upper_provenance,
                         certificate.has_value()};
}

}  // namespace

ExperimentReport run_census(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    report.slice_bound = cfg.shape.slice_bound();
    report.grank_used = generic_rank(cfg.shape, cfg.seed);
    report.samples.resize(cfg.samples);

    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.samples);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cfg.samples; i = next++) report.samples[i] = run_sample(cfg, i);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::size_t exact = 0;
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const auto& s = report.samples[i];
        ++report.histogram[{s.lower, s.upper}];
        exact += s.exact();
        report.ball_certified += s.ball_certified;
        const bool contained = s.lower >= 1 && s.lower <= s.upper && s.upper <= report.slice_bound;
        const bool in_range = !s.exact() || (s.lower >= report.grank_used && s.lower <= report.slice_bound);
        if (!contained || !in_range) report.flagged.push_back(i);
    }
    report.exact_fraction = static_cast<double>(exact) / static_cast<double>(cfg.samples);
    report.range_check = report.flagged.empty();
    return report;
}

json to_json(const ExperimentReport& report) {
    const auto& cfg = report.config;
    json config;
    config["dims"] = cfg.shape.dims();
    config["samples"] = cfg.samples;
    config["distribution"] = cfg.distribution.name();
    if (cfg.distribution.kind == Distribution::Kind::indicator_noise) config["sigma"] = cfg.distribution.sigma;
    config["seed"] = cfg.seed;
    config["ntf"] = {{"restarts", cfg.ntf.restarts},
                     {"max_iters", cfg.ntf.max_iters},
                     {"residual_tol", cfg.ntf.residual_tol},
                     {"seed", cfg.ntf.seed},
                     {"init_scale", cfg.ntf.init_scale}};

    json histogram = json::array();
    for (const auto& [key, count] : report.histogram) {
        const auto [lo, hi] = key;
        const std::string label =
            lo == hi ? std::to_string(lo) : "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
        histogram.push_back({{"key", label}, {"lower", lo}, {"upper", hi}, {"exact", lo == hi}, {"count", count}});
    }

    json j;
    j["config"] = std::move(config);
    j["fiber_mode"] = cfg.shape.fiber_mode() + 1;
    j["slice_bound"] = report.slice_bound;
    j["grank_used"] = report.grank_used;
    j["histogram"] = std::move(histogram);
    j["exact_fraction"] = report.exact_fraction;
    j["ball_certified"] = report.ball_certified;
    j["flagged"] = report.flagged;
    j["range_check"] = report.range_check;
    return j;
}

std::string to_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "sample_index,lower,upper,exact,lower_provenance,upper_provenance\n";
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const auto& s = report.samples[i];
        os << i << ',' << s.lower << ',' << s.upper << ',' << (s.exact() ? "true" : "false") << ','
           << to_string(s.lower_provenance) << ',' << to_string(s.upper_provenance) << '\n';
    }
    return os.str();
}

}  // namespace nnrank
