// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances and time limits are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nnrank/errors.hpp"
#include "nnrank/experiments.hpp"
#include "nnrank/generic_rank.hpp"
#include "nnrank/nonneg_rank.hpp"
#include "nnrank/witness.hpp"

using namespace nnrank;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    std::function<Outcome()> run;
};

DenseTensor fooling4x4() {
    return make_matrix(4, 4, {1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0});
}

// --- 1 ---------------------------------------------------------------------
Outcome generic_ranks() {
    Outcome out;
    const std::vector<std::pair<Shape, std::size_t>> cases{{Shape{2, 2, 2}, 2}, {Shape{2, 2, 3}, 3},
                                                           {Shape{2, 3, 3}, 3}, {Shape{3, 3, 3}, 5},
                                                           {Shape{2, 2, 2, 2}, 4}, {Shape{2, 2, 4}, 4}};
    std::ostringstream summary;
    for (const auto& [shape, expected] : cases) {
        for (Seed seed = 1; seed <= 5; ++seed) {
            const std::size_t got = generic_rank(shape, seed, 3);
            out.require(got == expected, "grank(" + std::to_string(shape.total()) + " entries, seed " +
                                             std::to_string(seed) + ") = " + std::to_string(got));
        }
        summary << expected << ' ';
    }
    if (out.pass) out.detail = "ranks " + summary.str() + "unanimous over 5 seeds x 3 trials";
    return out;
}

// --- 2 ---------------------------------------------------------------------
Outcome example_fixture() {
    Outcome out;
    const DenseTensor m = fooling4x4();
    const std::size_t rank = matrix_rank(m, 1e-9);
    out.require(rank == 3, "matrix_rank = " + std::to_string(rank));
    const RankInterval iv = nnrank_interval(m);
    out.require(iv.lower == 4 && iv.upper == 4 && iv.exact(),
                "interval [" + std::to_string(iv.lower) + "," + std::to_string(iv.upper) + "]");
    if (out.pass) {
        out.detail = "matrix_rank 3, nnrank [4,4] exact (" + std::string(to_string(iv.lower_provenance)) + " / " +
                     std::string(to_string(iv.upper_provenance)) + ")";
    }
    return out;
}

// --- 3 ---------------------------------------------------------------------
Outcome index_set_cardinality() {
    Outcome out;
    std::size_t shapes = 0;
    for (std::size_t d = 1; d <= 5; ++d) {
        std::vector<std::size_t> dims(d, 1);
        for (;;) {
            const Shape shape(dims);
            ++shapes;
            const std::size_t size = index_set(shape).size();
            if (size != shape.slice_bound()) {
                out.require(false, "shape with " + std::to_string(shape.total()) + " entries: #I = " +
                                       std::to_string(size));
            }
            std::size_t j = 0;
            while (j < d && ++dims[j] > 5) dims[j++] = 1;
            if (j == d) break;
        }
    }
    if (out.pass) out.detail = std::to_string(shapes) + " shapes, #I = N for all";
    return out;
}

// --- 4 ---------------------------------------------------------------------
Outcome reconstruction() {
    Outcome out;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> order(1, 4);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    std::bernoulli_distribution sparse(0.2);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::size_t> dims(order(rng));
        for (auto& n : dims) n = dim(rng);
        DenseTensor t{Shape(dims)};
        for (double& v : t.values()) v = sparse(rng) ? 0.0 : value(rng);
        const Decomposition dec = canonical_decomposition(t);
        const double rel = frobenius_distance(eval_cp(dec), t) / std::max(t.norm(), 1e-300);
        worst = std::max(worst, rel);
        out.require(rel <= 1e-12, "relative error " + std::to_string(rel));
        out.require(dec.rank() <= t.shape().slice_bound(), "term count above slice bound");
    }
    if (out.pass) {
        std::ostringstream os;
        os << "200 tensors, worst relative error " << worst;
        out.detail = os.str();
    }
    return out;
}

// --- 5 ---------------------------------------------------------------------
std::vector<std::string> certificate_dumps(Outcome& out) {
    std::vector<std::string> dumps;
    const std::vector<std::pair<Shape, std::vector<std::size_t>>> cases{{Shape{2, 2, 2}, {2, 3, 4}},
                                                                        {Shape{2, 2, 3}, {3, 4}}};
    for (const auto& [shape, ranks] : cases) {
        const std::size_t grank = generic_rank(shape, 1);
        out.require(ranks.front() == grank && ranks.back() == shape.slice_bound(), "range endpoints");
        for (std::size_t r : ranks) {
            try {
                const TypicalityCertificate cert = typical_rank_witness(shape, r, 100 + r);
                const VerificationResult v = verify_typicality_certificate(cert);
                out.require(v.ok, "verify failed for r = " + std::to_string(r));
                const auto j = to_json(cert);
                const bool round_trip = verify_typicality_certificate(typicality_certificate_from_json(j)).ok;
                out.require(round_trip, "verify after JSON round trip failed for r = " + std::to_string(r));
                dumps.push_back(j.dump());
            } catch (const Error& e) {
                out.require(false, std::string("r = ") + std::to_string(r) + ": " + e.what());
            }
        }
        bool rejected = false;
        try {
            (void)typical_rank_witness(shape, grank - 1, 7);
        } catch (const RankOutOfRange&) {
            rejected = true;
        }
        out.require(rejected, "r = grank - 1 was not rejected");
    }
    return dumps;
}

Outcome typicality_certificates() {
    Outcome out;
    certificate_dumps(out);
    if (out.pass) out.detail = "2x2x2 r in {2,3,4}, 2x2x3 r in {3,4} verified; grank-1 rejected";
    return out;
}

// --- 6 ---------------------------------------------------------------------
std::vector<std::string> ball_dumps(Outcome& out, std::size_t& spurious) {
    std::vector<std::string> dumps;
    spurious = 0;
    std::size_t ntf_checked = 0;
    for (const Shape& shape : {Shape{2, 2, 2}, Shape{4, 4}}) {
        const WitnessBall ball = witness_tensor(shape);
        const MaxRankCertificate center = certify_max_rank(ball.center, shape);
        out.require(center.certified_rank == shape.slice_bound(), "T0 not certified at N");
        dumps.push_back(to_json(center).dump());

        Rng rng(606);
        std::size_t accepted = 0;
        std::vector<DenseTensor> certified;
        for (int i = 0; i < 100; ++i) {
            const DenseTensor t = sample_tensor(shape, Distribution::indicator_noise(0.001), rng);
            try {
                const MaxRankCertificate c = certify_max_rank(t, shape);
                ++accepted;
                dumps.push_back(to_json(c).dump());
                if (certified.size() < 10) certified.push_back(t);
            } catch (const OutsideBall&) {
            }
        }
        out.require(accepted == 100, std::to_string(accepted) + "/100 perturbations accepted");

        DenseTensor far = ball.center;
        far[0] += 1.1 * ball.radius;
        bool rejected = false;
        try {
            (void)certify_max_rank(far, shape);
        } catch (const OutsideBall&) {
            rejected = true;
        }
        out.require(rejected, "perturbation beyond radius accepted");

        NtfConfig cfg;
        for (std::size_t i = 0; i < certified.size(); ++i) {
            cfg.seed = 900 + i;
            const NtfResult fit = ntf_fit(certified[i], shape.slice_bound() - 1, cfg);
            ++ntf_checked;
            spurious += fit.converged;
            std::ostringstream os;
            os.precision(17);
            os << fit.relative_residual;
            dumps.push_back(os.str());
        }
    }
    out.require(ntf_checked == 20, "expected 20 NTF corroborations");
    out.require(spurious <= 1, std::to_string(spurious) + " spurious (N-1)-term fits");
    return dumps;
}

Outcome ball_certification() {
    Outcome out;
    std::size_t spurious = 0;
    ball_dumps(out, spurious);
    if (out.pass) {
        out.detail = "T0 + 200 noisy tensors certified, far tensor rejected, " + std::to_string(spurious) +
                     "/20 spurious (N-1)-term fits";
    }
    return out;
}

// --- 7 ---------------------------------------------------------------------
Outcome jacobian_finite_differences() {
    Outcome out;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> terms(1, 3);
    double worst = 0.0;
    int points = 0;
    for (const Shape& shape : {Shape{2, 2, 2}, Shape{2, 3, 4}}) {
        for (int trial = 0; trial < 10; ++trial, ++points) {
            Decomposition dec(shape);
            const std::size_t r = terms(rng);
            for (std::size_t k = 0; k < r; ++k) {
                Rank1Term term;
                for (auto n : shape.dims()) {
                    auto& f = term.factors.emplace_back(n);
                    for (double& v : f) v = u(rng);
                }
                dec.push_back(term);
            }
            const DenseTensor jac = jacobian(shape, dec);
            DenseTensor fd(jac.shape());
            constexpr double h = 1e-6;
            std::size_t col = 0;
            for (std::size_t k = 0; k < r; ++k) {
                for (std::size_t j = 0; j < shape.order(); ++j) {
                    for (std::size_t l = 0; l < shape.dim(j); ++l, ++col) {
                        auto plus = dec.terms();
                        auto minus = dec.terms();
                        plus[k].factors[j][l] += h;
                        minus[k].factors[j][l] -= h;
                        const DenseTensor tp = eval_cp(Decomposition(shape, plus));
                        const DenseTensor tm = eval_cp(Decomposition(shape, minus));
                        for (std::size_t row = 0; row < shape.total(); ++row) fd(row, col) = (tp[row] - tm[row]) / (2 * h);
                    }
                }
            }
            const double rel = frobenius_distance(fd, jac) / jac.norm();
            worst = std::max(worst, rel);
            out.require(rel <= 1e-6, "relative error " + std::to_string(rel));
        }
    }
    if (out.pass) {
        std::ostringstream os;
        os << points << " points, worst relative error " << worst;
        out.detail = os.str();
    }
    return out;
}

// --- 8 ---------------------------------------------------------------------
ExperimentConfig census_config(std::size_t workers) {
    ExperimentConfig cfg;
    cfg.shape = Shape{2, 2, 2};
    cfg.samples = 1000;
    cfg.distribution = Distribution::uniform01();
    cfg.seed = 7;
    cfg.workers = workers;
    return cfg;
}

Outcome census_containment() {
    Outcome out;
    const ExperimentReport rep = run_census(census_config(0));
    for (const auto& s : rep.samples) {
        if (!(s.lower >= 1 && s.lower <= s.upper && s.upper <= 4)) {
            out.require(false, "interval outside [1,4]");
            break;
        }
        if (s.exact() && (s.lower < 2 || s.lower > 4)) {
            out.require(false, "exact rank " + std::to_string(s.lower) + " outside {2,3,4}");
            break;
        }
    }
    out.require(rep.range_check, "range_check false");
    out.require(rep.grank_used == 2, "grank_used " + std::to_string(rep.grank_used));
    if (out.pass) {
        std::ostringstream os;
        os << "histogram";
        for (const auto& [key, count] : rep.histogram) {
            os << ' ' << (key.first == key.second ? std::to_string(key.first)
                                                   : "[" + std::to_string(key.first) + "," +
                                                         std::to_string(key.second) + "]")
               << ':' << count;
        }
        os << ", exact fraction " << rep.exact_fraction;
        out.detail = os.str();
    }
    return out;
}

// --- 9 ---------------------------------------------------------------------
Outcome determinism() {
    Outcome out;
    Outcome scratch;
    out.require(certificate_dumps(scratch) == certificate_dumps(scratch), "certificate JSON differs");
    std::size_t s1 = 0;
    std::size_t s2 = 0;
    out.require(ball_dumps(scratch, s1) == ball_dumps(scratch, s2), "ball certificate JSON differs");
    const ExperimentReport a = run_census(census_config(1));
    const ExperimentReport b = run_census(census_config(4));
    out.require(to_json(a).dump() == to_json(b).dump(), "census JSON differs");
    out.require(to_csv(a) == to_csv(b), "census CSV differs");
    if (out.pass) out.detail = "criteria 5, 6, 8 outputs byte-identical on repeat (census with 1 and 4 workers)";
    return out;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "generic rank", 60, generic_ranks},
        {2, "4x4 fooling fixture", 5, example_fixture},
        {3, "index-set cardinality", 10, index_set_cardinality},
        {4, "reconstruction identity", 10, reconstruction},
        {5, "typicality certificates", 120, typicality_certificates},
        {6, "ball certification", 120, ball_certification},
        {7, "jacobian correctness", 10, jacobian_finite_differences},
        {8, "census containment", 600, census_containment},
        {9, "determinism", 1200, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs >= c.time_limit_s) out.require(false, "time limit exceeded");
        failures += !out.pass;
        std::printf("[%s] criterion %d (%s) %.2fs / %.0fs: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    secs, c.time_limit_s, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
