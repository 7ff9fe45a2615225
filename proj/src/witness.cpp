#include "nnrank/witness.hpp"

#include <algorithm>
#include <cmath>

#include "nnrank/decimal.hpp"
#include "nnrank/errors.hpp"
#include "nnrank/random.hpp"
#include "nnrank/tensor_io.hpp"

namespace nnrank {

using nlohmann::json;

std::vector<MultiIndex> index_set(const Shape& shape) {
    const std::size_t modulus = shape.dim(shape.fiber_mode());
    std::vector<MultiIndex> out;
    out.reserve(shape.slice_bound());
    for (std::size_t off = 0; off < shape.total(); ++off) {
        auto index = shape.unravel(off);
        std::size_t sum = 0;
        for (auto i : index) sum += i + 1;
        if (sum % modulus == 0) out.push_back(std::move(index));
    }
    return out;
}

mpq_class witness_radius_exact(const Shape& shape) { return mpq_class(1, 3 * shape.slice_bound()); }

WitnessBall witness_tensor(const Shape& shape) {
    WitnessBall ball{shape, index_set(shape), DenseTensor(shape), 1.0 / (3.0 * static_cast<double>(shape.slice_bound()))};
    for (const auto& index : ball.support) ball.center.at(index) = 1.0;
    return ball;
}

namespace {

/// Exact squared distance between a tensor with rational entries and T0.
mpq_class squared_distance_to_center(const std::vector<mpq_class>& values, const DenseTensor& center) {
    mpq_class s = 0;
    mpq_class diff;
    for (std::size_t i = 0; i < values.size(); ++i) {
        diff = values[i] - static_cast<long>(center[i]);
        s += diff * diff;
    }
    return s;
}

std::vector<mpq_class> rational_values(const DenseTensor& t) {
    std::vector<mpq_class> out;
    out.reserve(t.size());
    for (double v : t.values()) out.push_back(to_rational(v));
    return out;
}

/// Exact entries of eval_cp(a) + eval_cp(b).
std::vector<mpq_class> exact_sum(const Shape& shape, std::initializer_list<const Decomposition*> parts) {
    std::vector<mpq_class> out(shape.total(), mpq_class(0));
    mpq_class p;
    for (const Decomposition* dec : parts) {
        for (const auto& term : dec->terms()) {
            std::vector<std::vector<mpq_class>> f(term.factors.size());
            for (std::size_t j = 0; j < f.size(); ++j) {
                for (double v : term.factors[j]) f[j].push_back(to_rational(v));
            }
            for (std::size_t off = 0; off < out.size(); ++off) {
                const auto index = shape.unravel(off);
                p = 1;
                for (std::size_t j = 0; j < f.size(); ++j) p *= f[j][index[j]];
                out[off] += p;
            }
        }
    }
    return out;
}

/// Integer point proportional to the (rational) factors of dec. Scaling every
/// variable by one constant scales the Jacobian by a nonzero constant, so the
/// rank is unchanged.
IntegerPoint integer_point(const Decomposition& dec) {
    mpz_class common = 1;
    for (const auto& term : dec.terms()) {
        for (const auto& f : term.factors) {
            for (double v : f) {
                const mpq_class q = to_rational(v);
                mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), q.get_den().get_mpz_t());
            }
        }
    }
    IntegerPoint point;
    for (const auto& term : dec.terms()) {
        auto& out = point.emplace_back();
        for (const auto& f : term.factors) {
            auto& col = out.emplace_back();
            for (double v : f) {
                const mpq_class q = to_rational(v);
                col.push_back(q.get_num() * (common / q.get_den()));
            }
        }
    }
    return point;
}

double relative_mismatch(const DenseTensor& a, const DenseTensor& b) {
    return frobenius_distance(a, b) / std::max(1.0, std::max(a.norm(), b.norm()));
}

}  // namespace

MaxRankCertificate certify_max_rank(const DenseTensor& t, const Shape& shape) {
    if (t.shape() != shape) throw ShapeMismatch("certify_max_rank: tensor shape differs from requested shape");
    if (!t.is_nonnegative()) throw NegativeEntry("certify_max_rank: tensor has a negative entry");
    const WitnessBall ball = witness_tensor(shape);
    const double distance = frobenius_distance(t, ball.center);
    const mpq_class radius = witness_radius_exact(shape);
    if (squared_distance_to_center(rational_values(t), ball.center) >= radius * radius) {
        throw OutsideBall(distance, ball.radius);
    }
    return MaxRankCertificate{shape, t, distance, ball.radius - distance, shape.slice_bound()};
}

std::optional<MaxRankCertificate> try_certify_max_rank(const DenseTensor& t) {
    try {
        return certify_max_rank(t, t.shape());
    } catch (const OutsideBall&) {
        return std::nullopt;
    }
}

TypicalityCertificate typical_rank_witness(const Shape& shape, std::size_t r, Seed seed) {
    const std::size_t n_terms = shape.slice_bound();
    if (r < 1 || r > n_terms) {
        throw RankOutOfRange("r = " + std::to_string(r) + " outside [1, " + std::to_string(n_terms) + "]", -1);
    }
    const JacobianReport generic = jacobian_generic_rank(shape, r, kDefaultTrials, seed);
    if (!generic.full_row_rank) {
        throw RankOutOfRange("r = " + std::to_string(r) + " is below the generic rank: Jacobian rank " +
                                 std::to_string(generic.achieved_rank) + " < " + std::to_string(generic.jac_rows),
                             static_cast<long>(generic.achieved_rank));
    }

    const WitnessBall ball = witness_tensor(shape);
    const std::size_t d = shape.order();
    const double snap = std::ldexp(1.0, kSnapBits);

    for (std::size_t attempt = 0; attempt <= kWitnessRetries; ++attempt) {
        const Seed sub_seed = derive_seed(seed, attempt);
        Rng rng(sub_seed);
        double delta = ball.radius / (4.0 * static_cast<double>(n_terms * d));
        Decomposition all(shape);
        DenseTensor total;
        for (;;) {
            std::uniform_real_distribution<double> noise(0.0, delta);
            all = Decomposition(shape);
            for (const auto& index : ball.support) {
                Rank1Term term;
                for (std::size_t j = 0; j < d; ++j) {
                    auto& f = term.factors.emplace_back(shape.dim(j), 0.0);
                    f[index[j]] = 1.0;
                    for (double& v : f) v = std::round((v + noise(rng)) * snap) / snap;
                }
                all.push_back(std::move(term));
            }
            total = eval_cp(all);
            if (frobenius_distance(total, ball.center) < ball.radius / 2.0) break;
            delta /= 2.0;
        }

        std::vector<Rank1Term> head_terms(all.terms().begin(), all.terms().begin() + static_cast<long>(r));
        std::vector<Rank1Term> tail_terms(all.terms().begin() + static_cast<long>(r), all.terms().end());
        Decomposition head(shape, std::move(head_terms));
        Decomposition tail(shape, std::move(tail_terms));

        JacobianReport report;
        report.shape = shape;
        report.r = r;
        report.point_seed = sub_seed;
        report.jac_rows = shape.total();
        report.jac_cols = r * shape.dim_sum();
        report.trials = 1;
        report.achieved_rank = exact_rank(jacobian_exact(shape, integer_point(head)));
        report.full_row_rank = report.achieved_rank == report.jac_rows;
        if (!report.full_row_rank) continue;

        TypicalityCertificate cert;
        cert.shape = shape;
        cert.r = r;
        cert.seed = seed;
        cert.perturbation = delta;
        cert.witness = eval_cp(head);
        cert.total = total;
        cert.head = std::move(head);
        cert.tail = std::move(tail);
        cert.radius = ball.radius;
        cert.ball_margin = ball.radius - frobenius_distance(total, ball.center);
        cert.jacobian_report = report;
        return cert;
    }
    throw RetriesExhausted("typical_rank_witness: no full-rank Jacobian after " + std::to_string(kWitnessRetries) +
                           " retries");
}

VerificationResult verify_typicality_certificate(const TypicalityCertificate& cert) {
    VerificationResult result;
    auto fail = [&](std::string reason) {
        if (std::find(result.reasons.begin(), result.reasons.end(), reason) == result.reasons.end()) {
            result.reasons.push_back(std::move(reason));
        }
    };
    const Shape& shape = cert.shape;
    if (shape.order() == 0) {
        result.reasons.push_back("empty shape");
        return result;
    }
    const std::size_t n_terms = shape.slice_bound();

    if (cert.head.shape() != shape || cert.tail.shape() != shape || cert.witness.shape() != shape ||
        cert.total.shape() != shape) {
        result.reasons.push_back("shape mismatch");
        return result;
    }
    if (cert.r != cert.head.rank() || cert.r < 1) fail("head term count differs from r");
    if (cert.head.rank() + cert.tail.rank() != n_terms) fail("term count differs from slice bound");
    if (!cert.head.is_nonnegative() || !cert.tail.is_nonnegative() || !cert.witness.is_nonnegative() ||
        !cert.total.is_nonnegative()) {
        fail("negative entry");
    }
    const mpq_class radius = witness_radius_exact(shape);
    if (cert.radius != 1.0 / (3.0 * static_cast<double>(n_terms))) fail("radius mismatch");

    const DenseTensor head_eval = eval_cp(cert.head);
    const DenseTensor sum_eval = head_eval + eval_cp(cert.tail);
    constexpr double kTol = 1e-12;
    if (relative_mismatch(head_eval, cert.witness) > kTol) fail("witness mismatch");
    if (relative_mismatch(sum_eval, cert.total) > kTol) fail("total mismatch");

    const WitnessBall ball = witness_tensor(shape);
    const mpq_class radius2 = radius * radius;
    if (squared_distance_to_center(rational_values(cert.total), ball.center) >= radius2) fail("outside ball");
    if (squared_distance_to_center(exact_sum(shape, {&cert.head, &cert.tail}), ball.center) >= radius2) {
        fail("outside ball");
    }
    const double margin = ball.radius - frobenius_distance(cert.total, ball.center);
    if (!(cert.ball_margin > 0.0)) fail("nonpositive ball margin");
    if (std::abs(margin - cert.ball_margin) > kTol) fail("ball margin mismatch");

    if (cert.head.rank() >= 1) {
        const std::size_t rank = exact_rank(jacobian_exact(shape, integer_point(cert.head)));
        if (rank != shape.total()) fail("jacobian not full row rank");
        const JacobianReport& rep = cert.jacobian_report;
        if (rep.shape != shape || rep.r != cert.r || rep.jac_rows != shape.total() ||
            rep.jac_cols != cert.r * shape.dim_sum() || rep.achieved_rank != rank ||
            rep.full_row_rank != (rank == shape.total())) {
            fail("jacobian report mismatch");
        }
    }
    result.ok = result.reasons.empty();
    return result;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json support_to_json(const std::vector<MultiIndex>& support) {
    json out = json::array();
    for (const auto& index : support) {
        json one = json::array();
        for (auto i : index) one.push_back(i + 1);
        out.push_back(std::move(one));
    }
    return out;
}

json exact_terms(const Decomposition& dec) {
    json terms = json::array();
    for (const auto& term : dec.terms()) {
        json factors = json::array();
        for (const auto& f : term.factors) {
            json v = json::array();
            for (double x : f) v.push_back(exact_decimal(x));
            factors.push_back(std::move(v));
        }
        terms.push_back(std::move(factors));
    }
    return terms;
}

Decomposition terms_from_json(const Shape& shape, const json& j) {
    if (!j.is_array()) throw FormatError("terms must be an array");
    Decomposition dec(shape);
    for (const auto& term_json : j) {
        if (!term_json.is_array()) throw FormatError("term must be an array of factors");
        Rank1Term term;
        for (const auto& f : term_json) {
            if (!f.is_array()) throw FormatError("factor must be an array");
            auto& out = term.factors.emplace_back();
            for (const auto& v : f) {
                if (!v.is_string()) throw FormatError("factor entries must be decimal strings");
                out.push_back(parse_exact_double(v.get<std::string>()));
            }
        }
        if (!term.conforms_to(shape)) throw FormatError("term does not conform to dims");
        dec.push_back(std::move(term));
    }
    return dec;
}

DenseTensor values_from_json(const Shape& shape, const json& j) {
    json t;
    t["dims"] = shape.dims();
    t["values"] = j;
    return tensor_from_json(t);
}

}  // namespace

json to_json(const WitnessBall& ball) {
    json j;
    j["dims"] = ball.shape.dims();
    j["fiber_mode"] = ball.shape.fiber_mode() + 1;
    j["slice_bound"] = ball.shape.slice_bound();
    j["support"] = support_to_json(ball.support);
    j["values"] = tensor_to_json(ball.center)["values"];
    j["radius"] = ball.radius;
    j["radius_exact"] = witness_radius_exact(ball.shape).get_str();
    return j;
}

json to_json(const MaxRankCertificate& cert) {
    json j;
    j["dims"] = cert.shape.dims();
    j["fiber_mode"] = cert.shape.fiber_mode() + 1;
    j["values"] = tensor_to_json(cert.tensor)["values"];
    j["distance"] = cert.distance;
    j["radius"] = cert.distance + cert.margin;
    j["margin"] = cert.margin;
    j["certified_rank"] = cert.certified_rank;
    return j;
}

json to_json(const TypicalityCertificate& cert) {
    json j;
    j["kind"] = "typicality-certificate";
    j["dims"] = cert.shape.dims();
    j["fiber_mode"] = cert.shape.fiber_mode() + 1;
    j["slice_bound"] = cert.shape.slice_bound();
    j["r"] = cert.r;
    j["seed"] = cert.seed;
    j["perturbation"] = cert.perturbation;
    j["radius"] = cert.radius;
    j["ball_margin"] = cert.ball_margin;
    j["head_terms"] = exact_terms(cert.head);
    j["tail_terms"] = exact_terms(cert.tail);
    j["witness"] = tensor_to_json(cert.witness)["values"];
    j["total"] = tensor_to_json(cert.total)["values"];
    j["jacobian_report"] = to_json(cert.jacobian_report);
    return j;
}

TypicalityCertificate typicality_certificate_from_json(const json& j) {
    try {
        TypicalityCertificate cert;
        cert.shape = shape_from_json(j.at("dims"));
        cert.r = j.at("r").get<std::size_t>();
        cert.seed = j.at("seed").get<Seed>();
        cert.perturbation = j.at("perturbation").get<double>();
        cert.radius = j.at("radius").get<double>();
        cert.ball_margin = j.at("ball_margin").get<double>();
        cert.head = terms_from_json(cert.shape, j.at("head_terms"));
        cert.tail = terms_from_json(cert.shape, j.at("tail_terms"));
        cert.witness = values_from_json(cert.shape, j.at("witness"));
        cert.total = values_from_json(cert.shape, j.at("total"));
        cert.jacobian_report = jacobian_report_from_json(j.at("jacobian_report"));
        return cert;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad certificate: ") + e.what());
    } catch (const ShapeMismatch& e) {
        throw FormatError(std::string("bad certificate: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("bad certificate: ") + e.what());
    }
}

}  // namespace nnrank
