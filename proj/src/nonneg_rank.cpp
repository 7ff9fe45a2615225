#include "nnrank/nonneg_rank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nnrank/errors.hpp"
#include "nnrank/random.hpp"
#include "nnrank/witness.hpp"

namespace nnrank {

std::string_view to_string(LowerProvenance p) noexcept {
    switch (p) {
        case LowerProvenance::zero: return "zero";
        case LowerProvenance::flattening: return "flattening";
        case LowerProvenance::fooling_set: return "fooling-set";
        case LowerProvenance::rank_le_2_rule: return "rank-le-2-rule";
        case LowerProvenance::witness_ball: return "witness-ball";
    }
    return "?";
}

std::string_view to_string(UpperProvenance p) noexcept {
    switch (p) {
        case UpperProvenance::zero: return "zero";
        case UpperProvenance::slice: return "slice";
        case UpperProvenance::ntf_fit: return "ntf-fit";
        case UpperProvenance::rank_le_2_rule: return "rank-le-2-rule";
    }
    return "?";
}

void NtfConfig::validate() const {
    if (restarts < 1) throw InvalidArgument("NtfConfig: restarts must be >= 1");
    if (max_iters < 1) throw InvalidArgument("NtfConfig: max_iters must be >= 1");
    if (!(residual_tol > 0.0)) throw InvalidArgument("NtfConfig: residual_tol must be > 0");
    if (init_scale < 0.0) throw InvalidArgument("NtfConfig: init_scale must be >= 0");
}

// ---------------------------------------------------------------------------
// Slice decomposition

namespace {

void require_nonnegative(const DenseTensor& t, const char* what) {
    if (!t.is_nonnegative()) throw NegativeEntry(std::string(what) + ": tensor has a negative entry");
}

/// Calls visit(fiber_index, fiber_values) for every fiber along the fiber
/// mode, in row-major order of the remaining modes.
template <class Visit>
void for_each_fiber(const DenseTensor& t, Visit visit) {
    const Shape& shape = t.shape();
    const std::size_t f = shape.fiber_mode();
    const std::size_t len = shape.dim(f);
    std::size_t stride = 1;
    for (std::size_t j = f + 1; j < shape.order(); ++j) stride *= shape.dim(j);

    std::vector<double> fiber(len);
    for (std::size_t off = 0; off < t.size(); ++off) {
        auto index = shape.unravel(off);
        if (index[f] != 0) continue;
        for (std::size_t l = 0; l < len; ++l) fiber[l] = t[off + l * stride];
        visit(index, fiber);
    }
}

bool any_nonzero(const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
}

}  // namespace

Decomposition canonical_decomposition(const DenseTensor& t) {
    require_nonnegative(t, "canonical_decomposition");
    const Shape& shape = t.shape();
    const std::size_t f = shape.fiber_mode();
    Decomposition dec(shape);
    for_each_fiber(t, [&](const MultiIndex& index, const std::vector<double>& fiber) {
        if (!any_nonzero(fiber)) return;
        Rank1Term term;
        term.factors.resize(shape.order());
        for (std::size_t j = 0; j < shape.order(); ++j) {
            if (j == f) {
                term.factors[j] = fiber;
            } else {
                term.factors[j].assign(shape.dim(j), 0.0);
                term.factors[j][index[j]] = 1.0;
            }
        }
        dec.push_back(std::move(term));
    });
    return dec;
}

std::size_t nonzero_fiber_count(const DenseTensor& t) {
    std::size_t count = 0;
    for_each_fiber(t, [&](const MultiIndex&, const std::vector<double>& fiber) { count += any_nonzero(fiber); });
    return count;
}

// ---------------------------------------------------------------------------
// Lower bounds

std::size_t flattening_rank_lower_bound(const DenseTensor& t, double tol) {
    const std::size_t d = t.shape().order();
    if (d == 1) return t.is_zero() ? 0 : 1;
    std::size_t best = 0;
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t modes[] = {j};
        best = std::max(best, matrix_rank(flatten(t, modes), tol));
    }
    if (d == 4) {
        for (std::size_t j = 1; j < 4; ++j) {
            const std::size_t modes[] = {0, j};
            best = std::max(best, matrix_rank(flatten(t, modes), tol));
        }
    }
    return best;
}

bool is_fooling_set(const DenseTensor& m, const std::vector<MatrixPosition>& set) {
    for (std::size_t a = 0; a < set.size(); ++a) {
        const auto [i, j] = set[a];
        if (m(i, j) == 0.0) return false;
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            const auto [k, l] = set[b];
            if (m(i, l) * m(k, j) != 0.0) return false;
        }
    }
    return true;
}

namespace {

class FoolingSearch {
public:
    FoolingSearch(const DenseTensor& m, std::vector<MatrixPosition> support)
        : m_(m), support_(std::move(support)), cap_(std::min(m.rows(), m.cols())) {}

    std::vector<MatrixPosition> run() {
        std::vector<std::size_t> candidates(support_.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
        std::vector<std::size_t> current;
        extend(current, candidates);
        std::vector<MatrixPosition> out;
        for (auto i : best_) out.push_back(support_[i]);
        return out;
    }

private:
    bool compatible(std::size_t a, std::size_t b) const {
        const auto [i, j] = support_[a];
        const auto [k, l] = support_[b];
        return m_(i, l) * m_(k, j) == 0.0;
    }

    void extend(std::vector<std::size_t>& current, const std::vector<std::size_t>& candidates) {
        if (current.size() > best_.size()) best_ = current;
        if (best_.size() == cap_) return;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (current.size() + (candidates.size() - c) <= best_.size()) return;
            const std::size_t v = candidates[c];
            std::vector<std::size_t> next;
            for (std::size_t e = c + 1; e < candidates.size(); ++e) {
                if (compatible(v, candidates[e])) next.push_back(candidates[e]);
            }
            current.push_back(v);
            extend(current, next);
            current.pop_back();
            if (best_.size() == cap_) return;
        }
    }

    const DenseTensor& m_;
    std::vector<MatrixPosition> support_;
    std::size_t cap_;
    std::vector<std::size_t> best_;
};

}  // namespace

std::vector<MatrixPosition> fooling_set(const DenseTensor& m) {
    if (m.shape().order() != 2) throw ShapeMismatch("fooling_set expects a matrix");
    require_nonnegative(m, "fooling_set");
    std::vector<MatrixPosition> support;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) support.emplace_back(i, j);
        }
    }
    if (std::min(m.rows(), m.cols()) <= 6) return FoolingSearch(m, std::move(support)).run();

    // Greedy: scan the support once, keeping every compatible position.
    std::vector<MatrixPosition> set;
    for (const auto& p : support) {
        set.push_back(p);
        if (!is_fooling_set(m, set)) set.pop_back();
    }
    return set;
}

std::size_t fooling_set_lower_bound(const DenseTensor& m) { return fooling_set(m).size(); }

// ---------------------------------------------------------------------------
// HALS nonnegative CP fitting

namespace {

struct HalsRun {
    std::vector<std::vector<double>> factors;  // factors[mode][i * r + k]
    double objective = 0.0;
    std::size_t sweeps = 0;
    std::vector<double> history;
};

class HalsSolver {
public:
    HalsSolver(const DenseTensor& target, std::size_t r)
        : x_(target), shape_(target.shape()), d_(shape_.order()), r_(r), model_(shape_.total()) {
        indices_.reserve(shape_.total());
        for (std::size_t off = 0; off < shape_.total(); ++off) indices_.push_back(shape_.unravel(off));
        for (double v : x_.values()) norm2_ += v * v;
    }

    HalsRun run(Rng& rng, double init_scale, std::size_t max_iters, double tol, bool record) {
        HalsRun out;
        out.factors.resize(d_);
        std::uniform_real_distribution<double> init(0.0, init_scale);
        for (std::size_t m = 0; m < d_; ++m) {
            out.factors[m].resize(shape_.dim(m) * r_);
            for (double& v : out.factors[m]) v = init(rng);
        }
        fit_scale(out.factors);

        const double target_obj = tol * tol * norm2_;
        double obj = objective(out.factors);
        double window_start = obj;
        constexpr std::size_t kWindow = 100;
        for (std::size_t sweep = 1; sweep <= max_iters; ++sweep) {
            for (std::size_t n = 0; n < d_; ++n) update_mode(out.factors, n);
            balance(out.factors);
            obj = objective(out.factors);
            out.sweeps = sweep;
            if (record) out.history.push_back(obj);
            if (obj < target_obj) break;
            if (sweep % kWindow == 0) {
                // Plateau: the residual norm improved by less than 0.5% over
                // the last window.
                if (std::sqrt(obj) > 0.995 * std::sqrt(window_start)) break;
                window_start = obj;
            }
        }
        out.objective = obj;
        return out;
    }

private:
    double factor(const std::vector<std::vector<double>>& a, std::size_t m, std::size_t i, std::size_t k) const {
        return a[m][i * r_ + k];
    }

    void compute_model(const std::vector<std::vector<double>>& a) {
        for (std::size_t off = 0; off < model_.size(); ++off) {
            double s = 0.0;
            for (std::size_t k = 0; k < r_; ++k) {
                double p = 1.0;
                for (std::size_t m = 0; m < d_; ++m) p *= factor(a, m, indices_[off][m], k);
                s += p;
            }
            model_[off] = s;
        }
    }

    double objective(const std::vector<std::vector<double>>& a) {
        compute_model(a);
        double s = 0.0;
        for (std::size_t off = 0; off < model_.size(); ++off) {
            const double diff = x_[off] - model_[off];
            s += diff * diff;
        }
        return s;
    }

    /// Least-squares scalar on the whole model, spread evenly over modes.
    void fit_scale(std::vector<std::vector<double>>& a) {
        compute_model(a);
        double xm = 0.0;
        double mm = 0.0;
        for (std::size_t off = 0; off < model_.size(); ++off) {
            xm += x_[off] * model_[off];
            mm += model_[off] * model_[off];
        }
        if (mm <= 0.0 || xm <= 0.0) return;
        const double per_mode = std::pow(xm / mm, 1.0 / static_cast<double>(d_));
        for (auto& f : a) {
            for (double& v : f) v *= per_mode;
        }
    }

    /// Exact block minimization over each column of mode n in turn.
    void update_mode(std::vector<std::vector<double>>& a, std::size_t n) {
        const std::size_t rows = shape_.dim(n);
        // Gram product over the other modes.
        std::vector<double> gram(r_ * r_, 1.0);
        for (std::size_t m = 0; m < d_; ++m) {
            if (m == n) continue;
            for (std::size_t p = 0; p < r_; ++p) {
                for (std::size_t q = 0; q < r_; ++q) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < shape_.dim(m); ++i) s += factor(a, m, i, p) * factor(a, m, i, q);
                    gram[p * r_ + q] *= s;
                }
            }
        }
        // MTTKRP: rhs[i][k] = sum over entries with index_n = i of x * prod_{m != n} a_m.
        std::vector<double> rhs(rows * r_, 0.0);
        for (std::size_t off = 0; off < x_.size(); ++off) {
            const double v = x_[off];
            if (v == 0.0) continue;
            const auto& idx = indices_[off];
            for (std::size_t k = 0; k < r_; ++k) {
                double p = v;
                for (std::size_t m = 0; m < d_; ++m) {
                    if (m != n) p *= factor(a, m, idx[m], k);
                }
                rhs[idx[n] * r_ + k] += p;
            }
        }
        auto& an = a[n];
        for (std::size_t k = 0; k < r_; ++k) {
            const double gkk = gram[k * r_ + k];
            if (gkk <= 0.0) continue;
            for (std::size_t i = 0; i < rows; ++i) {
                double ag = 0.0;
                for (std::size_t q = 0; q < r_; ++q) ag += an[i * r_ + q] * gram[q * r_ + k];
                an[i * r_ + k] = std::max(0.0, an[i * r_ + k] + (rhs[i * r_ + k] - ag) / gkk);
            }
        }
    }

    /// Equalize factor norms within each term; the model is unchanged.
    void balance(std::vector<std::vector<double>>& a) const {
        std::vector<double> norms(d_);
        for (std::size_t k = 0; k < r_; ++k) {
            double log_mean = 0.0;
            bool dead = false;
            for (std::size_t m = 0; m < d_; ++m) {
                double s = 0.0;
                for (std::size_t i = 0; i < shape_.dim(m); ++i) s += factor(a, m, i, k) * factor(a, m, i, k);
                norms[m] = std::sqrt(s);
                if (norms[m] == 0.0) dead = true;
                log_mean += std::log(norms[m]);
            }
            if (dead) continue;
            const double target = std::exp(log_mean / static_cast<double>(d_));
            for (std::size_t m = 0; m < d_; ++m) {
                const double scale = target / norms[m];
                for (std::size_t i = 0; i < shape_.dim(m); ++i) a[m][i * r_ + k] *= scale;
            }
        }
    }

    const DenseTensor& x_;
    const Shape& shape_;
    std::size_t d_;
    std::size_t r_;
    std::vector<MultiIndex> indices_;
    std::vector<double> model_;
    double norm2_ = 0.0;
};

double relative_residual(const DenseTensor& t, const Decomposition& dec) {
    const double denom = std::max(t.norm(), std::numeric_limits<double>::min());
    return frobenius_distance(eval_cp(dec), t) / denom;
}

}  // namespace

NtfResult ntf_fit(const DenseTensor& t, std::size_t r, const NtfConfig& cfg) {
    cfg.validate();
    require_nonnegative(t, "ntf_fit");
    if (r < 1) throw InvalidArgument("ntf_fit: r must be >= 1");

    // Fit the max-normalized tensor so decisions do not depend on scale.
    const double scale = t.max_entry();
    const Shape& shape = t.shape();
    if (scale == 0.0) {
        Decomposition dec(shape);
        for (std::size_t k = 0; k < r; ++k) {
            Rank1Term term;
            for (auto n : shape.dims()) term.factors.emplace_back(n, 0.0);
            dec.push_back(std::move(term));
        }
        return NtfResult{std::move(dec), 0.0, 0, true, {}};
    }
    DenseTensor normalized = (1.0 / scale) * t;
    const double init_scale = cfg.init_scale > 0.0 ? cfg.init_scale / scale : 1.0;

    HalsSolver solver(normalized, r);
    std::optional<HalsRun> best;
    for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng = make_rng(cfg.seed, restart);
        HalsRun run = solver.run(rng, init_scale, cfg.max_iters, cfg.residual_tol, cfg.record_history);
        const bool better = !best || run.objective < best->objective;
        if (better) best = std::move(run);
        if (std::sqrt(best->objective) < cfg.residual_tol * normalized.norm()) break;
    }

    Decomposition dec(shape);
    for (std::size_t k = 0; k < r; ++k) {
        Rank1Term term;
        term.factors.resize(shape.order());
        for (std::size_t m = 0; m < shape.order(); ++m) {
            term.factors[m].resize(shape.dim(m));
            for (std::size_t i = 0; i < shape.dim(m); ++i) term.factors[m][i] = best->factors[m][i * r + k];
        }
        for (double& v : term.factors[0]) v *= scale;
        dec.push_back(std::move(term));
    }

    NtfResult result;
    result.relative_residual = relative_residual(t, dec);
    result.decomposition = std::move(dec);
    result.iterations_used = best->sweeps;
    result.converged = result.relative_residual < cfg.residual_tol;
    result.objective_history = std::move(best->history);
    return result;
}

// ---------------------------------------------------------------------------
// Interval assembly

RankInterval nnrank_interval(const DenseTensor& t, const NtfConfig& cfg, const MaxRankCertificate* certificate) {
    require_nonnegative(t, "nnrank_interval");
    cfg.validate();
    RankInterval out;
    if (t.is_zero()) {
        out.upper_decomposition = Decomposition(t.shape());
        return out;
    }

    constexpr double kRankTol = 1e-9;
    const Shape& shape = t.shape();
    if (shape.order() == 2) {
        const std::size_t rank = matrix_rank(t, kRankTol);
        if (rank <= 2) {
            out.lower = out.upper = rank;
            out.lower_provenance = LowerProvenance::rank_le_2_rule;
            out.upper_provenance = UpperProvenance::rank_le_2_rule;
            return out;
        }
    }

    out.lower = flattening_rank_lower_bound(t, kRankTol);
    out.lower_provenance = LowerProvenance::flattening;
    if (shape.order() == 2) {
        const std::size_t fooling = fooling_set_lower_bound(t);
        if (fooling > out.lower) {
            out.lower = fooling;
            out.lower_provenance = LowerProvenance::fooling_set;
        }
    }
    if (certificate != nullptr) {
        if (certificate->tensor != t) throw InvalidArgument("nnrank_interval: certificate is for another tensor");
        if (certificate->certified_rank > out.lower) {
            out.lower = certificate->certified_rank;
            out.lower_provenance = LowerProvenance::witness_ball;
        }
    }

    Decomposition slices = canonical_decomposition(t);
    const std::size_t fibers = slices.rank();
    for (std::size_t r = std::max<std::size_t>(out.lower, 1); r <= fibers; ++r) {
        NtfConfig scan = cfg;
        scan.seed = derive_seed(cfg.seed, r);
        NtfResult fit = ntf_fit(t, r, scan);
        if (fit.converged) {
            out.upper = r;
            out.upper_provenance = UpperProvenance::ntf_fit;
            out.upper_decomposition = std::move(fit.decomposition);
            return out;
        }
    }
    out.upper = fibers;
    out.upper_provenance = UpperProvenance::slice;
    out.upper_decomposition = std::move(slices);
    return out;
}

}  // namespace nnrank
