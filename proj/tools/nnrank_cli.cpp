// Command-line front end: grank, nnrank, decompose, witness, certify-max,
// typical, verify, census.
//
// Exit codes: 0 success, 1 domain error (or a rejected certificate),
// 2 usage error. Results go to stdout or --output; diagnostics to stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nnrank/errors.hpp"
#include "nnrank/experiments.hpp"
#include "nnrank/generic_rank.hpp"
#include "nnrank/nonneg_rank.hpp"
#include "nnrank/tensor_io.hpp"
#include "nnrank/witness.hpp"

namespace {

using namespace nnrank;
using nlohmann::json;

enum class Format { json, csv, text };

struct Globals {
    Seed seed = 0;
    std::string output;
    Format format = Format::text;
    bool format_given = false;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw FormatError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

json read_json_input(const std::string& path) {
    if (path == "-") {
        try {
            return json::parse(std::cin);
        } catch (const json::parse_error& e) {
            throw FormatError(std::string("stdin: ") + e.what());
        }
    }
    return read_json_file(path);
}

std::string interval_text(const RankInterval& iv) {
    std::ostringstream os;
    os << '[' << iv.lower << ',' << iv.upper << ']' << (iv.exact() ? " exact" : "") << " ("
       << to_string(iv.lower_provenance) << " / " << to_string(iv.upper_provenance) << ')';
    return os.str();
}

json interval_json(const RankInterval& iv, const Shape& shape) {
    json j;
    j["dims"] = shape.dims();
    j["fiber_mode"] = shape.fiber_mode() + 1;
    j["slice_bound"] = shape.slice_bound();
    j["lower"] = iv.lower;
    j["upper"] = iv.upper;
    j["exact"] = iv.exact();
    j["lower_provenance"] = std::string(to_string(iv.lower_provenance));
    j["upper_provenance"] = std::string(to_string(iv.upper_provenance));
    if (iv.upper_decomposition) j["upper_decomposition"] = decomposition_to_json(*iv.upper_decomposition);
    return j;
}

void emit_json(const Globals& g, const json& j) {
    Output out(g.output);
    out.stream() << j.dump(2) << '\n';
}

int run_grank(const Globals& g, const std::string& shape_text, std::size_t trials) {
    const Shape shape = parse_shape(shape_text);
    const std::size_t rank = generic_rank(shape, g.seed, trials);
    const JacobianReport at = jacobian_generic_rank(shape, rank, trials, g.seed);
    std::optional<JacobianReport> below;
    if (rank > 1) below = jacobian_generic_rank(shape, rank - 1, trials, g.seed);

    Output out(g.output);
    if (g.format == Format::json) {
        json j;
        j["dims"] = shape.dims();
        j["fiber_mode"] = shape.fiber_mode() + 1;
        j["generic_rank"] = rank;
        if (shape.order() >= 2) j["expected_generic_rank"] = expected_generic_rank(shape);
        j["report"] = to_json(at);
        if (below) j["report_below"] = to_json(*below);
        out.stream() << j.dump(2) << '\n';
        return 0;
    }
    auto line = [](const JacobianReport& r) {
        std::ostringstream os;
        os << "r=" << r.r << ": jacobian " << r.jac_rows << "x" << r.jac_cols << " rank " << r.achieved_rank
           << (r.full_row_rank ? " (full row rank)" : " (deficient)") << ", trials " << r.trials << ", seed "
           << r.point_seed;
        return os.str();
    };
    out.stream() << rank << '\n';
    out.stream() << "shape " << format_shape(shape) << ", fiber mode " << shape.fiber_mode() + 1 << '\n';
    out.stream() << line(at) << '\n';
    if (below) out.stream() << line(*below) << '\n';
    return 0;
}

int run_nnrank(const Globals& g, const std::string& input, NtfConfig ntf) {
    const DenseTensor t = tensor_from_json(read_json_input(input), Nonnegativity::required);
    ntf.seed = g.seed;
    const auto certificate = try_certify_max_rank(t);
    const RankInterval iv = nnrank_interval(t, ntf, certificate ? &*certificate : nullptr);
    if (g.format == Format::json) {
        emit_json(g, interval_json(iv, t.shape()));
        return 0;
    }
    Output out(g.output);
    out.stream() << interval_text(iv) << '\n';
    out.stream() << "shape " << format_shape(t.shape()) << ", fiber mode " << t.shape().fiber_mode() + 1
                 << ", slice bound " << t.shape().slice_bound() << '\n';
    return 0;
}

int run_typical(const Globals& g, const std::string& shape_text, std::size_t r) {
    const TypicalityCertificate cert = typical_rank_witness(parse_shape(shape_text), r, g.seed);
    emit_json(g, to_json(cert));
    return 0;
}

int run_verify(const Globals& g, const std::string& path) {
    const TypicalityCertificate cert = typicality_certificate_from_json(read_json_input(path));
    const VerificationResult v = verify_typicality_certificate(cert);
    Output out(g.output);
    if (g.format == Format::json) {
        out.stream() << json{{"ok", v.ok}, {"reasons", v.reasons}, {"fiber_mode", cert.shape.fiber_mode() + 1}}.dump(2)
                     << '\n';
    } else if (v.ok) {
        out.stream() << "true\n";
    } else {
        out.stream() << "false: ";
        for (std::size_t i = 0; i < v.reasons.size(); ++i) out.stream() << (i ? "; " : "") << v.reasons[i];
        out.stream() << '\n';
    }
    return v.ok ? 0 : 1;
}

int run_census_cmd(const Globals& g, ExperimentConfig cfg, const std::string& csv_path) {
    cfg.seed = g.seed;
    const ExperimentReport report = run_census(cfg);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw FormatError("cannot write " + csv_path);
        csv << to_csv(report);
    }
    Output out(g.output);
    switch (g.format) {
        case Format::csv: out.stream() << to_csv(report); break;
        case Format::json: out.stream() << to_json(report).dump(2) << '\n'; break;
        case Format::text: {
            out.stream() << "shape " << format_shape(cfg.shape) << ", fiber mode " << cfg.shape.fiber_mode() + 1
                         << ", slice bound " << report.slice_bound << ", generic rank " << report.grank_used << '\n';
            for (const auto& [key, count] : report.histogram) {
                const auto [lo, hi] = key;
                out.stream() << (lo == hi ? std::to_string(lo) : "[" + std::to_string(lo) + "," + std::to_string(hi) + "]")
                             << ": " << count << '\n';
            }
            out.stream() << "exact fraction " << report.exact_fraction << ", range check "
                         << (report.range_check ? "true" : "false") << '\n';
            break;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonnegative and typical nonnegative ranks of small dense tensors"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--output", g.output, "Write results to this file instead of stdout");
    const std::map<std::string, Format> formats{{"json", Format::json}, {"csv", Format::csv}, {"text", Format::text}};
    auto* format_opt = app.add_option("--format", g.format, "Output format (json, csv, text)")
                           ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

    std::string shape_text;
    std::string input;
    std::size_t trials = kDefaultTrials;
    NtfConfig ntf;
    std::size_t r = 0;
    std::string cert_path;
    std::string dist_name = "uniform01";
    double sigma = 0.0;
    std::size_t samples = 1000;
    std::size_t workers = 0;
    std::string csv_path;

    auto* grank = app.add_subcommand("grank", "Generic rank via the Jacobian test");
    grank->add_option("--shape", shape_text, "Comma-separated dims, e.g. 2,2,2")->required();
    grank->add_option("--trials", trials, "Random points per r")->check(CLI::PositiveNumber);

    auto* nnrank = app.add_subcommand("nnrank", "Bounds on the nonnegative rank of a tensor");
    nnrank->add_option("--input", input, "Tensor JSON file ('-' for stdin)")->required();
    nnrank->add_option("--restarts", ntf.restarts, "NTF restarts per rank")->check(CLI::PositiveNumber);
    nnrank->add_option("--max-iters", ntf.max_iters, "NTF sweeps per restart")->check(CLI::PositiveNumber);
    nnrank->add_option("--tol", ntf.residual_tol, "NTF relative residual tolerance")->check(CLI::PositiveNumber);

    auto* decompose = app.add_subcommand("decompose", "Slice decomposition of a nonnegative tensor");
    decompose->add_option("--input", input, "Tensor JSON file ('-' for stdin)")->required();

    auto* witness = app.add_subcommand("witness", "Witness tensor T0 and ball radius");
    witness->add_option("--shape", shape_text, "Comma-separated dims")->required();

    auto* certify = app.add_subcommand("certify-max", "Certify maximal nonnegative rank by ball membership");
    certify->add_option("--input", input, "Tensor JSON file ('-' for stdin)")->required();
    certify->add_option("--shape", shape_text, "Expected dims")->required();

    auto* typical = app.add_subcommand("typical", "Typicality certificate for rank r");
    typical->add_option("--shape", shape_text, "Comma-separated dims")->required();
    typical->add_option("--r", r, "Rank to certify")->required();

    auto* verify = app.add_subcommand("verify", "Verify a typicality certificate");
    verify->add_option("--cert", cert_path, "Certificate JSON file ('-' for stdin)")->required();

    auto* census = app.add_subcommand("census", "Monte Carlo rank census");
    census->add_option("--shape", shape_text, "Comma-separated dims")->required();
    census->add_option("--samples", samples, "Number of samples")->check(CLI::PositiveNumber);
    census->add_option("--dist", dist_name, "uniform01 | exponential | indicator-noise[:sigma]");
    census->add_option("--sigma", sigma, "Noise level for indicator-noise");
    census->add_option("--restarts", ntf.restarts, "NTF restarts per rank")->check(CLI::PositiveNumber);
    census->add_option("--workers", workers, "Worker threads (0 = hardware)");
    census->add_option("--csv", csv_path, "Also write the per-sample CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    g.format_given = format_opt->count() > 0;

    try {
        if (grank->parsed()) return run_grank(g, shape_text, trials);
        if (nnrank->parsed()) return run_nnrank(g, input, ntf);
        if (decompose->parsed()) {
            emit_json(g, decomposition_to_json(
                             canonical_decomposition(tensor_from_json(read_json_input(input), Nonnegativity::required))));
            return 0;
        }
        if (witness->parsed()) {
            emit_json(g, to_json(witness_tensor(parse_shape(shape_text))));
            return 0;
        }
        if (certify->parsed()) {
            const DenseTensor t = tensor_from_json(read_json_input(input), Nonnegativity::required);
            emit_json(g, to_json(certify_max_rank(t, parse_shape(shape_text))));
            return 0;
        }
        if (typical->parsed()) return run_typical(g, shape_text, r);
        if (verify->parsed()) return run_verify(g, cert_path);
        if (census->parsed()) {
            ExperimentConfig cfg;
            cfg.shape = parse_shape(shape_text);
            cfg.samples = samples;
            cfg.distribution = Distribution::parse(dist_name, sigma);
            cfg.ntf = ntf;
            cfg.workers = workers;
            if (!g.format_given) g.format = Format::json;
            return run_census_cmd(g, cfg, csv_path);
        }
    } catch (const OutsideBall& e) {
        std::cerr << "OutsideBall: " << e.what() << '\n';
        return 1;
    } catch (const RankOutOfRange& e) {
        std::cerr << "RankOutOfRange: " << e.what() << '\n';
        return 1;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
