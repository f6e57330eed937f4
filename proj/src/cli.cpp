#include "gdmd/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gdmd/datagen.hpp"
#include "gdmd/dmd.hpp"
#include "gdmd/innovation.hpp"
#include "gdmd/rng.hpp"
#include "gdmd/select.hpp"
#include "gdmd/snapshot_matrix.hpp"
#include "gdmd/subspace.hpp"
#include "gdmd/svg.hpp"

namespace gdmd {

namespace {

/// Bad flag combinations that CLI11 cannot express; exits with kExitUsage.
struct UsageError : Error {
    using Error::Error;
};

/// Flags shared across subcommands plus every per-command numeric knob.
struct RunConfig {
    std::string input;
    std::string output;
    std::string format = "auto";  // csv | gdmd | auto (by extension)
    std::string svg;
    uint64_t seed = 0;
    bool quiet = false;

    // gen
    Eigen::Index n_state = 100;
    Eigen::Index len = 50;
    std::vector<Eigen::Index> periods;
    std::vector<double> amps;
    double noise = 0.0;
    std::string kind = "periodic";
    std::string spec_json;

    // ip / specgram / select
    Eigen::Index start = 1;
    Eigen::Index k_max = 0;  // 0 = maximum available
    Eigen::Index l_max = 0;  // 0 = min(50, L-2)
    std::string method = "recursive";
    double rank_tol = kDefaultRankTol;

    // fit
    Eigen::Index n_fit = 0;
    Eigen::Index lags = 0;
    std::string coeffs_path;
    std::string modes_path;

    // select
    std::string spectrogram_path;
    Eigen::Index k_min = 2;
    double tie_tol = 1e-7;
    double depth_strong = 10.0;

    // diag
    std::string prop1_path;
    Eigen::Index triples = 100;
    Eigen::Index dim = 20;
};

MatrixFormat pick_format(const std::string& flag, const std::string& path) {
    if (flag == "csv") return MatrixFormat::csv;
    if (flag == "gdmd") return MatrixFormat::gdmd_binary;
    if (flag == "auto") {
        std::filesystem::path p(path);
        return p.extension() == ".csv" ? MatrixFormat::csv : MatrixFormat::gdmd_binary;
    }
    throw ValidationError("unknown matrix format '" + flag + "' (use csv or gdmd)");
}

IpMethod pick_method(const std::string& name) {
    if (name == "recursive") return IpMethod::recursive;
    if (name == "svd") return IpMethod::svd;
    throw ValidationError("unknown method '" + name + "' (use recursive or svd)");
}

SnapshotMatrix load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("no input matrix given (use -i/--input)");
    return load_matrix(cfg.input, pick_format(cfg.format, cfg.input));
}

/// Writes to the path, or to the fallback stream when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << text;
    f.flush();
    if (!f) throw IoError("write failure: " + path);
}

void add_common_flags(CLI::App* sub, RunConfig& cfg, bool with_input) {
    if (with_input) sub->add_option("-i,--input", cfg.input, "input matrix file");
    sub->add_option("-o,--output", cfg.output, "output file (default: stdout)");
    sub->add_option("--format", cfg.format, "matrix file format: csv, gdmd, auto")
        ->check(CLI::IsMember({"csv", "gdmd", "auto"}));
    sub->add_flag("--quiet", cfg.quiet, "suppress warnings");
}

GeneratorSpec build_gen_spec(const RunConfig& cfg, const CLI::App* sub) {
    GeneratorSpec spec;
    if (!cfg.spec_json.empty()) spec = GeneratorSpec::from_json_file(cfg.spec_json);
    if (sub->count("--n")) spec.n = cfg.n_state;
    if (sub->count("--len")) spec.len = cfg.len;
    if (sub->count("--period")) {
        spec.periods.clear();
        for (size_t i = 0; i < cfg.periods.size(); ++i) {
            PeriodComponent pc;
            pc.p = cfg.periods[i];
            pc.amplitude = i < cfg.amps.size() ? cfg.amps[i] : 1.0;
            spec.periods.push_back(pc);
        }
    }
    if (sub->count("--noise")) spec.noise_rel = cfg.noise;
    if (sub->count("--seed")) spec.seed = cfg.seed;
    if (sub->count("--kind")) {
        if (cfg.kind == "periodic")
            spec.kind = GeneratorKind::periodic_field;
        else if (cfg.kind == "linear")
            spec.kind = GeneratorKind::linear_system;
        else
            throw ValidationError("unknown generator kind '" + cfg.kind + "'");
    }
    return spec;
}

int cmd_gen(const RunConfig& cfg, const CLI::App* sub, std::ostream& err) {
    GeneratorSpec spec = build_gen_spec(cfg, sub);
    if (!cfg.quiet)
        for (const auto& w : spec.warnings()) err << "warning: " << w << '\n';
    SnapshotMatrix m = generate(spec);
    save_matrix(m, cfg.output, pick_format(cfg.format, cfg.output));
    return kExitOk;
}

int cmd_ip(const RunConfig& cfg, std::ostream& out) {
    SnapshotMatrix m = load_input(cfg);
    const Eigen::Index k_max = cfg.k_max > 0 ? cfg.k_max : m.cols() - 1 - cfg.start;
    InnovationProfile p = ip_profile(m, cfg.start, k_max, pick_method(cfg.method), cfg.rank_tol);
    std::ostringstream csv;
    write_profile_csv(p, csv);
    emit(cfg.output, csv.str(), out);
    if (!cfg.svg.empty())
        emit(cfg.svg, svg_profile(p, "innovation parameters r_k (start " +
                                          std::to_string(cfg.start) + ")"),
             out);
    return kExitOk;
}

int cmd_specgram(const RunConfig& cfg, std::ostream& out) {
    SnapshotMatrix m = load_input(cfg);
    const Eigen::Index l_max =
        cfg.l_max > 0 ? cfg.l_max : std::min<Eigen::Index>(50, m.cols() - 2);
    const Eigen::Index k_max = cfg.k_max > 0 ? cfg.k_max : m.cols() - 2;
    GapSpectrogram sg = spectrogram(m, l_max, k_max, pick_method(cfg.method), cfg.rank_tol);
    std::ostringstream csv;
    write_spectrogram_csv(sg, csv);
    emit(cfg.output, csv.str(), out);
    if (!cfg.svg.empty()) emit(cfg.svg, svg_spectrogram(sg, "gap spectrogram r_{l,k}"), out);
    return kExitOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SnapshotMatrix loaded = load_input(cfg);
    const bool stacked = cfg.lags > 0;
    SnapshotMatrix m = stacked ? stack_lagged(loaded, cfg.lags) : loaded;
    if (cfg.n_fit < 2) throw ValidationError("fit requires -n >= 2");

    CompanionModel model = fit_window(m, cfg.start, cfg.n_fit, cfg.rank_tol);
    if (!cfg.quiet)
        for (const auto& w : model.warnings) err << "warning: " << w << '\n';

    std::ostringstream eig_csv;
    write_eigenvalues_csv(model.eigenvalues, eig_csv);
    emit(cfg.output, eig_csv.str(), out);

    if (!cfg.coeffs_path.empty()) {
        std::ostringstream coeff_csv;
        write_coefficients_csv(model.coeffs, coeff_csv);
        emit(cfg.coeffs_path, coeff_csv.str(), out);
    }
    if (!cfg.modes_path.empty()) {
        ModeSet ms = modes_window(m, cfg.start, model);
        if (!cfg.quiet)
            for (size_t i = model.warnings.size(); i < ms.warnings.size(); ++i)
                err << "warning: " << ms.warnings[i] << '\n';
        save_modes(ms, cfg.modes_path);
    }
    if (!cfg.svg.empty())
        emit(cfg.svg,
             svg_unit_circle(model.eigenvalues,
                             "DMD eigenvalues, n=" + std::to_string(cfg.n_fit)),
             out);
    return kExitOk;
}

int cmd_select(const RunConfig& cfg, std::ostream& out) {
    if (cfg.spectrogram_path.empty() && cfg.input.empty())
        throw UsageError("select needs a matrix (-i/--input) or a --spectrogram CSV");
    GapSpectrogram sg;
    if (!cfg.spectrogram_path.empty()) {
        std::ifstream in(cfg.spectrogram_path);
        if (!in) throw IoError("cannot open for reading: " + cfg.spectrogram_path);
        sg = read_spectrogram_csv(in);
    } else {
        SnapshotMatrix m = load_input(cfg);
        const Eigen::Index l_max =
            cfg.l_max > 0 ? cfg.l_max : std::min<Eigen::Index>(50, m.cols() - 2);
        const Eigen::Index k_max = cfg.k_max > 0 ? cfg.k_max : m.cols() - 2;
        sg = spectrogram(m, l_max, k_max, pick_method(cfg.method), cfg.rank_tol);
    }
    SelectParams params;
    params.k_min = cfg.k_min;
    params.tie_tol = cfg.tie_tol;
    params.depth_strong = cfg.depth_strong;
    OrderRecommendation rec = recommend_order(sg, params);
    emit(cfg.output, rec.to_json() + "\n", out);
    return kExitOk;
}

int cmd_diag(const RunConfig& cfg, std::ostream& out) {
    SnapshotMatrix m = load_input(cfg);
    const Eigen::Index k_max = cfg.k_max > 0 ? cfg.k_max : m.cols();
    ConditioningReport rep = conditioning_report(m, k_max);
    std::ostringstream cond_csv;
    write_conditioning_csv(rep, cond_csv);
    emit(cfg.output, cond_csv.str(), out);

    PortableRng rng(cfg.seed);
    std::ostringstream table;
    table << "i,lhs,rhs,abs_diff\n";
    for (Eigen::Index i = 1; i <= cfg.triples; ++i) {
        const Eigen::VectorXd xi = rng.normal_vector(cfg.dim);
        const Eigen::VectorXd d1 = rng.normal_vector(cfg.dim);
        const Eigen::VectorXd d2 = rng.normal_vector(cfg.dim);
        SensitivityPair pair = sensitivity_check(xi, d1, d2);
        table << i << ',' << format_double(pair.lhs) << ',' << format_double(pair.rhs) << ','
              << format_double(std::abs(pair.lhs - pair.rhs)) << '\n';
    }
    emit(cfg.prop1_path, table.str(), out);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"gap-metric innovation parameters and companion-form DMD", "gdmd"};
    app.require_subcommand(1);

    CLI::App* gen = app.add_subcommand("gen", "generate synthetic snapshot data");
    add_common_flags(gen, cfg, false);
    gen->get_option("--output")->required();
    gen->add_option("--n", cfg.n_state, "state dimension N");
    gen->add_option("--len", cfg.len, "snapshot count L");
    gen->add_option("--period", cfg.periods, "integer period (repeatable)");
    gen->add_option("--amp", cfg.amps, "amplitude per period (repeatable)");
    gen->add_option("--noise", cfg.noise, "relative noise magnitude");
    gen->add_option("--seed", cfg.seed, "RNG seed");
    gen->add_option("--kind", cfg.kind, "periodic | linear")
        ->check(CLI::IsMember({"periodic", "linear"}));
    gen->add_option("--spec-json", cfg.spec_json, "generator spec as a JSON file");

    CLI::App* ip = app.add_subcommand("ip", "innovation-parameter profile r_k");
    add_common_flags(ip, cfg, true);
    ip->add_option("--start", cfg.start, "starting index l (1-based)");
    ip->add_option("--kmax", cfg.k_max, "largest window size k (default: maximum)");
    ip->add_option("--method", cfg.method, "recursive | svd")
        ->check(CLI::IsMember({"recursive", "svd"}));
    ip->add_option("--rank-tol", cfg.rank_tol, "relative rank tolerance");
    ip->add_option("--svg", cfg.svg, "also write an SVG line plot");

    CLI::App* specgram = app.add_subcommand("specgram", "gap spectrogram r_{l,k}");
    add_common_flags(specgram, cfg, true);
    specgram->add_option("--lmax", cfg.l_max, "number of starting rows (default: min(50, L-2))");
    specgram->add_option("--kmax", cfg.k_max, "largest window size (default: L-2)");
    specgram->add_option("--method", cfg.method, "recursive | svd")
        ->check(CLI::IsMember({"recursive", "svd"}));
    specgram->add_option("--rank-tol", cfg.rank_tol, "relative rank tolerance");
    specgram->add_option("--svg", cfg.svg, "also write an SVG heatmap");

    CLI::App* fit_cmd = app.add_subcommand("fit", "companion-form DMD fit");
    add_common_flags(fit_cmd, cfg, true);
    fit_cmd->add_option("-n,--n", cfg.n_fit, "window parameter n (fits n-1 columns)")
        ->required();
    fit_cmd->add_option("--start", cfg.start, "window starting column");
    fit_cmd->add_option("--lags", cfg.lags, "stack this many lagged copies first");
    fit_cmd->add_option("--rank-tol", cfg.rank_tol, "pseudoinverse truncation");
    fit_cmd->add_option("--coeffs", cfg.coeffs_path, "also write the coefficient CSV");
    fit_cmd->add_option("--modes", cfg.modes_path, "also write spatial modes (gdmd + JSON sidecar)");
    fit_cmd->add_option("--svg", cfg.svg, "also write a unit-circle SVG");

    CLI::App* select_cmd = app.add_subcommand("select", "model-order recommendation");
    add_common_flags(select_cmd, cfg, true);
    select_cmd->add_option("--spectrogram", cfg.spectrogram_path,
                           "use a precomputed spectrogram CSV instead of -i");
    select_cmd->add_option("--lmax", cfg.l_max, "rows to compute (default: min(50, L-2))");
    select_cmd->add_option("--kmax", cfg.k_max, "largest window size (default: L-2)");
    select_cmd->add_option("--kmin", cfg.k_min, "smallest window size considered");
    select_cmd->add_option("--method", cfg.method, "recursive | svd")
        ->check(CLI::IsMember({"recursive", "svd"}));
    select_cmd->add_option("--rank-tol", cfg.rank_tol, "relative rank tolerance");
    select_cmd->add_option("--tie-tol", cfg.tie_tol, "absolute argmin tie window");
    select_cmd->add_option("--depth-strong", cfg.depth_strong,
                           "depth ratio required for strong confidence");

    CLI::App* diag = app.add_subcommand("diag", "conditioning report and sensitivity table");
    add_common_flags(diag, cfg, true);
    diag->add_option("--kmax", cfg.k_max, "largest prefix window (default: L)");
    diag->add_option("--prop1", cfg.prop1_path, "write the sensitivity table here");
    diag->add_option("--triples", cfg.triples, "number of random triples");
    diag->add_option("--dim", cfg.dim, "ambient dimension of the triples");
    diag->add_option("--seed", cfg.seed, "RNG seed for the triples");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(cfg, gen, err);
        if (ip->parsed()) return cmd_ip(cfg, out);
        if (specgram->parsed()) return cmd_specgram(cfg, out);
        if (fit_cmd->parsed()) return cmd_fit(cfg, out, err);
        if (select_cmd->parsed()) return cmd_select(cfg, out);
        if (diag->parsed()) return cmd_diag(cfg, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}

} // namespace gdmd
