#include "gdmd/datagen.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "gdmd/rng.hpp"
#include "gdmd/subspace.hpp"

namespace gdmd {

namespace {

using Rng = PortableRng;

void check_spec(const GeneratorSpec& spec) {
    if (spec.n < 1) throw ValidationError("generator: N must be >= 1");
    if (spec.len < 2) throw ValidationError("generator: L must be >= 2");
    if (spec.noise_rel < 0.0) throw ValidationError("generator: noise_rel must be >= 0");
    if (spec.periods.empty()) throw ValidationError("generator: at least one period required");
    for (const auto& pc : spec.periods)
        if (pc.p < 2) throw ValidationError("generator: periods must be >= 2");
}

/// Moving-average smoothed white noise, unit 2-norm.  Width N/20 gives the
/// coherent-blob look of a flow field without solving any PDE.
Eigen::VectorXd smooth_field(Eigen::Index n, Rng& rng) {
    Eigen::VectorXd raw(n);
    for (Eigen::Index i = 0; i < n; ++i) raw(i) = rng.normal();
    const Eigen::Index half = std::max<Eigen::Index>(1, n / 20) / 2;
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
        out(i) = raw.segment(lo, hi - lo + 1).mean();
    }
    const double nrm = out.norm();
    return nrm > 0.0 ? Eigen::VectorXd(out / nrm) : out;
}

Eigen::MatrixXd periodic_field(const GeneratorSpec& spec, Rng& rng) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(spec.n, spec.len);
    for (const auto& pc : spec.periods) {
        const Eigen::Index p = pc.p;
        // Harmonics up to p/2: the one-period column set then spans p
        // dimensions, not just the two of a single cosine.
        for (Eigen::Index h = 0; h <= p / 2; ++h) {
            const Eigen::VectorXd fc = smooth_field(spec.n, rng);
            const Eigen::VectorXd fs = smooth_field(spec.n, rng);
            const double amp = pc.amplitude / static_cast<double>(1 + h);
            for (Eigen::Index t = 0; t < spec.len; ++t) {
                const double tau = static_cast<double>(t % p);  // exact periodicity
                const double phase =
                    2.0 * std::numbers::pi * static_cast<double>(h) * tau / static_cast<double>(p);
                x.col(t) += amp * (std::cos(phase) * fc + std::sin(phase) * fs);
            }
        }
    }
    return x;
}

Eigen::MatrixXd linear_system(const GeneratorSpec& spec, Rng& rng) {
    const Eigen::Index n_blocks = static_cast<Eigen::Index>(spec.periods.size());
    const Eigen::Index dyn = std::min<Eigen::Index>(2 * n_blocks, spec.n);

    // Orthonormal embedding of the rotating coordinates into R^N.
    Eigen::MatrixXd raw(spec.n, dyn);
    for (Eigen::Index j = 0; j < dyn; ++j) raw.col(j) = smooth_field(spec.n, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd embed = qr.householderQ() * Eigen::MatrixXd::Identity(spec.n, dyn);

    Eigen::MatrixXd rot = Eigen::MatrixXd::Zero(dyn, dyn);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(dyn);
    for (Eigen::Index b = 0; b < n_blocks && 2 * b + 1 < dyn; ++b) {
        const double theta = 2.0 * std::numbers::pi / static_cast<double>(spec.periods[b].p);
        const double rho = 1.0;  // spectral radius <= 1
        rot(2 * b, 2 * b) = rho * std::cos(theta);
        rot(2 * b, 2 * b + 1) = -rho * std::sin(theta);
        rot(2 * b + 1, 2 * b) = rho * std::sin(theta);
        rot(2 * b + 1, 2 * b + 1) = rho * std::cos(theta);
        state(2 * b) = spec.periods[b].amplitude;
    }

    Eigen::MatrixXd x(spec.n, spec.len);
    Eigen::VectorXd current = embed * state;
    for (Eigen::Index t = 0; t < spec.len; ++t) {
        x.col(t) = current;
        Eigen::VectorXd next = embed * (rot * (embed.transpose() * current));
        if (spec.noise_rel > 0.0) {
            Eigen::VectorXd v(spec.n);
            for (Eigen::Index i = 0; i < spec.n; ++i) v(i) = rng.normal();
            next += spec.noise_rel * current.norm() / std::sqrt(static_cast<double>(spec.n)) * v;
        }
        current = next;
    }
    return x;
}

} // namespace

std::vector<std::string> GeneratorSpec::warnings() const {
    std::vector<std::string> out;
    for (const auto& pc : periods)
        if (pc.p >= len)
            out.push_back("period " + std::to_string(pc.p) +
                          " is not observable within L=" + std::to_string(len) + " snapshots");
    return out;
}

SnapshotMatrix generate(const GeneratorSpec& spec) {
    check_spec(spec);
    uint64_t seed = spec.seed;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Rng rng(seed);
        Eigen::MatrixXd x = spec.kind == GeneratorKind::periodic_field ? periodic_field(spec, rng)
                                                                       : linear_system(spec, rng);
        if (spec.noise_rel > 0.0) {
            const double rms =
                x.norm() / std::sqrt(static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                for (Eigen::Index i = 0; i < x.rows(); ++i)
                    x(i, j) += spec.noise_rel * rms * rng.normal();
        }

        // A zero-noise single-period field must span p independent columns;
        // an unlucky draw is regenerated deterministically.
        if (spec.kind == GeneratorKind::periodic_field && spec.noise_rel == 0.0 &&
            spec.periods.size() == 1 &&
            spec.periods[0].p <= std::min<Eigen::Index>(spec.n, spec.len)) {
            const Eigen::Index p = spec.periods[0].p;
            Eigen::BDCSVD<Eigen::MatrixXd> svd(x.leftCols(p));
            const auto& sigma = svd.singularValues();
            if (sigma(0) <= 0.0 || sigma(sigma.size() - 1) < kDefaultRankTol * sigma(0)) {
                seed += 0x9e3779b97f4a7c15ull;
                continue;
            }
        }
        return SnapshotMatrix(std::move(x));
    }
    throw NumericError("generator could not produce a full-rank period after 8 attempts");
}

std::string GeneratorSpec::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind == GeneratorKind::periodic_field ? "periodic_field" : "linear_system";
    j["n"] = n;
    j["len"] = len;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& pc : periods) arr.push_back({{"p", pc.p}, {"amp", pc.amplitude}});
    j["periods"] = arr;
    j["noise_rel"] = noise_rel;
    j["seed"] = seed;
    return j.dump();
}

GeneratorSpec GeneratorSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("generator spec JSON: ") + e.what());
    }
    GeneratorSpec spec;
    try {
        if (j.contains("kind")) {
            const std::string kind = j["kind"].get<std::string>();
            if (kind == "periodic_field")
                spec.kind = GeneratorKind::periodic_field;
            else if (kind == "linear_system")
                spec.kind = GeneratorKind::linear_system;
            else
                throw ParseError("generator spec: unknown kind '" + kind + "'");
        }
        spec.n = j.at("n").get<Eigen::Index>();
        spec.len = j.at("len").get<Eigen::Index>();
        if (j.contains("periods")) {
            spec.periods.clear();
            for (const auto& e : j["periods"]) {
                PeriodComponent pc;
                pc.p = e.at("p").get<Eigen::Index>();
                if (e.contains("amp")) pc.amplitude = e["amp"].get<double>();
                spec.periods.push_back(pc);
            }
        }
        if (j.contains("noise_rel")) spec.noise_rel = j["noise_rel"].get<double>();
        if (j.contains("seed")) spec.seed = j["seed"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("generator spec JSON: ") + e.what());
    }
    check_spec(spec);
    return spec;
}

GeneratorSpec GeneratorSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

} // namespace gdmd
