#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdmd/snapshot_matrix.hpp"

namespace gdmd {

enum class GeneratorKind { periodic_field, linear_system };

/// One periodic component: integer period and overall amplitude.
struct PeriodComponent {
    Eigen::Index p = 2;
    double amplitude = 1.0;
};

/// Deterministic synthetic snapshot generator.  `periodic_field` builds a
/// spatially smooth field with a full harmonic stack per period (phases
/// evaluated at t mod p, so zero-noise output is exactly periodic and a
/// single period spans p independent columns).  `linear_system` iterates
/// x_{t+1} = A x_t + v_t with A a hidden orthogonal-rotation operator of
/// spectral radius <= 1.
struct GeneratorSpec {
    Eigen::Index n = 100;  // state dimension N
    Eigen::Index len = 50; // snapshot count L
    std::vector<PeriodComponent> periods = {{30, 1.0}};
    double noise_rel = 0.0;
    uint64_t seed = 0;
    GeneratorKind kind = GeneratorKind::periodic_field;

    /// Non-fatal spec diagnostics (e.g. a period too long to observe).
    std::vector<std::string> warnings() const;

    std::string to_json() const;
    static GeneratorSpec from_json(const std::string& text);
    static GeneratorSpec from_json_file(const std::filesystem::path& path);
};

/// Pure function of the spec: identical specs give bit-identical matrices.
/// Randomness comes from a fixed, documented generator (mt19937_64 with
/// an explicit Box-Muller transform), so outputs are portable across
/// standard libraries.
SnapshotMatrix generate(const GeneratorSpec& spec);

} // namespace gdmd
