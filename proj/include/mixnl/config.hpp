#pragma once

#include "mixnl/bifurcation.hpp"
#include "mixnl/dissipation.hpp"
#include "mixnl/domain.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace mixnl {

/// Everything a run reads from its configuration file.
///
/// The file is flat `key = value` text, one entry per line, `#` starting a
/// comment. Keys:
///
///   omega.a, omega.b, neumann[i].a, neumann[i].b, truncation_radius, s,
///   pure_neumann, far_field_neumann, mesh.h, nonlocal_weight,
///   eig.count, eig.tol, seed,
///   schedule.mode, schedule.k_max, schedule.separation,
///   schedule.set[i].lo, schedule.set[i].hi          (endpoint formulas),
///   bifurcation.nonlinearity, bifurcation.p, bifurcation.scale,
///   bifurcation.epsilon, bifurcation.norm_cap_factor,
///   bifurcation.lambda_cap_factor, bifurcation.max_step,
///   bifurcation.max_points, bifurcation.inverted,
///   verify.picone_trials, verify.picone_seed, verify.wmp_trials, verify.wmp_seed.
///
/// Keys starting with `manifest.` are accepted and ignored, so a run
/// manifest is itself a valid configuration.
struct RunConfig {
    DomainConfig domain;
    double mesh_h = 1.0 / 64.0;
    double nonlocal_weight = 1.0;
    int eig_count = 4;
    double eig_tol = 1e-10;
    std::uint64_t seed = 0;

    std::optional<DissipationSchedule> schedule;

    std::optional<Nonlinearity> nonlinearity;
    ContinuationOptions continuation;
    bool write_inverted = false;

    int picone_trials = 100;
    std::uint64_t picone_seed = 42;
    int wmp_trials = 20;
    std::uint64_t wmp_seed = 7;
};

/// Throws ParseError (naming key and line) on malformed input and
/// ConfigError when the resulting domain is invalid.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Flat key-value rendering that parse_config reads back to the same values.
std::string serialize_config(const RunConfig& cfg);

/// 17-significant-digit decimal text, which reads back to the same double.
std::string format_double(double v);

} // namespace mixnl
