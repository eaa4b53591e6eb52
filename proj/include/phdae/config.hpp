#pragma once

#include "phdae/collocation.hpp"
#include "phdae/scenarios.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phdae {

struct RunConfig {
    std::string scenario = "circuit-uncontrolled";
    /// LTI model file; takes precedence over `scenario` when set.
    std::string model_path;
    ScenarioSettings settings;
    int stages = 1;
    double h = 0.01;
    /// Horizon; the scenario default when unset.
    std::optional<double> t_final;
    /// CSV destination; standard output when empty or "-".
    std::string out;
    std::uint64_t seed = 1;
    int samples = 256;
    double tol = 1e-9;
    std::vector<double> h_list;
    NewtonOptions newton;

    /// Throws Error naming the first violated invariant.
    void validate() const;
};

/// Flat `key = value` lines; `#` starts a comment. Keys: scenario, model, L, C1, C2, RL,
/// RG, RR, P, alpha, ramp_switch (a time or `none`), stages, h, t_final, out, seed,
/// samples, tol, h_list, newton_abs_tol, newton_rel_tol, newton_max_iterations,
/// newton_fd_scale. Unknown keys raise ParseError. Values override `base`.
RunConfig read_config(std::istream& in, RunConfig base = {});
RunConfig read_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Comma- or space-separated positive step sizes.
std::vector<double> parse_h_list(const std::string& text);

}  // namespace phdae
