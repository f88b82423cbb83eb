// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "efr/fom.hpp"

namespace efr {

/// Configuration or usage problem; the CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration. Text format: one `block.key = value` per line,
/// '#' starts a comment, unknown keys are hard errors.
struct RunConfig {
    // geometry
    double length = 2.2;
    double height = 0.41;
    double obstacle_cx = 0.3;
    double obstacle_cy = 0.2;
    double obstacle_halfwidth = 0.05;
    int nx = 160;
    int ny = 30;

    // physics
    double rho = 1.0;
    double mu = 1e-3;

    // efr
    double dt = 2e-3;
    std::string alpha_mode = "h_avg";  ///< "h_avg" or "explicit"
    double alpha_value = 0.0;
    std::string chi_mode = "dt";  ///< "dt" or "explicit"
    double chi_value = 0.0;

    // time
    double t0 = 0.0;
    double t_end = 8.0;
    int snapshot_stride = 5;

    // pod
    double energy_v = 0.9999;
    double energy_p = 0.9999;
    double energy_a = 0.9999;
    int max_modes = 50;
    double window_start = -1.0;  ///< < t0 means "from t0"
    double window_end = -1.0;    ///< < t0 means "up to t_end"
    int train_stride = 1;

    // rbf
    double sigma_factor = 1.5;
    double reg_scale = 1e-10;

    // paths
    std::string workdir;

    /// Throws ConfigError when any invariant fails.
    void validate() const;

    CartesianMesh build_mesh() const;

    /// Resolve alpha/chi modes against the actual mesh spacing.
    EfrParams resolve_params(const CartesianMesh& mesh) const;

    /// Training window with defaults substituted.
    double resolved_window_start() const { return window_start < t0 ? t0 : window_start; }
    double resolved_window_end() const { return window_end < t0 ? t_end : window_end; }
};

RunConfig parse_config_text(const std::string& text);

/// Parse a file; if paths.workdir is absent, fall back to $EFR_WORKDIR.
RunConfig load_config_file(const std::filesystem::path& path);

}  // namespace efr
