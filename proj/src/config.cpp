// SPDX-License-Identifier: Apache-2.0

#include "efr/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace efr {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
    return x;
}

int to_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long x = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    return static_cast<int>(x);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
        setters = {
            {"geometry.length", [&](auto& k, auto& v) { cfg.length = to_double(k, v); }},
            {"geometry.height", [&](auto& k, auto& v) { cfg.height = to_double(k, v); }},
            {"geometry.obstacle_cx", [&](auto& k, auto& v) { cfg.obstacle_cx = to_double(k, v); }},
            {"geometry.obstacle_cy", [&](auto& k, auto& v) { cfg.obstacle_cy = to_double(k, v); }},
            {"geometry.obstacle_halfwidth",
             [&](auto& k, auto& v) { cfg.obstacle_halfwidth = to_double(k, v); }},
            {"geometry.nx", [&](auto& k, auto& v) { cfg.nx = to_int(k, v); }},
            {"geometry.ny", [&](auto& k, auto& v) { cfg.ny = to_int(k, v); }},
            {"physics.rho", [&](auto& k, auto& v) { cfg.rho = to_double(k, v); }},
            {"physics.mu", [&](auto& k, auto& v) { cfg.mu = to_double(k, v); }},
            {"efr.dt", [&](auto& k, auto& v) { cfg.dt = to_double(k, v); }},
            {"efr.alpha_mode", [&](auto&, auto& v) { cfg.alpha_mode = v; }},
            {"efr.alpha_value", [&](auto& k, auto& v) { cfg.alpha_value = to_double(k, v); }},
            {"efr.chi_mode", [&](auto&, auto& v) { cfg.chi_mode = v; }},
            {"efr.chi_value", [&](auto& k, auto& v) { cfg.chi_value = to_double(k, v); }},
            {"time.t0", [&](auto& k, auto& v) { cfg.t0 = to_double(k, v); }},
            {"time.t_end", [&](auto& k, auto& v) { cfg.t_end = to_double(k, v); }},
            {"time.snapshot_stride",
             [&](auto& k, auto& v) { cfg.snapshot_stride = to_int(k, v); }},
            {"pod.energy_v", [&](auto& k, auto& v) { cfg.energy_v = to_double(k, v); }},
            {"pod.energy_p", [&](auto& k, auto& v) { cfg.energy_p = to_double(k, v); }},
            {"pod.energy_a", [&](auto& k, auto& v) { cfg.energy_a = to_double(k, v); }},
            {"pod.max_modes", [&](auto& k, auto& v) { cfg.max_modes = to_int(k, v); }},
            {"pod.window_start", [&](auto& k, auto& v) { cfg.window_start = to_double(k, v); }},
            {"pod.window_end", [&](auto& k, auto& v) { cfg.window_end = to_double(k, v); }},
            {"pod.train_stride", [&](auto& k, auto& v) { cfg.train_stride = to_int(k, v); }},
            {"rbf.sigma_factor", [&](auto& k, auto& v) { cfg.sigma_factor = to_double(k, v); }},
            {"rbf.reg_scale", [&](auto& k, auto& v) { cfg.reg_scale = to_double(k, v); }},
            {"paths.workdir", [&](auto&, auto& v) { cfg.workdir = v; }},
        };

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        it->second(key, value);
    }
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    RunConfig cfg = parse_config_text(buf.str());
    if (cfg.workdir.empty()) {
        if (const char* env = std::getenv("EFR_WORKDIR")) cfg.workdir = env;
    }
    return cfg;
}

void RunConfig::validate() const {
    if (!(length > 0.0) || !(height > 0.0))
        throw ConfigError("geometry: channel dimensions must be positive");
    if (nx < 4 || ny < 4) throw ConfigError("geometry: nx and ny must be at least 4");
    if (obstacle_halfwidth < 0.0) throw ConfigError("geometry: obstacle halfwidth must be >= 0");
    if (!(rho > 0.0) || !(mu > 0.0)) throw ConfigError("physics: rho and mu must be positive");
    if (!(dt > 0.0)) throw ConfigError("efr: dt must be positive");
    if (alpha_mode != "h_avg" && alpha_mode != "explicit")
        throw ConfigError("efr: alpha_mode must be 'h_avg' or 'explicit'");
    if (alpha_mode == "explicit" && alpha_value < 0.0)
        throw ConfigError("efr: alpha_value must be >= 0");
    if (chi_mode != "dt" && chi_mode != "explicit")
        throw ConfigError("efr: chi_mode must be 'dt' or 'explicit'");
    const double chi = chi_mode == "dt" ? dt : chi_value;
    if (!(chi > 0.0) || chi > 1.0)
        throw ConfigError("efr: relaxation parameter must lie in (0, 1]");
    if (t_end < t0) throw ConfigError("time: t_end must not precede t0");
    if (snapshot_stride < 1) throw ConfigError("time: snapshot_stride must be >= 1");
    for (double e : {energy_v, energy_p, energy_a})
        if (!(e > 0.0) || e > 1.0) throw ConfigError("pod: energy thresholds must lie in (0, 1]");
    if (train_stride < 1) throw ConfigError("pod: train_stride must be >= 1");
    if (window_end >= t0 && window_start >= t0 && window_end < window_start)
        throw ConfigError("pod: window_end must not precede window_start");
    if (!(sigma_factor > 0.0)) throw ConfigError("rbf: sigma_factor must be positive");
    if (reg_scale < 0.0) throw ConfigError("rbf: reg_scale must be >= 0");
    if (workdir.empty())
        throw ConfigError("paths: workdir is required (set paths.workdir or $EFR_WORKDIR)");
}

CartesianMesh RunConfig::build_mesh() const {
    return build_channel_mesh(length, height, {obstacle_cx, obstacle_cy}, obstacle_halfwidth, nx,
                              ny);
}

EfrParams RunConfig::resolve_params(const CartesianMesh& mesh) const {
    EfrParams p;
    p.rho = rho;
    p.mu = mu;
    p.dt = dt;
    p.alpha = alpha_mode == "h_avg" ? mesh_metrics(mesh).h_avg : alpha_value;
    p.chi = chi_mode == "dt" ? dt : chi_value;
    return p;
}

}  // namespace efr
