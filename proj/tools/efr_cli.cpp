// SPDX-License-Identifier: Apache-2.0
//
// Pipeline driver: full-order EFR runs, POD basis extraction, reduced
// operator assembly, reduced online stepping, comparison, and VTK export.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "efr/config.hpp"
#include "efr/metrics.hpp"
#include "efr/rom_online.hpp"
#include "efr/store.hpp"
#include "efr/vtk.hpp"

namespace {

using namespace efr;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << header << "\n";
    return os;
}

/// Parse a numeric CSV with a header line.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<double> row;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            row.push_back(std::strtod(line.substr(pos, comma - pos).c_str(), nullptr));
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg = load_config_file(path);
    cfg.validate();
    return cfg;
}

std::vector<double> flow_stations(const RunConfig& cfg) {
    std::vector<double> stations;
    for (double x : {0.5, 1.0, 1.5, 2.0})
        if (x <= cfg.length) stations.push_back(x);
    return stations;
}

// --------------------------------------------------------------- fom-run

int cmd_fom_run(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    const CartesianMesh mesh = cfg.build_mesh();
    const EfrParams params = cfg.resolve_params(mesh);
    const SnapshotStore store(cfg.workdir);
    std::filesystem::create_directories(store.root());

    {
        std::ofstream report(store.root() / "mesh_report.txt");
        mesh.write_report(report);
    }
    write_vtk(store.root() / "mesh.vtk", mesh, {});

    const auto shape = channel_inflow_shape(cfg.height);
    const auto amplitude = channel_inflow_amplitude;
    const auto stations = flow_stations(cfg);

    auto writer_v = store.begin_series(mesh, "v", "m/s", cfg.dt * cfg.snapshot_stride);
    auto writer_p = store.begin_series(mesh, "p", "m2/s2", cfg.dt * cfg.snapshot_stride);
    auto writer_a = store.begin_series(mesh, "a", "m/s", cfg.dt * cfg.snapshot_stride);
    auto writer_u = store.begin_series(mesh, "u", "m/s", cfg.dt * cfg.snapshot_stride);

    auto cd_cl = open_csv(store.root() / "cd_cl.csv", "time,cd,cl");
    auto diagnostics = open_csv(store.root() / "diagnostics.csv",
                                "time,cfl,continuity_residual,indicator_min,indicator_max");
    auto mass_volume = open_csv(store.root() / "mass_volume.csv",
                                "time,mean_abs_div_v,mean_abs_div_u,mean_div_v,mean_div_u");
    std::string flow_header = "time";
    for (double x : stations) flow_header += ",e_q_at_" + format_double(x);
    auto mass_flow = open_csv(store.root() / "mass_flowrate.csv", flow_header);

    const long n_steps = std::llround((cfg.t_end - cfg.t0) / cfg.dt);
    if (n_steps == 0) {
        std::cerr << "warning: t_end equals t0; writing an empty snapshot store\n";
        writer_v.finalize();
        writer_p.finalize();
        writer_a.finalize();
        writer_u.finalize();
        return 0;
    }
    if (std::abs(cfg.t0 + static_cast<double>(n_steps) * cfg.dt - cfg.t_end) > 1e-9)
        std::cerr << "warning: (t_end - t0) is not an integer number of steps; running "
                  << n_steps << " steps\n";

    FomWorkspace ws(mesh);
    FomState state = make_rest_state(mesh, cfg.t0);
    bool cfl_warned = false;
    double solver_seconds = 0.0;
    for (long step = 1; step <= n_steps; ++step) {
        StepDiagnostics diag;
        const auto tic = Clock::now();
        try {
            diag = efr_step(ws, mesh, params, shape, amplitude, state);
        } catch (const std::exception& e) {
            std::cerr << "solver failure at t = " << format_double(state.time) << ": " << e.what()
                      << "\nlast stable time: " << format_double(state.time) << "\n";
            return 2;
        }
        solver_seconds += seconds_since(tic);
        if (!state.u.data().allFinite()) {
            std::cerr << "solver diverged; last stable time: "
                      << format_double(state.time - params.dt) << "\n";
            return 2;
        }
        if (!cfl_warned && diag.cfl > 1.0) {
            std::cerr << "warning: convective CFL " << format_double(diag.cfl) << " exceeds 1 at t = "
                      << format_double(state.time) << "\n";
            cfl_warned = true;
        }

        const auto [cd, cl] = drag_lift_coefficients(mesh, params, state.u, state.p);
        cd_cl << format_double(state.time) << "," << format_double(cd) << ","
              << format_double(cl) << "\n";
        diagnostics << format_double(state.time) << "," << format_double(diag.cfl) << ","
                    << format_double(diag.max_continuity_residual) << ","
                    << format_double(diag.indicator_min) << ","
                    << format_double(diag.indicator_max) << "\n";

        if (step % cfg.snapshot_stride == 0) {
            writer_v.append(state.time, state.v);
            writer_p.append(state.time, state.p);
            writer_a.append(state.time, state.a);
            writer_u.append(state.time, state.u);

            const Field div_v = divergence_gauss_extrapolated(mesh, state.v);
            const Field div_u = divergence_gauss_extrapolated(mesh, state.u);
            mass_volume << format_double(state.time) << ","
                        << format_double(div_v.data().cwiseAbs().mean()) << ","
                        << format_double(div_u.data().cwiseAbs().mean()) << ","
                        << format_double(div_v.data().mean()) << ","
                        << format_double(div_u.data().mean()) << "\n";

            mass_flow << format_double(state.time);
            const double q_exact = amplitude(state.time) * cfg.height;
            for (double x : stations) {
                if (std::abs(q_exact) < 1e-12)
                    mass_flow << ",nan";
                else
                    mass_flow << "," << format_double(mass_error_flowrate(mesh, state.u, x, q_exact));
            }
            mass_flow << "\n";
        }
    }
    writer_v.finalize();
    writer_p.finalize();
    writer_a.finalize();
    writer_u.finalize();

    std::filesystem::create_directories(store.root() / "timing");
    Manifest timing;
    timing.add("n_steps", static_cast<long long>(n_steps));
    timing.add("total_seconds", solver_seconds);
    timing.add("per_step_seconds", solver_seconds / static_cast<double>(n_steps));
    timing.save(store.root() / "timing" / "fom_timing.txt");

    std::cout << "fom-run: " << n_steps << " steps, " << n_steps / cfg.snapshot_stride
              << " snapshots, " << format_double(solver_seconds) << " s solver time\n";
    return 0;
}

// ------------------------------------------------------------------- pod

int cmd_pod(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    const CartesianMesh mesh = cfg.build_mesh();
    const EfrParams params = cfg.resolve_params(mesh);
    const SnapshotStore store(cfg.workdir);
    for (const char* var : {"v", "p", "a"})
        if (!store.has_series(var))
            throw ConfigError(std::string("missing '") + var +
                              "' snapshots; run 'efr fom-run' first");

    FomWorkspace ws(mesh);
    const LiftingFunction lifting =
        build_lifting(ws, mesh, params, channel_inflow_shape(cfg.height));
    store.save_lifting(lifting.control_field, mesh);

    const double w0 = cfg.resolved_window_start();
    const double w1 = cfg.resolved_window_end();
    const struct {
        const char* var;
        double energy;
    } plans[] = {{"v", cfg.energy_v}, {"p", cfg.energy_p}, {"a", cfg.energy_a}};
    for (const auto& plan : plans) {
        SnapshotSet set = store.load_series_window(mesh, plan.var, w0, w1, cfg.train_stride);
        if (set.size() == 0)
            throw ConfigError(std::string("no '") + plan.var +
                              "' snapshots in the training window");
        if (std::string(plan.var) == "v") set = homogenize(set, lifting);
        const PodBasis basis =
            pod_compute(mesh, plan.var, set.columns, plan.energy, cfg.max_modes);
        store.save_basis(basis, mesh, set.size());

        auto spectrum = open_csv(store.pod_dir() / ("spectrum_" + std::string(plan.var) + ".csv"),
                                 "index,eigenvalue");
        for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i)
            spectrum << i + 1 << "," << format_double(basis.eigenvalues[i]) << "\n";

        std::cout << "pod: variable " << plan.var << ", " << set.size() << " snapshots -> "
                  << basis.n_modes() << " modes (retained energy "
                  << format_double(basis.retained_energy) << ")\n";
    }
    return 0;
}

// ----------------------------------------------------------- rom-offline

int cmd_rom_offline(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    const CartesianMesh mesh = cfg.build_mesh();
    const SnapshotStore store(cfg.workdir);
    for (const char* var : {"v", "p", "a"})
        if (!store.has_basis(var))
            throw ConfigError(std::string("missing '") + var + "' basis; run 'efr pod' first");
    if (!store.has_lifting()) throw ConfigError("missing lifting field; run 'efr pod' first");

    const PodBasis basis_v = store.load_basis(mesh, "v");
    const PodBasis basis_p = store.load_basis(mesh, "p");
    const PodBasis basis_a = store.load_basis(mesh, "a");
    const LiftingFunction lifting{store.load_lifting_field(mesh), channel_inflow_amplitude};

    const ReducedOperators ops = project_operators(mesh, basis_v, basis_p, basis_a, lifting,
                                                   channel_inflow_shape(cfg.height));
    store.save_operators(ops, mesh);

    const SnapshotSet a_set = store.load_series_window(
        mesh, "a", cfg.resolved_window_start(), cfg.resolved_window_end(), cfg.train_stride);
    if (a_set.size() < 2)
        throw ConfigError("need at least two indicator snapshots in the training window");
    Eigen::VectorXd times(a_set.size());
    Eigen::MatrixXd deltas(basis_a.n_modes(), a_set.size());
    for (int k = 0; k < a_set.size(); ++k) {
        times[k] = a_set.times[k];
        deltas.col(k) = project_field(mesh, basis_a, a_set.columns[k]);
    }
    const RbfInterpolant interp = rbf_fit(times, deltas, cfg.sigma_factor, cfg.reg_scale);
    store.save_interpolant(interp, cfg.sigma_factor, cfg.reg_scale);

    std::cout << "rom-offline: operators (" << ops.nv << " velocity, " << ops.np
              << " pressure, " << ops.na << " indicator modes), interpolant over "
              << interp.n_centers() << " nodes\n";
    return 0;
}

// ------------------------------------------------------------ rom-online

int cmd_rom_online(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    const CartesianMesh mesh = cfg.build_mesh();
    const EfrParams params = cfg.resolve_params(mesh);
    const SnapshotStore store(cfg.workdir);
    if (!store.has_operators() || !store.has_interpolant())
        throw ConfigError("missing reduced operators; run 'efr rom-offline' first");
    if (!store.has_basis("v") || !store.has_basis("p") || !store.has_lifting())
        throw ConfigError("missing bases; run 'efr pod' first");

    const PodBasis basis_v = store.load_basis(mesh, "v");
    const PodBasis basis_p = store.load_basis(mesh, "p");
    const LiftingFunction lifting{store.load_lifting_field(mesh), channel_inflow_amplitude};
    const ReducedOperators ops = store.load_operators(mesh);
    const RbfInterpolant interp = store.load_interpolant();

    const double w0 = cfg.resolved_window_start();
    const double w1 = cfg.resolved_window_end();
    const SnapshotSet v_set = store.load_series_window(mesh, "v", w0, w1, 1);
    const SnapshotSet u_set = store.load_series_window(mesh, "u", w0, w1, 1);
    if (v_set.size() == 0 || u_set.size() == 0)
        throw ConfigError("no snapshots in the reduced run window; run 'efr fom-run' first");

    // Recover the filtered-relaxed split at the window start:
    // u = (1-chi) v + chi vbar  =>  vbar = v + (u - v)/chi.
    const Field& v0 = v_set.columns.front();
    const Field& u0 = u_set.columns.front();
    const double t_start = v_set.times.front();
    Field vbar0 = v0;
    vbar0.data() += (u0.data() - v0.data()) / params.chi;
    const double amp0 = channel_inflow_amplitude(t_start);
    Field v0_hom = v0, vbar0_hom = vbar0;
    v0_hom.data() -= amp0 * lifting.control_field.data();
    vbar0_hom.data() -= amp0 * lifting.control_field.data();

    RomState state = rom_init(mesh, basis_v, ops.np, v0_hom, vbar0_hom,
                              channel_inflow_amplitude, t_start);

    const long n_steps = std::llround((w1 - t_start) / params.dt);
    std::string header = "time";
    for (int i = 1; i <= ops.nv; ++i) header += ",beta_" + std::to_string(i);
    for (int i = 1; i <= ops.np; ++i) header += ",gamma_" + std::to_string(i);
    for (int i = 1; i <= ops.na; ++i) header += ",delta_" + std::to_string(i);
    for (int i = 1; i <= ops.nv; ++i) header += ",betabar_" + std::to_string(i);
    std::filesystem::create_directories(store.rom_dir());
    auto coeffs = open_csv(store.rom_dir() / "coefficients.csv", header);
    auto rom_cd_cl = open_csv(store.rom_dir() / "rom_cd_cl.csv", "time,cd,cl");

    auto writer_u = store.begin_series(mesh, "rom_u", "m/s", params.dt * cfg.snapshot_stride);
    auto writer_p = store.begin_series(mesh, "rom_p", "m2/s2", params.dt * cfg.snapshot_stride);

    auto write_row = [&](const RomState& s, const Eigen::VectorXd& delta) {
        coeffs << format_double(s.time);
        for (int i = 0; i < ops.nv; ++i) coeffs << "," << format_double(s.beta[i]);
        for (int i = 0; i < ops.np; ++i) coeffs << "," << format_double(s.gamma[i]);
        for (int i = 0; i < ops.na; ++i) coeffs << "," << format_double(delta[i]);
        for (int i = 0; i < ops.nv; ++i) coeffs << "," << format_double(s.beta_bar[i]);
        coeffs << "\n";
    };
    auto reconstruct_at = [&](const RomState& s) {
        Field u_r = Field::vector(mesh), p_r = Field::scalar(mesh);
        reconstruct(basis_v, basis_p, lifting, s, params.chi, u_r, p_r);
        writer_u.append(s.time, u_r);
        writer_p.append(s.time, p_r);
        const auto [cd, cl] = drag_lift_coefficients(mesh, params, u_r, p_r);
        rom_cd_cl << format_double(s.time) << "," << format_double(cd) << ","
                  << format_double(cl) << "\n";
    };
    auto is_snapshot_time = [&](double t) {
        for (double ts : v_set.times)
            if (std::abs(ts - t) < 1e-6) return true;
        return false;
    };

    // The initial instant is prescribed data (and the reduced pressure only
    // exists after a solve), so reconstructed fields start at the first step.
    write_row(state, interp.eval(t_start));

    bool extrapolation_warned = false;
    double stepping_seconds = 0.0;
    const auto inclusive_tic = Clock::now();
    for (long step = 1; step <= n_steps; ++step) {
        const auto tic = Clock::now();
        const RomStepInfo info = rom_step(ops, interp, params, channel_inflow_amplitude, state);
        stepping_seconds += seconds_since(tic);
        if (!state.beta.allFinite()) {
            std::cerr << "reduced solve diverged; last stable time: "
                      << format_double(state.time - params.dt) << "\n";
            return 2;
        }
        if (info.extrapolated && !extrapolation_warned) {
            std::cerr << "warning: interpolant evaluated outside its training window at t = "
                      << format_double(state.time) << "\n";
            extrapolation_warned = true;
        }
        write_row(state, interp.eval(state.time));
        if (is_snapshot_time(state.time)) reconstruct_at(state);
    }
    const double inclusive_seconds = seconds_since(inclusive_tic);
    writer_u.finalize();
    writer_p.finalize();

    std::filesystem::create_directories(store.root() / "timing");
    Manifest timing;
    timing.add("n_steps", static_cast<long long>(n_steps));
    timing.add("total_seconds", stepping_seconds);
    timing.add("per_step_seconds", stepping_seconds / static_cast<double>(std::max(1L, n_steps)));
    timing.add("inclusive_seconds", inclusive_seconds);
    timing.save(store.root() / "timing" / "rom_timing.txt");

    std::cout << "rom-online: " << n_steps << " steps over [" << format_double(t_start) << ", "
              << format_double(w1) << "], " << format_double(stepping_seconds)
              << " s stepping time\n";
    return 0;
}

// --------------------------------------------------------------- compare

int cmd_compare(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    const CartesianMesh mesh = cfg.build_mesh();
    const SnapshotStore store(cfg.workdir);
    for (const char* var : {"u", "p", "rom_u", "rom_p"})
        if (!store.has_series(var))
            throw ConfigError(std::string("missing '") + var +
                              "' snapshots; run the pipeline first");

    const double w0 = cfg.resolved_window_start();
    const double w1 = cfg.resolved_window_end();
    const SnapshotSet fom_u = store.load_series_window(mesh, "u", w0, w1, 1);
    const SnapshotSet fom_p = store.load_series_window(mesh, "p", w0, w1, 1);
    const SnapshotSet rom_u = store.load_series_window(mesh, "rom_u", w0, w1, 1);
    const SnapshotSet rom_p = store.load_series_window(mesh, "rom_p", w0, w1, 1);

    const auto fom_index_at = [&](const SnapshotSet& set, double t) {
        for (int k = 0; k < set.size(); ++k)
            if (std::abs(set.times[k] - t) < 1e-6) return k;
        return -1;
    };

    std::filesystem::create_directories(store.root() / "compare");
    auto error_u = open_csv(store.root() / "compare" / "error_u.csv", "time,value");
    auto error_p = open_csv(store.root() / "compare" / "error_p.csv", "time,value");
    double max_eu = 0.0, max_ep = 0.0;
    int matched = 0;
    for (int k = 0; k < rom_u.size(); ++k) {
        const double t = rom_u.times[k];
        const int iu = fom_index_at(fom_u, t);
        const int ip = fom_index_at(fom_p, t);
        if (iu < 0 || ip < 0) continue;
        ++matched;
        const double eu = relative_l2_error(mesh, fom_u.columns[iu], rom_u.columns[k]);
        const double ep = relative_l2_error(mesh, fom_p.columns[ip], rom_p.columns[k]);
        error_u << format_double(t) << "," << format_double(eu) << "\n";
        error_p << format_double(t) << "," << format_double(ep) << "\n";
        max_eu = std::max(max_eu, eu);
        max_ep = std::max(max_ep, ep);
    }
    if (matched == 0) throw ConfigError("no matching snapshot times between the two runs");

    // Drag/lift error over the window from the per-run coefficient series.
    const auto fom_rows = read_csv(store.root() / "cd_cl.csv");
    const auto rom_rows = read_csv(store.rom_dir() / "rom_cd_cl.csv");
    std::vector<double> times, fom_cd, fom_cl, rom_cd, rom_cl;
    for (const auto& rr : rom_rows) {
        for (const auto& fr : fom_rows) {
            if (std::abs(fr[0] - rr[0]) < 1e-6) {
                times.push_back(rr[0]);
                fom_cd.push_back(fr[1]);
                fom_cl.push_back(fr[2]);
                rom_cd.push_back(rr[1]);
                rom_cl.push_back(rr[2]);
                break;
            }
        }
    }
    double e_cd = std::numeric_limits<double>::quiet_NaN();
    double e_cl = std::numeric_limits<double>::quiet_NaN();
    if (times.size() >= 2) {
        e_cd = lift_error(times, fom_cd, rom_cd, w0, w1);
        e_cl = lift_error(times, fom_cl, rom_cl, w0, w1);
    }
    {
        std::ofstream os(store.root() / "compare" / "e_cl.txt");
        os << "e_cl = " << format_double(e_cl) << "\n";
        os << "e_cd = " << format_double(e_cd) << "\n";
    }
    {
        std::ofstream os(store.root() / "compare" / "summary.txt");
        os << "window_start = " << format_double(w0) << "\n";
        os << "window_end = " << format_double(w1) << "\n";
        os << "compared_snapshots = " << matched << "\n";
        os << "max_error_u = " << format_double(max_eu) << "\n";
        os << "max_error_p = " << format_double(max_ep) << "\n";
        os << "e_cl = " << format_double(e_cl) << "\n";
        os << "e_cd = " << format_double(e_cd) << "\n";
    }

    // Wall-clock speedup lives with the other timing outputs; those are
    // inherently run-dependent, so they stay out of the reproducible set.
    const auto fom_timing_path = store.root() / "timing" / "fom_timing.txt";
    const auto rom_timing_path = store.root() / "timing" / "rom_timing.txt";
    if (std::filesystem::exists(fom_timing_path) && std::filesystem::exists(rom_timing_path)) {
        const Manifest fom_timing = Manifest::load(fom_timing_path);
        const Manifest rom_timing = Manifest::load(rom_timing_path);
        const double fom_per_step = fom_timing.get_double("per_step_seconds");
        const double rom_per_step = rom_timing.get_double("per_step_seconds");
        Manifest speedup;
        speedup.add("fom_per_step_seconds", fom_per_step);
        speedup.add("rom_per_step_seconds", rom_per_step);
        speedup.add("speedup_per_step", fom_per_step / rom_per_step);
        speedup.save(store.root() / "timing" / "speedup.txt");
        std::cout << "compare: max_error_u " << format_double(max_eu) << ", max_error_p "
                  << format_double(max_ep) << ", e_cl " << format_double(e_cl)
                  << ", per-step speedup " << format_double(fom_per_step / rom_per_step) << "\n";
    } else {
        std::cerr << "warning: timing records missing; skipping the speedup report\n";
        std::cout << "compare: max_error_u " << format_double(max_eu) << ", max_error_p "
                  << format_double(max_ep) << ", e_cl " << format_double(e_cl) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- export

int cmd_export(const std::string& config_path, const std::string& variable, int index,
               std::string out) {
    const RunConfig cfg = load_config(config_path);
    const CartesianMesh mesh = cfg.build_mesh();
    const SnapshotStore store(cfg.workdir);
    std::filesystem::create_directories(store.root() / "export");

    if (variable == "mesh") {
        if (out.empty()) out = (store.root() / "export" / "mesh.vtk").string();
        write_vtk(out, mesh, {});
        std::cout << "export: wrote " << out << "\n";
        return 0;
    }
    if (!store.has_series(variable))
        throw ConfigError("no stored series for variable '" + variable + "'");
    const SnapshotSet set = store.load_series(mesh, variable);
    if (set.size() == 0) throw ConfigError("series '" + variable + "' is empty");
    int k = index < 0 ? set.size() - 1 : index;
    if (k >= set.size())
        throw ConfigError("snapshot index out of range (have " + std::to_string(set.size()) +
                          ")");
    if (out.empty())
        out = (store.root() / "export" / (variable + "_" + std::to_string(k) + ".vtk")).string();
    write_vtk(out, mesh, {{variable, &set.columns[k]}});
    std::cout << "export: wrote " << out << " (t = " << format_double(set.times[k]) << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume EFR channel solver with a POD-Galerkin reduced order model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string export_variable = "u";
    int export_index = -1;
    std::string export_out;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "run configuration file")->required();
    };
    CLI::App* fom_run = app.add_subcommand("fom-run", "run the full-order EFR solver");
    add_config(fom_run);
    CLI::App* pod = app.add_subcommand("pod", "extract POD bases from stored snapshots");
    add_config(pod);
    CLI::App* rom_offline =
        app.add_subcommand("rom-offline", "assemble reduced operators and the time interpolant");
    add_config(rom_offline);
    CLI::App* rom_online = app.add_subcommand("rom-online", "advance the reduced model in time");
    add_config(rom_online);
    CLI::App* compare = app.add_subcommand("compare", "compare the reduced run against the FOM");
    add_config(compare);
    CLI::App* exp = app.add_subcommand("export", "write a stored field as legacy VTK");
    add_config(exp);
    exp->add_option("-v,--variable", export_variable, "mesh, v, p, a, u, rom_u or rom_p");
    exp->add_option("-i,--index", export_index, "snapshot index (default: last)");
    exp->add_option("-o,--out", export_out, "output path");

    try {
        app.parse(argc, argv);
        if (fom_run->parsed()) return cmd_fom_run(config_path);
        if (pod->parsed()) return cmd_pod(config_path);
        if (rom_offline->parsed()) return cmd_rom_offline(config_path);
        if (rom_online->parsed()) return cmd_rom_online(config_path);
        if (compare->parsed()) return cmd_compare(config_path);
        if (exp->parsed()) return cmd_export(config_path, export_variable, export_index, export_out);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const efr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
