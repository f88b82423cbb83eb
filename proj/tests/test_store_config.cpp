// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "efr/config.hpp"
#include "efr/store.hpp"
#include "helpers.hpp"

using namespace efr;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("efr_store_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool bits_equal(double a, double b) {
    return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

}  // namespace

TEST_CASE("double formatting round-trips bit-exactly") {
    for (const double x : {0.0, -0.0, 1.0, -1.0, 1.0 / 3.0, 3.141592653589793, 0.1, -2.5e-17,
                           1e308, -1e308, 1e-308, 5e-324, 6.25, -123456.78901234567})
        CHECK(bits_equal(std::strtod(format_double(x).c_str(), nullptr), x));

    // Random finite doubles, denormals included (exponent field < 2047).
    std::mt19937_64 rng(91);
    for (int k = 0; k < 2000; ++k) {
        uint64_t bits = rng();
        if (((bits >> 52) & 0x7ff) == 0x7ff) bits &= ~(0x7ffULL << 52);
        const double x = std::bit_cast<double>(bits);
        CHECK(bits_equal(std::strtod(format_double(x).c_str(), nullptr), x));
    }
}

TEST_CASE("binary array, matrix and tensor files round-trip") {
    const fs::path dir = fresh_dir("binary");
    std::mt19937 rng(92);
    std::normal_distribution<double> gauss;

    Eigen::VectorXd vec(17);
    for (int i = 0; i < vec.size(); ++i) vec[i] = gauss(rng);
    write_array_file(dir / "a.bin", vec);
    CHECK(read_array_file(dir / "a.bin") == vec);

    Eigen::MatrixXd mat(5, 3);
    for (int i = 0; i < mat.size(); ++i) mat.data()[i] = gauss(rng);
    write_matrix_file(dir / "m.bin", mat);
    CHECK(read_matrix_file(dir / "m.bin") == mat);

    std::vector<Eigen::MatrixXd> slices(4, Eigen::MatrixXd(3, 2));
    for (auto& s : slices)
        for (int i = 0; i < s.size(); ++i) s.data()[i] = gauss(rng);
    write_tensor_file(dir / "t.bin", slices);
    const auto back = read_tensor_file(dir / "t.bin");
    REQUIRE(back.size() == slices.size());
    for (size_t k = 0; k < slices.size(); ++k) CHECK(back[k] == slices[k]);

    // Empty containers are legal.
    write_array_file(dir / "empty.bin", Eigen::VectorXd());
    CHECK(read_array_file(dir / "empty.bin").size() == 0);
    write_tensor_file(dir / "empty_t.bin", {});
    CHECK(read_tensor_file(dir / "empty_t.bin").empty());

    // Ragged tensors are rejected at write time.
    std::vector<Eigen::MatrixXd> ragged{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2)};
    CHECK_THROWS_AS(write_tensor_file(dir / "ragged.bin", ragged), std::invalid_argument);

    // Truncated payloads and missing files are loud failures.
    fs::resize_file(dir / "a.bin", 8 + 16 * 8 + 4);
    CHECK_THROWS_AS(read_array_file(dir / "a.bin"), std::runtime_error);
    CHECK_THROWS_AS(read_matrix_file(dir / "nope.bin"), std::runtime_error);
}

TEST_CASE("manifests keep ordered repeated keys and trip on malformed input") {
    const fs::path dir = fresh_dir("manifest");
    Manifest m;
    m.add("name", "snapshot series");
    m.add("cadence", 0.017);
    m.add("count", static_cast<long long>(42));
    m.add("snapshot", "0.1 v_000000.bin");
    m.add("snapshot", "0.2 v_000001.bin");
    m.save(dir / "m.txt");

    const Manifest back = Manifest::load(dir / "m.txt");
    CHECK(back.get("name") == "snapshot series");
    CHECK(bits_equal(back.get_double("cadence"), 0.017));
    CHECK(back.get_int("count") == 42);
    CHECK(back.has("snapshot"));
    CHECK_FALSE(back.has("absent"));
    const auto all = back.get_all("snapshot");
    REQUIRE(all.size() == 2);
    CHECK(all[0] == "0.1 v_000000.bin");
    CHECK(all[1] == "0.2 v_000001.bin");
    CHECK(back.get("snapshot") == all[0]);  // first occurrence wins
    CHECK_THROWS_AS(back.get("absent"), std::runtime_error);

    std::ofstream(dir / "bad.txt") << "no equals sign here\n";
    CHECK_THROWS_AS(Manifest::load(dir / "bad.txt"), std::runtime_error);
    CHECK_THROWS_AS(Manifest::load(dir / "missing.txt"), std::runtime_error);
}

TEST_CASE("snapshot series write, load, window and mesh guard") {
    const fs::path dir = fresh_dir("series");
    const CartesianMesh mesh = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 4);
    const SnapshotStore store(dir);
    std::mt19937 rng(93);

    std::vector<Field> fields;
    {
        auto writer = store.begin_series(mesh, "v", "m/s", 0.1);
        for (int k = 0; k < 9; ++k) {
            fields.push_back(testutil::random_field(mesh, FieldKind::Vector, rng));
            writer.append(0.1 * k, fields.back());
        }
        writer.finalize();
        CHECK_THROWS_AS(writer.append(1.0, fields[0]), std::logic_error);
    }
    CHECK(store.has_series("v"));
    CHECK_FALSE(store.has_series("p"));

    const auto times = store.series_times("v");
    REQUIRE(times.size() == 9);
    CHECK(times[3] == 0.1 * 3);

    const SnapshotSet all = store.load_series(mesh, "v");
    REQUIRE(all.size() == 9);
    CHECK(all.variable == "v");
    for (int k = 0; k < 9; ++k) CHECK(all.columns[k].data() == fields[k].data());

    // Window selection is inclusive and strided from the first kept sample.
    const SnapshotSet win = store.load_series_window(mesh, "v", 0.2, 0.6, 1);
    REQUIRE(win.size() == 5);
    CHECK(win.times.front() == 0.1 * 2);
    CHECK(win.times.back() == 0.1 * 6);
    const SnapshotSet strided = store.load_series_window(mesh, "v", 0.2, 0.6, 2);
    REQUIRE(strided.size() == 3);
    CHECK(strided.times[1] == 0.1 * 4);
    CHECK(strided.columns[2].data() == fields[6].data());
    CHECK(store.load_series_window(mesh, "v", 5.0, 6.0, 1).size() == 0);
    CHECK_THROWS_AS(store.load_series_window(mesh, "v", 0.0, 1.0, 0), std::invalid_argument);

    // A geometrically different mesh is refused.
    const CartesianMesh other = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 6);
    CHECK_THROWS_AS(store.load_series(other, "v"), std::runtime_error);

    // Scalar data cannot masquerade as a vector variable and vice versa.
    auto pwriter = store.begin_series(mesh, "p", "Pa", 0.1);
    CHECK_THROWS_AS(pwriter.append(0.0, fields[0]), std::invalid_argument);
    CHECK_THROWS_AS(store.begin_series(mesh, "vorticity", "1/s", 0.1), std::invalid_argument);
    CHECK_THROWS_AS(SnapshotStore(fs::path()), std::invalid_argument);
}

TEST_CASE("series writer finalizes on destruction") {
    const fs::path dir = fresh_dir("series_dtor");
    const CartesianMesh mesh = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 4);
    const SnapshotStore store(dir);
    std::mt19937 rng(94);
    {
        auto writer = store.begin_series(mesh, "a", "1", 0.05);
        writer.append(0.0, testutil::random_field(mesh, FieldKind::Scalar, rng));
    }
    CHECK(store.has_series("a"));
    CHECK(store.load_series(mesh, "a").size() == 1);
}

TEST_CASE("basis and lifting artifacts round-trip bit-exactly") {
    const fs::path dir = fresh_dir("basis");
    const CartesianMesh mesh = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 4);
    const SnapshotStore store(dir);
    std::mt19937 rng(95);

    std::vector<Field> cols;
    for (int k = 0; k < 4; ++k) cols.push_back(testutil::random_field(mesh, FieldKind::Vector, rng));
    const PodBasis basis = pod_compute(mesh, "v", cols, 1.0, 3);
    CHECK_FALSE(store.has_basis("v"));
    store.save_basis(basis, mesh, static_cast<int>(cols.size()));
    CHECK(store.has_basis("v"));

    const PodBasis back = store.load_basis(mesh, "v");
    CHECK(back.variable == "v");
    REQUIRE(back.n_modes() == basis.n_modes());
    for (int i = 0; i < basis.n_modes(); ++i) CHECK(back.modes[i].data() == basis.modes[i].data());
    REQUIRE(back.eigenvalues.size() == basis.eigenvalues.size());
    for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i)
        CHECK(bits_equal(back.eigenvalues[i], basis.eigenvalues[i]));
    CHECK(bits_equal(back.threshold, basis.threshold));
    CHECK(bits_equal(back.retained_energy, basis.retained_energy));

    const Field lift = testutil::random_field(mesh, FieldKind::Vector, rng);
    CHECK_FALSE(store.has_lifting());
    store.save_lifting(lift, mesh);
    CHECK(store.has_lifting());
    CHECK(store.load_lifting_field(mesh).data() == lift.data());

    const CartesianMesh other = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 6);
    CHECK_THROWS_AS(store.load_basis(other, "v"), std::runtime_error);
    CHECK_THROWS_AS(store.load_lifting_field(other), std::runtime_error);
}

TEST_CASE("reduced operators round-trip and detect corruption") {
    const fs::path dir = fresh_dir("operators");
    const CartesianMesh mesh = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 4);
    const SnapshotStore store(dir);
    std::mt19937 rng(96);
    std::normal_distribution<double> gauss;
    auto rand_mat = [&](int r, int c) {
        Eigen::MatrixXd m(r, c);
        for (int i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
        return m;
    };
    auto rand_vec = [&](int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        return v;
    };

    ReducedOperators ops;
    ops.nv = 3;
    ops.np = 2;
    ops.na = 2;
    ops.mass = rand_mat(3, 3);
    ops.diffusion = rand_mat(3, 3);
    ops.grad_p = rand_mat(3, 2);
    ops.divergence = rand_mat(2, 3);
    ops.ppe_laplacian = rand_mat(2, 2);
    ops.ppe_curl = rand_mat(2, 3);
    ops.ppe_flux = rand_mat(2, 3);
    ops.conv_lift_flux = rand_mat(3, 3);
    ops.conv_lift_trans = rand_mat(3, 3);
    ops.filter_lift = rand_mat(3, 2);
    ops.ppe_conv_lift_flux = rand_mat(2, 3);
    ops.ppe_conv_lift_trans = rand_mat(2, 3);
    for (int j = 0; j < 3; ++j) ops.convection.push_back(rand_mat(3, 3));
    for (int j = 0; j < 2; ++j) ops.filter.push_back(rand_mat(3, 3));
    for (int j = 0; j < 3; ++j) ops.ppe_convection.push_back(rand_mat(2, 3));
    ops.lift_mass = rand_vec(3);
    ops.lift_diffusion = rand_vec(3);
    ops.conv_lift_both = rand_vec(3);
    ops.ppe_conv_lift_both = rand_vec(2);
    ops.ppe_curl_lift = rand_vec(2);
    ops.ppe_flux_lift = rand_vec(2);

    CHECK_FALSE(store.has_operators());
    store.save_operators(ops, mesh);
    CHECK(store.has_operators());

    const ReducedOperators back = store.load_operators(mesh);
    CHECK(back.nv == 3);
    CHECK(back.np == 2);
    CHECK(back.na == 2);
    CHECK(back.mass == ops.mass);
    CHECK(back.diffusion == ops.diffusion);
    CHECK(back.grad_p == ops.grad_p);
    CHECK(back.divergence == ops.divergence);
    CHECK(back.ppe_laplacian == ops.ppe_laplacian);
    CHECK(back.ppe_curl == ops.ppe_curl);
    CHECK(back.ppe_flux == ops.ppe_flux);
    CHECK(back.conv_lift_flux == ops.conv_lift_flux);
    CHECK(back.conv_lift_trans == ops.conv_lift_trans);
    CHECK(back.filter_lift == ops.filter_lift);
    CHECK(back.ppe_conv_lift_flux == ops.ppe_conv_lift_flux);
    CHECK(back.ppe_conv_lift_trans == ops.ppe_conv_lift_trans);
    for (int j = 0; j < 3; ++j) CHECK(back.convection[j] == ops.convection[j]);
    for (int j = 0; j < 2; ++j) CHECK(back.filter[j] == ops.filter[j]);
    for (int j = 0; j < 3; ++j) CHECK(back.ppe_convection[j] == ops.ppe_convection[j]);
    CHECK(back.lift_mass == ops.lift_mass);
    CHECK(back.lift_diffusion == ops.lift_diffusion);
    CHECK(back.conv_lift_both == ops.conv_lift_both);
    CHECK(back.ppe_conv_lift_both == ops.ppe_conv_lift_both);
    CHECK(back.ppe_curl_lift == ops.ppe_curl_lift);
    CHECK(back.ppe_flux_lift == ops.ppe_flux_lift);

    const CartesianMesh other = build_channel_mesh(1.0, 0.5, {0.5, 0.25}, 0.0, 8, 6);
    CHECK_THROWS_AS(store.load_operators(other), std::runtime_error);

    // Flip one payload byte: the assembly checksum must catch it.
    {
        std::fstream f(store.rom_dir() / "mass.bin",
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(20);
        char byte = 0;
        f.read(&byte, 1);
        byte = static_cast<char>(byte ^ 0x40);
        f.seekp(20);
        f.write(&byte, 1);
    }
    CHECK_THROWS_WITH_AS(store.load_operators(mesh),
                         doctest::Contains("checksum"), std::runtime_error);
}

TEST_CASE("interpolant artifacts round-trip and evaluate identically") {
    const fs::path dir = fresh_dir("interp");
    const SnapshotStore store(dir);
    Eigen::VectorXd times(7);
    Eigen::MatrixXd values(3, 7);
    for (int k = 0; k < 7; ++k) {
        times[k] = 0.2 * k;
        for (int r = 0; r < 3; ++r) values(r, k) = std::sin(1.7 * times[k] + r);
    }
    const RbfInterpolant interp = rbf_fit(times, values, 1.5, 1e-10);
    CHECK_FALSE(store.has_interpolant());
    store.save_interpolant(interp, 1.5, 1e-10);
    CHECK(store.has_interpolant());

    const RbfInterpolant back = store.load_interpolant();
    CHECK(back.centers == interp.centers);
    CHECK(back.widths == interp.widths);
    CHECK(back.weights == interp.weights);
    CHECK(bits_equal(back.lambda, interp.lambda));
    for (const double t : {0.05, 0.33, 1.11})
        CHECK(back.eval(t) == interp.eval(t));

    // A tampered dimension manifest is rejected.
    Manifest m = Manifest::load(store.rom_dir() / "rbf_manifest.txt");
    Manifest tampered;
    tampered.add("n_centers", static_cast<long long>(99));
    tampered.add("n_outputs", m.get("n_outputs"));
    tampered.add("lambda", m.get("lambda"));
    tampered.add("checksum", m.get("checksum"));
    tampered.save(store.rom_dir() / "rbf_manifest.txt");
    CHECK_THROWS_AS(store.load_interpolant(), std::runtime_error);
}

TEST_CASE("config text parsing: defaults, comments, diagnostics") {
    const RunConfig defaults = parse_config_text("");
    CHECK(defaults.length == 2.2);
    CHECK(defaults.height == 0.41);
    CHECK(defaults.nx == 160);
    CHECK(defaults.ny == 30);
    CHECK(defaults.dt == 2e-3);
    CHECK(defaults.alpha_mode == "h_avg");
    CHECK(defaults.chi_mode == "dt");
    CHECK(defaults.snapshot_stride == 5);
    CHECK(defaults.workdir.empty());

    const RunConfig cfg = parse_config_text(
        "# leading comment\n"
        "geometry.length = 1.0\n"
        "geometry.nx = 24   # trailing comment\n"
        "\n"
        "efr.alpha_mode = explicit\n"
        "efr.alpha_value = 0.03\n"
        "pod.window_start = 2.5\n"
        "paths.workdir = /tmp/w\n");
    CHECK(cfg.length == 1.0);
    CHECK(cfg.nx == 24);
    CHECK(cfg.alpha_mode == "explicit");
    CHECK(cfg.alpha_value == 0.03);
    CHECK(cfg.window_start == 2.5);
    CHECK(cfg.workdir == "/tmp/w");
    CHECK(cfg.height == 0.41);  // untouched default

    try {
        parse_config_text("geometry.length = 1.0\n\nspelling.mistake = 3\n");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("spelling.mistake") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("geometry.length 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("geometry.length = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("geometry.nx = 1.5\n"), ConfigError);
}

TEST_CASE("config validation rejects each out-of-range block") {
    auto valid = []() {
        RunConfig c;
        c.workdir = "/tmp/w";
        return c;
    };
    CHECK_NOTHROW(valid().validate());

    auto expect_throw = [](RunConfig c) { CHECK_THROWS_AS(c.validate(), ConfigError); };
    {
        RunConfig c = valid();
        c.length = 0.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.nx = 3;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.obstacle_halfwidth = -0.1;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.mu = 0.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.dt = 0.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.alpha_mode = "auto";
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.alpha_mode = "explicit";
        c.alpha_value = -1.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.chi_mode = "explicit";
        c.chi_value = 1.5;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.t_end = c.t0 - 1.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.snapshot_stride = 0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.energy_p = 1.5;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.energy_a = 0.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.train_stride = 0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.window_start = 3.0;
        c.window_end = 2.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.sigma_factor = 0.0;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.reg_scale = -1e-10;
        expect_throw(c);
    }
    {
        RunConfig c = valid();
        c.workdir.clear();
        expect_throw(c);
    }
}

TEST_CASE("mesh-dependent parameter resolution") {
    RunConfig cfg;
    cfg.workdir = "/tmp/w";
    cfg.nx = 16;
    cfg.ny = 8;
    cfg.length = 1.6;
    cfg.height = 0.8;
    cfg.obstacle_halfwidth = 0.0;
    const CartesianMesh mesh = cfg.build_mesh();
    CHECK(mesh.nx == 16);
    CHECK(mesh.ny == 8);

    EfrParams p = cfg.resolve_params(mesh);
    CHECK(p.alpha == mesh_metrics(mesh).h_avg);
    CHECK(p.chi == cfg.dt);
    cfg.alpha_mode = "explicit";
    cfg.alpha_value = 0.07;
    cfg.chi_mode = "explicit";
    cfg.chi_value = 0.25;
    p = cfg.resolve_params(mesh);
    CHECK(p.alpha == 0.07);
    CHECK(p.chi == 0.25);

    // Window defaults substitute the simulated interval.
    RunConfig w;
    w.workdir = "/tmp/w";
    w.t0 = 1.0;
    w.t_end = 9.0;
    CHECK(w.resolved_window_start() == 1.0);
    CHECK(w.resolved_window_end() == 9.0);
    w.window_start = 4.0;
    w.window_end = 8.0;
    CHECK(w.resolved_window_start() == 4.0);
    CHECK(w.resolved_window_end() == 8.0);
}

TEST_CASE("config file loading honors the workdir environment fallback") {
    const fs::path dir = fresh_dir("config");
    const fs::path cfg_path = dir / "run.cfg";

    std::ofstream(cfg_path) << "geometry.nx = 12\n";
    unsetenv("EFR_WORKDIR");
    CHECK(load_config_file(cfg_path).workdir.empty());

    setenv("EFR_WORKDIR", "/tmp/from_env", 1);
    CHECK(load_config_file(cfg_path).workdir == "/tmp/from_env");

    // An explicit paths.workdir beats the environment.
    std::ofstream(cfg_path) << "geometry.nx = 12\npaths.workdir = /tmp/explicit\n";
    CHECK(load_config_file(cfg_path).workdir == "/tmp/explicit");
    unsetenv("EFR_WORKDIR");

    CHECK_THROWS_AS(load_config_file(dir / "missing.cfg"), ConfigError);
}
