// SPDX-License-Identifier: Apache-2.0

#include "efr/store.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "binary artifact format is little-endian");

namespace efr {

namespace {

void fnv1a_bytes(uint64_t& h, const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return is;
}

void put_u64(std::ofstream& os, uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint64_t get_u64(std::ifstream& is, const std::filesystem::path& path) {
    uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw std::runtime_error("truncated header: " + path.string());
    return v;
}

void put_doubles(std::ofstream& os, const double* data, uint64_t count) {
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(double)));
}

void get_doubles(std::ifstream& is, double* data, uint64_t count,
                 const std::filesystem::path& path) {
    if (!is.read(reinterpret_cast<char*>(data),
                 static_cast<std::streamsize>(count * sizeof(double))))
        throw std::runtime_error("truncated payload: " + path.string());
}

/// scalar or vector storage for the known pipeline variables
FieldKind kind_of_variable(const std::string& variable) {
    if (variable == "v" || variable == "u" || variable == "vbar" || variable == "rom_u")
        return FieldKind::Vector;
    if (variable == "p" || variable == "a" || variable == "rom_p") return FieldKind::Scalar;
    throw std::invalid_argument("snapshot store: unknown variable '" + variable + "'");
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

void write_array_file(const std::filesystem::path& path, const Eigen::VectorXd& data) {
    auto os = open_out(path, true);
    put_u64(os, static_cast<uint64_t>(data.size()));
    put_doubles(os, data.data(), static_cast<uint64_t>(data.size()));
    if (!os) throw std::runtime_error("short write: " + path.string());
}

Eigen::VectorXd read_array_file(const std::filesystem::path& path) {
    auto is = open_in(path, true);
    const uint64_t n = get_u64(is, path);
    Eigen::VectorXd data(static_cast<Eigen::Index>(n));
    get_doubles(is, data.data(), n, path);
    return data;
}

void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    auto os = open_out(path, true);
    put_u64(os, static_cast<uint64_t>(m.rows()));
    put_u64(os, static_cast<uint64_t>(m.cols()));
    put_doubles(os, m.data(), static_cast<uint64_t>(m.size()));
    if (!os) throw std::runtime_error("short write: " + path.string());
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
    auto is = open_in(path, true);
    const uint64_t rows = get_u64(is, path);
    const uint64_t cols = get_u64(is, path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    get_doubles(is, m.data(), rows * cols, path);
    return m;
}

void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<Eigen::MatrixXd>& slices) {
    auto os = open_out(path, true);
    const uint64_t n = slices.size();
    const uint64_t rows = n ? static_cast<uint64_t>(slices[0].rows()) : 0;
    const uint64_t cols = n ? static_cast<uint64_t>(slices[0].cols()) : 0;
    put_u64(os, n);
    put_u64(os, rows);
    put_u64(os, cols);
    for (const auto& s : slices) {
        if (static_cast<uint64_t>(s.rows()) != rows || static_cast<uint64_t>(s.cols()) != cols)
            throw std::invalid_argument("tensor slices must share a shape");
        put_doubles(os, s.data(), rows * cols);
    }
    if (!os) throw std::runtime_error("short write: " + path.string());
}

std::vector<Eigen::MatrixXd> read_tensor_file(const std::filesystem::path& path) {
    auto is = open_in(path, true);
    const uint64_t n = get_u64(is, path);
    const uint64_t rows = get_u64(is, path);
    const uint64_t cols = get_u64(is, path);
    std::vector<Eigen::MatrixXd> slices(n);
    for (auto& s : slices) {
        s.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        get_doubles(is, s.data(), rows * cols, path);
    }
    return slices;
}

void checksum_file(const std::filesystem::path& path, uint64_t& hash) {
    auto is = open_in(path, true);
    char buf[1 << 16];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0)
        fnv1a_bytes(hash, buf, static_cast<size_t>(is.gcount()));
}

// ---------------------------------------------------------------- Manifest

void Manifest::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}
void Manifest::add(const std::string& key, double value) { add(key, format_double(value)); }
void Manifest::add(const std::string& key, long long value) { add(key, std::to_string(value)); }

bool Manifest::has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return true;
    return false;
}

const std::string& Manifest::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    throw std::runtime_error("manifest: missing key '" + key + "'");
}

double Manifest::get_double(const std::string& key) const {
    return std::strtod(get(key).c_str(), nullptr);
}

long long Manifest::get_int(const std::string& key) const { return std::stoll(get(key)); }

std::vector<std::string> Manifest::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out.push_back(v);
    return out;
}

void Manifest::save(const std::filesystem::path& path) const {
    auto os = open_out(path, false);
    for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
    if (!os) throw std::runtime_error("short write: " + path.string());
}

Manifest Manifest::load(const std::filesystem::path& path) {
    auto is = open_in(path, false);
    Manifest m;
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("manifest: malformed line in " + path.string());
        m.entries_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return m;
}

// ------------------------------------------------------------ SnapshotStore

SnapshotStore::SnapshotStore(std::filesystem::path workdir) : root_(std::move(workdir)) {
    if (root_.empty()) throw std::invalid_argument("snapshot store: empty workdir path");
}

SnapshotStore::SeriesWriter::SeriesWriter(std::filesystem::path dir, std::string variable,
                                          std::string units, std::string mesh_hash,
                                          double cadence)
    : dir_(std::move(dir)), variable_(std::move(variable)), units_(std::move(units)),
      mesh_hash_(std::move(mesh_hash)), cadence_(cadence) {
    kind_ = kind_of_variable(variable_) == FieldKind::Vector ? "vector" : "scalar";
    std::filesystem::create_directories(dir_);
}

SnapshotStore::SeriesWriter::~SeriesWriter() {
    try {
        finalize();
    } catch (...) {
        // destructor must not throw; an explicit finalize() reports errors
    }
}

void SnapshotStore::SeriesWriter::append(double time, const Field& field) {
    if (finalized_) throw std::logic_error("snapshot series already finalized");
    if (field.kind() != kind_of_variable(variable_))
        throw std::invalid_argument("snapshot kind mismatch for variable '" + variable_ + "'");
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%06zu.bin", variable_.c_str(), written_.size());
    write_array_file(dir_ / name, field.data());
    written_.emplace_back(time, name);
}

void SnapshotStore::SeriesWriter::finalize() {
    if (finalized_) return;
    finalized_ = true;
    Manifest m;
    m.add("variable", variable_);
    m.add("kind", kind_);
    m.add("units", units_);
    m.add("mesh_hash", mesh_hash_);
    m.add("cadence", cadence_);
    m.add("count", static_cast<long long>(written_.size()));
    for (const auto& [t, name] : written_) m.add("snapshot", format_double(t) + " " + name);
    m.save(dir_ / (variable_ + "_manifest.txt"));
}

SnapshotStore::SeriesWriter SnapshotStore::begin_series(const CartesianMesh& mesh,
                                                        const std::string& variable,
                                                        const std::string& units,
                                                        double cadence) const {
    return SeriesWriter(snapshots_dir(), variable, units, mesh.geometry_hash(), cadence);
}

bool SnapshotStore::has_series(const std::string& variable) const {
    return std::filesystem::exists(snapshots_dir() / (variable + "_manifest.txt"));
}

std::vector<double> SnapshotStore::series_times(const std::string& variable) const {
    const Manifest m = Manifest::load(snapshots_dir() / (variable + "_manifest.txt"));
    std::vector<double> times;
    for (const auto& entry : m.get_all("snapshot"))
        times.push_back(std::strtod(entry.c_str(), nullptr));
    return times;
}

SnapshotSet SnapshotStore::load_series(const CartesianMesh& mesh,
                                       const std::string& variable) const {
    const auto dir = snapshots_dir();
    const Manifest m = Manifest::load(dir / (variable + "_manifest.txt"));
    if (m.get("mesh_hash") != mesh.geometry_hash())
        throw std::runtime_error("snapshot series '" + variable +
                                 "' was written for a different mesh (hash " + m.get("mesh_hash") +
                                 ", expected " + mesh.geometry_hash() + ")");
    const auto entries = m.get_all("snapshot");
    if (static_cast<long long>(entries.size()) != m.get_int("count"))
        throw std::runtime_error("snapshot manifest count mismatch for '" + variable + "'");
    const FieldKind kind = kind_of_variable(variable);
    SnapshotSet set;
    set.variable = variable;
    for (const auto& entry : entries) {
        const size_t sp = entry.find(' ');
        if (sp == std::string::npos)
            throw std::runtime_error("malformed snapshot entry: " + entry);
        set.times.push_back(std::strtod(entry.substr(0, sp).c_str(), nullptr));
        Field f(kind, mesh.n_cells());
        Eigen::VectorXd data = read_array_file(dir / entry.substr(sp + 1));
        if (data.size() != f.data().size())
            throw std::runtime_error("snapshot size mismatch in '" + entry.substr(sp + 1) + "'");
        f.data() = std::move(data);
        set.columns.push_back(std::move(f));
    }
    set.validate();
    return set;
}

SnapshotSet SnapshotStore::load_series_window(const CartesianMesh& mesh,
                                              const std::string& variable, double t_begin,
                                              double t_end, int stride) const {
    if (stride < 1) throw std::invalid_argument("snapshot window stride must be >= 1");
    SnapshotSet all = load_series(mesh, variable);
    SnapshotSet out;
    out.variable = all.variable;
    out.homogenized = all.homogenized;
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    int in_window = 0;
    for (int k = 0; k < all.size(); ++k) {
        if (all.times[k] < t_begin - eps || all.times[k] > t_end + eps) continue;
        if (in_window++ % stride != 0) continue;
        out.times.push_back(all.times[k]);
        out.columns.push_back(std::move(all.columns[k]));
    }
    return out;
}

void SnapshotStore::save_basis(const PodBasis& basis, const CartesianMesh& mesh,
                               int n_snapshots) const {
    std::filesystem::create_directories(pod_dir());
    const Eigen::Index dof = basis.modes.empty() ? 0 : basis.modes[0].data().size();
    Eigen::MatrixXd modes(dof, basis.n_modes());
    for (int i = 0; i < basis.n_modes(); ++i) modes.col(i) = basis.modes[i].data();
    write_matrix_file(pod_dir() / ("basis_" + basis.variable + "_modes.bin"), modes);
    Manifest m;
    m.add("variable", basis.variable);
    m.add("mesh_hash", mesh.geometry_hash());
    m.add("n_snapshots", static_cast<long long>(n_snapshots));
    m.add("n_modes", static_cast<long long>(basis.n_modes()));
    m.add("threshold", basis.threshold);
    m.add("retained_energy", basis.retained_energy);
    for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i)
        m.add("eigenvalue", basis.eigenvalues[i]);
    m.save(pod_dir() / ("basis_" + basis.variable + "_manifest.txt"));
}

bool SnapshotStore::has_basis(const std::string& variable) const {
    return std::filesystem::exists(pod_dir() / ("basis_" + variable + "_manifest.txt"));
}

PodBasis SnapshotStore::load_basis(const CartesianMesh& mesh, const std::string& variable) const {
    const Manifest m = Manifest::load(pod_dir() / ("basis_" + variable + "_manifest.txt"));
    if (m.get("mesh_hash") != mesh.geometry_hash())
        throw std::runtime_error("basis '" + variable + "' was written for a different mesh");
    PodBasis basis;
    basis.variable = variable;
    basis.threshold = m.get_double("threshold");
    basis.retained_energy = m.get_double("retained_energy");
    const auto eig = m.get_all("eigenvalue");
    basis.eigenvalues.resize(static_cast<Eigen::Index>(eig.size()));
    for (size_t i = 0; i < eig.size(); ++i)
        basis.eigenvalues[static_cast<Eigen::Index>(i)] = std::strtod(eig[i].c_str(), nullptr);
    const Eigen::MatrixXd modes =
        read_matrix_file(pod_dir() / ("basis_" + variable + "_modes.bin"));
    if (modes.cols() != m.get_int("n_modes"))
        throw std::runtime_error("basis mode count mismatch for '" + variable + "'");
    const FieldKind kind = kind_of_variable(variable);
    for (Eigen::Index i = 0; i < modes.cols(); ++i) {
        Field f(kind, mesh.n_cells());
        if (modes.rows() != f.data().size())
            throw std::runtime_error("basis mode size mismatch for '" + variable + "'");
        f.data() = modes.col(i);
        basis.modes.push_back(std::move(f));
    }
    return basis;
}

void SnapshotStore::save_lifting(const Field& control_field, const CartesianMesh& mesh) const {
    std::filesystem::create_directories(pod_dir());
    write_array_file(pod_dir() / "lifting.bin", control_field.data());
    Manifest m;
    m.add("kind", "vector");
    m.add("mesh_hash", mesh.geometry_hash());
    m.save(pod_dir() / "lifting_manifest.txt");
}

bool SnapshotStore::has_lifting() const {
    return std::filesystem::exists(pod_dir() / "lifting_manifest.txt");
}

Field SnapshotStore::load_lifting_field(const CartesianMesh& mesh) const {
    const Manifest m = Manifest::load(pod_dir() / "lifting_manifest.txt");
    if (m.get("mesh_hash") != mesh.geometry_hash())
        throw std::runtime_error("lifting field was written for a different mesh");
    Field f = Field::vector(mesh);
    Eigen::VectorXd data = read_array_file(pod_dir() / "lifting.bin");
    if (data.size() != f.data().size())
        throw std::runtime_error("lifting field size mismatch");
    f.data() = std::move(data);
    return f;
}

namespace {

/// fixed file layout of the reduced-operator directory (order matters for
/// the assembly checksum)
const char* const kOperatorMatrixFiles[] = {
    "mass.bin",           "diffusion.bin",          "grad_p.bin",
    "divergence.bin",     "ppe_laplacian.bin",      "ppe_curl.bin",
    "ppe_flux.bin",       "conv_lift_flux.bin",     "conv_lift_trans.bin",
    "filter_lift.bin",    "ppe_conv_lift_flux.bin", "ppe_conv_lift_trans.bin",
};
const char* const kOperatorTensorFiles[] = {"convection.bin", "filter.bin", "ppe_convection.bin"};
const char* const kOperatorArrayFiles[] = {
    "lift_mass.bin",         "lift_diffusion.bin", "conv_lift_both.bin",
    "ppe_conv_lift_both.bin", "ppe_curl_lift.bin",  "ppe_flux_lift.bin",
};

uint64_t operators_checksum(const std::filesystem::path& dir) {
    uint64_t h = 1469598103934665603ULL;
    for (const char* name : kOperatorMatrixFiles) checksum_file(dir / name, h);
    for (const char* name : kOperatorTensorFiles) checksum_file(dir / name, h);
    for (const char* name : kOperatorArrayFiles) checksum_file(dir / name, h);
    return h;
}

std::string hex64(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace

void SnapshotStore::save_operators(const ReducedOperators& ops, const CartesianMesh& mesh) const {
    const auto dir = rom_dir();
    std::filesystem::create_directories(dir);
    const Eigen::MatrixXd* mats[] = {
        &ops.mass,           &ops.diffusion,          &ops.grad_p,
        &ops.divergence,     &ops.ppe_laplacian,      &ops.ppe_curl,
        &ops.ppe_flux,       &ops.conv_lift_flux,     &ops.conv_lift_trans,
        &ops.filter_lift,    &ops.ppe_conv_lift_flux, &ops.ppe_conv_lift_trans,
    };
    for (size_t i = 0; i < std::size(kOperatorMatrixFiles); ++i)
        write_matrix_file(dir / kOperatorMatrixFiles[i], *mats[i]);
    write_tensor_file(dir / "convection.bin", ops.convection);
    write_tensor_file(dir / "filter.bin", ops.filter);
    write_tensor_file(dir / "ppe_convection.bin", ops.ppe_convection);
    const Eigen::VectorXd* arrays[] = {
        &ops.lift_mass,          &ops.lift_diffusion, &ops.conv_lift_both,
        &ops.ppe_conv_lift_both, &ops.ppe_curl_lift,  &ops.ppe_flux_lift,
    };
    for (size_t i = 0; i < std::size(kOperatorArrayFiles); ++i)
        write_array_file(dir / kOperatorArrayFiles[i], *arrays[i]);

    Manifest m;
    m.add("mesh_hash", mesh.geometry_hash());
    m.add("n_velocity_modes", static_cast<long long>(ops.nv));
    m.add("n_pressure_modes", static_cast<long long>(ops.np));
    m.add("n_indicator_modes", static_cast<long long>(ops.na));
    m.add("checksum", hex64(operators_checksum(dir)));
    m.save(dir / "operators_manifest.txt");
}

bool SnapshotStore::has_operators() const {
    return std::filesystem::exists(rom_dir() / "operators_manifest.txt");
}

ReducedOperators SnapshotStore::load_operators(const CartesianMesh& mesh) const {
    const auto dir = rom_dir();
    const Manifest m = Manifest::load(dir / "operators_manifest.txt");
    if (m.get("mesh_hash") != mesh.geometry_hash())
        throw std::runtime_error("reduced operators were written for a different mesh");
    if (m.get("checksum") != hex64(operators_checksum(dir)))
        throw std::runtime_error("reduced operator files fail their assembly checksum");
    ReducedOperators ops;
    ops.nv = static_cast<int>(m.get_int("n_velocity_modes"));
    ops.np = static_cast<int>(m.get_int("n_pressure_modes"));
    ops.na = static_cast<int>(m.get_int("n_indicator_modes"));
    Eigen::MatrixXd* mats[] = {
        &ops.mass,           &ops.diffusion,          &ops.grad_p,
        &ops.divergence,     &ops.ppe_laplacian,      &ops.ppe_curl,
        &ops.ppe_flux,       &ops.conv_lift_flux,     &ops.conv_lift_trans,
        &ops.filter_lift,    &ops.ppe_conv_lift_flux, &ops.ppe_conv_lift_trans,
    };
    for (size_t i = 0; i < std::size(kOperatorMatrixFiles); ++i)
        *mats[i] = read_matrix_file(dir / kOperatorMatrixFiles[i]);
    ops.convection = read_tensor_file(dir / "convection.bin");
    ops.filter = read_tensor_file(dir / "filter.bin");
    ops.ppe_convection = read_tensor_file(dir / "ppe_convection.bin");
    Eigen::VectorXd* arrays[] = {
        &ops.lift_mass,          &ops.lift_diffusion, &ops.conv_lift_both,
        &ops.ppe_conv_lift_both, &ops.ppe_curl_lift,  &ops.ppe_flux_lift,
    };
    for (size_t i = 0; i < std::size(kOperatorArrayFiles); ++i)
        *arrays[i] = read_array_file(dir / kOperatorArrayFiles[i]);
    return ops;
}

void SnapshotStore::save_interpolant(const RbfInterpolant& interp, double sigma_factor,
                                     double reg_scale) const {
    const auto dir = rom_dir();
    std::filesystem::create_directories(dir);
    write_array_file(dir / "rbf_centers.bin", interp.centers);
    write_array_file(dir / "rbf_widths.bin", interp.widths);
    write_matrix_file(dir / "rbf_weights.bin", interp.weights);
    uint64_t h = 1469598103934665603ULL;
    checksum_file(dir / "rbf_centers.bin", h);
    checksum_file(dir / "rbf_widths.bin", h);
    checksum_file(dir / "rbf_weights.bin", h);
    Manifest m;
    m.add("n_centers", static_cast<long long>(interp.n_centers()));
    m.add("n_outputs", static_cast<long long>(interp.n_outputs()));
    m.add("lambda", interp.lambda);
    m.add("sigma_factor", sigma_factor);
    m.add("reg_scale", reg_scale);
    m.add("checksum", hex64(h));
    m.save(dir / "rbf_manifest.txt");
}

bool SnapshotStore::has_interpolant() const {
    return std::filesystem::exists(rom_dir() / "rbf_manifest.txt");
}

RbfInterpolant SnapshotStore::load_interpolant() const {
    const auto dir = rom_dir();
    const Manifest m = Manifest::load(dir / "rbf_manifest.txt");
    RbfInterpolant interp;
    interp.centers = read_array_file(dir / "rbf_centers.bin");
    interp.widths = read_array_file(dir / "rbf_widths.bin");
    interp.weights = read_matrix_file(dir / "rbf_weights.bin");
    interp.lambda = m.get_double("lambda");
    if (interp.n_centers() != m.get_int("n_centers") ||
        interp.n_outputs() != m.get_int("n_outputs"))
        throw std::runtime_error("interpolant manifest dimensions mismatch");
    return interp;
}

}  // namespace efr
