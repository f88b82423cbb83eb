// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "efr/rom_offline.hpp"

namespace efr {

/// Shortest text form of a double that round-trips bit-exactly.
std::string format_double(double x);

/// Binary array: 8-byte little-endian count header, then count 64-bit floats.
void write_array_file(const std::filesystem::path& path, const Eigen::VectorXd& data);
Eigen::VectorXd read_array_file(const std::filesystem::path& path);

/// Binary matrix: rows and cols headers, then column-major 64-bit floats.
void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);

/// Binary rank-3 tensor: slice count plus matrix dims, then each slice.
void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<Eigen::MatrixXd>& slices);
std::vector<Eigen::MatrixXd> read_tensor_file(const std::filesystem::path& path);

/// FNV-1a of a file's bytes, folded into a running hash.
void checksum_file(const std::filesystem::path& path, uint64_t& hash);

/// Ordered key = value text file; repeated keys are allowed and keep order.
class Manifest {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  ///< throws if absent
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::vector<std::string> get_all(const std::string& key) const;

    void save(const std::filesystem::path& path) const;
    static Manifest load(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Workdir-backed persistence for every pipeline artifact: snapshot series,
/// POD bases, the lifting field, reduced operators and the time interpolant.
/// Every manifest records the mesh geometry hash and loads validate it.
class SnapshotStore {
public:
    explicit SnapshotStore(std::filesystem::path workdir);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path snapshots_dir() const { return root_ / "snapshots"; }
    std::filesystem::path pod_dir() const { return root_ / "pod"; }
    std::filesystem::path rom_dir() const { return root_ / "rom"; }

    /// Incremental writer for one variable's snapshot series; finalize()
    /// (or destruction) writes the manifest.
    class SeriesWriter {
    public:
        SeriesWriter(SeriesWriter&&) = default;
        ~SeriesWriter();
        void append(double time, const Field& field);
        void finalize();

    private:
        friend class SnapshotStore;
        SeriesWriter(std::filesystem::path dir, std::string variable, std::string units,
                     std::string mesh_hash, double cadence);
        std::filesystem::path dir_;
        std::string variable_, units_, mesh_hash_, kind_;
        double cadence_ = 0.0;
        std::vector<std::pair<double, std::string>> written_;
        bool finalized_ = false;
    };

    SeriesWriter begin_series(const CartesianMesh& mesh, const std::string& variable,
                              const std::string& units, double cadence) const;
    bool has_series(const std::string& variable) const;
    std::vector<double> series_times(const std::string& variable) const;
    SnapshotSet load_series(const CartesianMesh& mesh, const std::string& variable) const;
    /// Subset restricted to times in [t_begin, t_end] taking every stride-th column.
    SnapshotSet load_series_window(const CartesianMesh& mesh, const std::string& variable,
                                   double t_begin, double t_end, int stride) const;

    void save_basis(const PodBasis& basis, const CartesianMesh& mesh, int n_snapshots) const;
    bool has_basis(const std::string& variable) const;
    PodBasis load_basis(const CartesianMesh& mesh, const std::string& variable) const;

    void save_lifting(const Field& control_field, const CartesianMesh& mesh) const;
    bool has_lifting() const;
    Field load_lifting_field(const CartesianMesh& mesh) const;

    void save_operators(const ReducedOperators& ops, const CartesianMesh& mesh) const;
    bool has_operators() const;
    ReducedOperators load_operators(const CartesianMesh& mesh) const;

    void save_interpolant(const RbfInterpolant& interp, double sigma_factor,
                          double reg_scale) const;
    bool has_interpolant() const;
    RbfInterpolant load_interpolant() const;

private:
    std::filesystem::path root_;
};

}  // namespace efr
