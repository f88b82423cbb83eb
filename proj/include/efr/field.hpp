// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "efr/mesh.hpp"

namespace efr {

enum class FieldKind : uint8_t { Scalar, Vector };

/// Cell-centered field on the active cells of a CartesianMesh. Vector fields
/// store the two components interleaved (x0, y0, x1, y1, ...).
class Field {
public:
    Field() = default;
    Field(FieldKind kind, int n_cells)
        : kind_(kind), n_cells_(n_cells),
          data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_cells) * stride())) {}

    static Field scalar(const CartesianMesh& mesh) { return Field(FieldKind::Scalar, mesh.n_cells()); }
    static Field vector(const CartesianMesh& mesh) { return Field(FieldKind::Vector, mesh.n_cells()); }

    FieldKind kind() const { return kind_; }
    int n_cells() const { return n_cells_; }
    int stride() const { return kind_ == FieldKind::Vector ? 2 : 1; }

    double& s(int c) { return data_[c]; }
    double s(int c) const { return data_[c]; }
    double& x(int c) { return data_[2 * c]; }
    double x(int c) const { return data_[2 * c]; }
    double& y(int c) { return data_[2 * c + 1]; }
    double y(int c) const { return data_[2 * c + 1]; }

    Eigen::Vector2d vec(int c) const { return {data_[2 * c], data_[2 * c + 1]}; }
    void set_vec(int c, const Eigen::Vector2d& v) {
        data_[2 * c] = v[0];
        data_[2 * c + 1] = v[1];
    }

    Eigen::VectorXd& data() { return data_; }
    const Eigen::VectorXd& data() const { return data_; }

    void set_zero() { data_.setZero(); }

private:
    FieldKind kind_ = FieldKind::Scalar;
    int n_cells_ = 0;
    Eigen::VectorXd data_;
};

inline void require_same_shape(const Field& a, const Field& b, const char* what) {
    if (a.kind() != b.kind() || a.n_cells() != b.n_cells())
        throw std::invalid_argument(std::string(what) + ": field shape mismatch");
}

/// Volume-weighted L2 inner product over the active cells.
inline double l2_inner(const CartesianMesh& mesh, const Field& a, const Field& b) {
    require_same_shape(a, b, "l2_inner");
    return mesh.cell_volume() * a.data().dot(b.data());
}

inline double l2_norm(const CartesianMesh& mesh, const Field& a) {
    return std::sqrt(mesh.cell_volume()) * a.data().norm();
}

}  // namespace efr
