// SPDX-License-Identifier: Apache-2.0

// Field constructors shared by the test suites.

#pragma once

#include <cmath>
#include <random>

#include "efr/bc.hpp"
#include "efr/field.hpp"
#include "efr/mesh.hpp"

namespace testutil {

using efr::CartesianMesh;
using efr::Field;
using efr::FieldKind;

inline Field random_field(const CartesianMesh& mesh, FieldKind kind, std::mt19937& rng,
                          double amplitude = 1.0) {
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    Field f(kind, mesh.n_cells());
    for (Eigen::Index i = 0; i < f.data().size(); ++i) f.data()[i] = dist(rng);
    return f;
}

/// Vector field from closures of the cell centroid.
template <typename Fx, typename Fy>
Field analytic_vector(const CartesianMesh& mesh, Fx fx, Fy fy) {
    Field f = Field::vector(mesh);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto xy = mesh.cell_centroid(c);
        f.x(c) = fx(xy[0], xy[1]);
        f.y(c) = fy(xy[0], xy[1]);
    }
    return f;
}

template <typename Fs>
Field analytic_scalar(const CartesianMesh& mesh, Fs fs) {
    Field f = Field::scalar(mesh);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto xy = mesh.cell_centroid(c);
        f.s(c) = fs(xy[0], xy[1]);
    }
    return f;
}

/// Smooth scalar bump supported strictly inside the domain: zero within
/// `margin` of every boundary, C1 across the support edge.
inline Field interior_bump(const CartesianMesh& mesh, double margin, double kx = 1.0,
                           double ky = 1.0) {
    return analytic_scalar(mesh, [&](double x, double y) {
        const double lx = mesh.length, ly = mesh.height;
        if (x < margin || x > lx - margin || y < margin || y > ly - margin) return 0.0;
        const double sx = (x - margin) / (lx - 2.0 * margin);
        const double sy = (y - margin) / (ly - 2.0 * margin);
        const double wx = sx * sx * (1.0 - sx) * (1.0 - sx);
        const double wy = sy * sy * (1.0 - sy) * (1.0 - sy);
        return 256.0 * wx * wy * std::cos(kx * x) * std::cos(ky * y);
    });
}

/// Exactly (discretely) divergence-free vector field: the central-difference
/// curl of a cell-centered streamfunction that vanishes in a band near every
/// boundary. Central face means then telescope to zero in every cell.
inline Field streamfunction_velocity(const CartesianMesh& mesh, const Field& psi) {
    Field v = Field::vector(mesh);
    const int nx = mesh.nx, ny = mesh.ny;
    auto cell_at = [&](int i, int j) -> int {
        if (i < 0 || i >= nx || j < 0 || j >= ny) return -1;
        return mesh.cell_of_grid[i + nx * j];
    };
    auto psi_at = [&](int i, int j) -> double {
        const int c = cell_at(i, j);
        return c >= 0 ? psi.s(c) : 0.0;
    };
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const int g = mesh.grid_of_cell[c];
        const int i = g % nx, j = g / nx;
        v.x(c) = (psi_at(i, j + 1) - psi_at(i, j - 1)) / (2.0 * mesh.dy);
        v.y(c) = -(psi_at(i + 1, j) - psi_at(i - 1, j)) / (2.0 * mesh.dx);
    }
    return v;
}

/// Analytic steady channel profile (zero wall values, given peak).
inline Field poiseuille_field(const CartesianMesh& mesh, double peak) {
    const double h = mesh.height;
    return analytic_vector(
        mesh, [&](double, double y) { return 4.0 * peak * y * (h - y) / (h * h); },
        [](double, double) { return 0.0; });
}

}  // namespace testutil
