// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "efr/bc.hpp"
#include "efr/field.hpp"
#include "efr/mesh.hpp"

namespace efr {

// Face trace conventions, shared by the solver, the operator projections and
// the diagnostics:
//  - velocity-like fields: central interpolation on interior faces, Dirichlet
//    data on inflow/wall/obstacle faces, owner value (zero-gradient) on the
//    outflow;
//  - pressure-like fields: central on interior faces, owner value on
//    zero-gradient boundaries, 0 on the outflow (Dirichlet).

/// Face value of a velocity-like field.
Eigen::Vector2d velocity_face_value(const CartesianMesh& mesh, int face, const Field& v,
                                    const VelocityBc& bc);

/// Face value of a pressure-like field.
double pressure_face_value(const CartesianMesh& mesh, int face, const Field& p);

/// Mass flux v_f . A_f through a face (oriented along the stored area vector).
double face_mass_flux(const CartesianMesh& mesh, int face, const Field& v, const VelocityBc& bc);

/// Cell-centered Gauss gradient of a pressure-like field.
Field gauss_gradient_pressure(const CartesianMesh& mesh, const Field& p);

/// Cell-centered Gauss gradient tensor of a velocity-like field, stored as a
/// 4-component record per cell: (dux/dx, dux/dy, duy/dx, duy/dy).
struct GradientTensor {
    Eigen::VectorXd data;  ///< 4 * n_cells
    double dxx(int c) const { return data[4 * c + 0]; }
    double dxy(int c) const { return data[4 * c + 1]; }
    double dyx(int c) const { return data[4 * c + 2]; }
    double dyy(int c) const { return data[4 * c + 3]; }
};
GradientTensor gauss_gradient_velocity(const CartesianMesh& mesh, const Field& v,
                                       const VelocityBc& bc);

/// Scalar curl (z-component) of a velocity-like field per cell.
Field curl_z(const CartesianMesh& mesh, const Field& v, const VelocityBc& bc);

/// Cell-averaged divergence using the face trace conventions above.
Field divergence_fv(const CartesianMesh& mesh, const Field& v, const VelocityBc& bc);

/// Cell-averaged Laplacian of a velocity-like field (two-point orthogonal
/// face gradients, zero diffusive flux through the outflow).
Field apply_laplacian_velocity(const CartesianMesh& mesh, const Field& v, const VelocityBc& bc);

/// Cell-averaged Laplacian of a pressure-like field (Dirichlet 0 on the
/// outflow, zero flux elsewhere). The induced bilinear form is symmetric.
Field apply_laplacian_pressure(const CartesianMesh& mesh, const Field& psi);

/// Cell-averaged div(flux_v (x) w): central flux of `flux_v` convecting `w`.
Field apply_convection(const CartesianMesh& mesh, const Field& flux_v, const VelocityBc& flux_bc,
                       const Field& w, const VelocityBc& w_bc);

/// Cell-averaged div(coeff grad v) with an arithmetic face mean of `coeff`
/// (owner value on boundary faces) and velocity-like traces for `v`.
Field apply_coeff_laplacian(const CartesianMesh& mesh, const Field& coeff, const Field& v,
                            const VelocityBc& bc);

}  // namespace efr
