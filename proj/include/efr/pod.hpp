// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "efr/fom.hpp"

namespace efr {

/// Time-tagged snapshot collection of one variable on one mesh.
struct SnapshotSet {
    std::string variable;  ///< "v", "p", "a" or "u"
    std::vector<double> times;
    std::vector<Field> columns;
    bool homogenized = false;

    int size() const { return static_cast<int>(columns.size()); }
    void validate() const;  ///< shapes consistent, times strictly increasing
};

/// Divergence-free control field absorbing the inflow Dirichlet data, with
/// its temporal amplitude u_BC(t).
struct LiftingFunction {
    Field control_field;  ///< unit-amplitude velocity field
    std::function<double(double)> amplitude;
};

/// Orthonormal POD basis with its full eigenvalue spectrum.
struct PodBasis {
    std::string variable;
    std::vector<Field> modes;     ///< orthonormal in the volume-weighted L2 product
    Eigen::VectorXd eigenvalues;  ///< descending, length = snapshot count
    double retained_energy = 0.0;
    double threshold = 0.0;

    int n_modes() const { return static_cast<int>(modes.size()); }
};

/// Subtract amplitude(t) * control_field from every velocity column.
SnapshotSet homogenize(const SnapshotSet& snaps, const LiftingFunction& lift);

/// Build the lifting via a unit-amplitude steady Stokes solve; the temporal
/// coefficient is the channel ramp sin(pi t / 8).
LiftingFunction build_lifting(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                              const std::function<double(double)>& inflow_shape);

/// Gram matrix C_ij = (col_i, col_j) in the volume-weighted L2 product.
Eigen::MatrixXd correlation_matrix(const CartesianMesh& mesh, const std::vector<Field>& columns);

/// Method of snapshots: correlation eigendecomposition, basis construction,
/// re-orthonormalization, sign normalization, and energy-threshold truncation
/// (modes with eigenvalue below 1e-12 * max are never retained; max_modes <= 0
/// means no cap).
PodBasis pod_compute(const CartesianMesh& mesh, const std::string& variable,
                     const std::vector<Field>& columns, double energy_threshold,
                     int max_modes = 0);

/// Coefficients (field, mode_i) for every mode.
Eigen::VectorXd project_field(const CartesianMesh& mesh, const PodBasis& basis,
                              const Field& field);

/// Sum of coeff_i * mode_i.
Field reconstruct_from_basis(const PodBasis& basis, const Eigen::VectorXd& coeffs);

}  // namespace efr
