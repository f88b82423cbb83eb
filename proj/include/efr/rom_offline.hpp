// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "efr/pod.hpp"

namespace efr {

/// Galerkin-projected operators over the velocity modes phi, pressure modes
/// psi and indicator modes eta, plus the coupling columns of the lifting
/// field chi (the boundary data enters the reduced dynamics through them).
/// Tensor storage: convection[j](i, k) = (phi_i, div(phi_j (x) phi_k)),
/// filter[j](i, k) = (phi_i, div(eta_j grad phi_k)),
/// ppe_convection[j](i, k) = (grad psi_i, div(phi_j (x) phi_k)).
struct ReducedOperators {
    int nv = 0, np = 0, na = 0;

    Eigen::MatrixXd mass;        ///< (phi_i, phi_j)
    Eigen::MatrixXd diffusion;   ///< (phi_i, Lap phi_j)
    Eigen::MatrixXd grad_p;      ///< (phi_i, grad psi_j)
    Eigen::MatrixXd divergence;  ///< (psi_i, div phi_j)
    std::vector<Eigen::MatrixXd> convection;
    std::vector<Eigen::MatrixXd> filter;
    Eigen::MatrixXd ppe_laplacian;  ///< (grad psi_i, grad psi_j)
    Eigen::MatrixXd ppe_curl;       ///< (n x grad psi_i, curl phi_j) on the boundary
    Eigen::MatrixXd ppe_flux;       ///< (psi_i, n . phi_j) on the boundary
    std::vector<Eigen::MatrixXd> ppe_convection;

    Eigen::VectorXd lift_mass;            ///< (phi_i, chi)
    Eigen::VectorXd lift_diffusion;       ///< (phi_i, Lap chi)
    Eigen::MatrixXd conv_lift_flux;       ///< (phi_i, div(chi (x) phi_k))
    Eigen::MatrixXd conv_lift_trans;      ///< (phi_i, div(phi_j (x) chi))
    Eigen::VectorXd conv_lift_both;       ///< (phi_i, div(chi (x) chi))
    Eigen::MatrixXd filter_lift;          ///< (phi_i, div(eta_j grad chi)), nv x na
    Eigen::MatrixXd ppe_conv_lift_flux;   ///< (grad psi_i, div(chi (x) phi_k))
    Eigen::MatrixXd ppe_conv_lift_trans;  ///< (grad psi_i, div(phi_j (x) chi))
    Eigen::VectorXd ppe_conv_lift_both;   ///< (grad psi_i, div(chi (x) chi))
    Eigen::VectorXd ppe_curl_lift;        ///< (n x grad psi_i, curl chi) on the boundary
    Eigen::VectorXd ppe_flux_lift;        ///< (psi_i, n . chi) on the boundary
};

/// Assemble every reduced operator with the same discrete stencils and face
/// traces as the full-order solver. Boundary integrals run over all boundary
/// faces with face-area weights.
ReducedOperators project_operators(const CartesianMesh& mesh, const PodBasis& basis_v,
                                   const PodBasis& basis_p, const PodBasis& basis_a,
                                   const LiftingFunction& lifting,
                                   const std::function<double(double)>& inflow_shape);

/// Gaussian radial-basis interpolant in time, one weight row per output mode.
struct RbfInterpolant {
    Eigen::VectorXd centers;  ///< training times, strictly increasing
    Eigen::VectorXd widths;   ///< per-kernel Gaussian width sigma
    Eigen::MatrixXd weights;  ///< n_outputs x n_centers
    double lambda = 0.0;      ///< Tikhonov shift applied to the kernel matrix

    int n_centers() const { return static_cast<int>(centers.size()); }
    int n_outputs() const { return static_cast<int>(weights.rows()); }

    /// Kernel sum per output. Sets *extrapolated when t leaves
    /// [t_first - sigma, t_last + sigma].
    Eigen::VectorXd eval(double t, bool* extrapolated = nullptr) const;
};

/// Fit per-mode weights by solving the shared-kernel system with a Tikhonov
/// shift reg_scale * trace(K)/N_s. sigma = sigma_factor * median node spacing.
RbfInterpolant rbf_fit(const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                       double sigma_factor = 1.5, double reg_scale = 1e-10);

}  // namespace efr
