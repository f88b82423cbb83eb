// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "efr/rom_offline.hpp"

namespace efr {

/// Reduced time-stepping state. `beta` tracks the intermediate velocity
/// coefficients, `beta_bar` the filtered ones, `gamma` the pressure; the
/// inflow amplitudes of the two previous steps ride along for the lifting
/// forcing terms.
struct RomState {
    double time = 0.0;
    long step = 0;
    Eigen::VectorXd beta_prev, beta;
    Eigen::VectorXd beta_bar_prev, beta_bar;
    Eigen::VectorXd gamma;
    double amp = 0.0, amp_prev = 0.0;
};

/// Project homogenized initial fields; gamma starts at zero and the BDF
/// history is bootstrapped with the initial coefficients.
RomState rom_init(const CartesianMesh& mesh, const PodBasis& basis_v, int np,
                  const Field& initial_v_hom, const Field& initial_vbar_hom,
                  const std::function<double(double)>& amplitude, double t0);

struct RomStepInfo {
    bool extrapolated = false;    ///< RBF evaluated outside the training window
    double div_residual = 0.0;    ///< |P_r beta^{n+1}| after the momentum solve
};

/// One reduced step: evaluate delta by RBF, solve the stacked momentum+PPE
/// system for (beta, gamma) with convection contracted against the previous
/// beta, then the delta-contracted filter system for beta_bar, then shift.
RomStepInfo rom_step(const ReducedOperators& ops, const RbfInterpolant& interp,
                     const EfrParams& params, const std::function<double(double)>& amplitude,
                     RomState& state);

/// End-of-step reduced fields:
/// u_r = amp(t) chi + sum((1-chi_w) beta_i + chi_w beta_bar_i) phi_i,
/// p_r = sum gamma_i psi_i.
void reconstruct(const PodBasis& basis_v, const PodBasis& basis_p, const LiftingFunction& lifting,
                 const RomState& state, double chi_weight, Field& u_out, Field& p_out);

}  // namespace efr
