// SPDX-License-Identifier: Apache-2.0

#include "efr/rom_online.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace efr {

RomState rom_init(const CartesianMesh& mesh, const PodBasis& basis_v, int np,
                  const Field& initial_v_hom, const Field& initial_vbar_hom,
                  const std::function<double(double)>& amplitude, double t0) {
    RomState s;
    s.time = t0;
    s.step = 0;
    s.beta = project_field(mesh, basis_v, initial_v_hom);
    s.beta_bar = project_field(mesh, basis_v, initial_vbar_hom);
    s.beta_prev = s.beta;
    s.beta_bar_prev = s.beta_bar;
    s.gamma = Eigen::VectorXd::Zero(np);
    s.amp = amplitude(t0);
    s.amp_prev = s.amp;
    return s;
}

RomStepInfo rom_step(const ReducedOperators& ops, const RbfInterpolant& interp,
                     const EfrParams& params, const std::function<double(double)>& amplitude,
                     RomState& state) {
    const int nv = ops.nv, np = ops.np, na = ops.na;
    if (state.beta.size() != nv || state.gamma.size() != np)
        throw std::invalid_argument("rom_step: state/operator dimension mismatch");

    const double rho = params.rho, mu = params.mu, dt = params.dt, chi = params.chi;
    const double t_new = state.time + dt;
    const double u_new = amplitude(t_new);
    const double u_cur = state.amp;
    const double u_prev = state.amp_prev;

    RomStepInfo info;
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(na);
    if (na > 0) delta = interp.eval(t_new, &info.extrapolated);

    // History mix of the relaxed end-of-step coefficients.
    const Eigen::VectorXd hist = (1.0 - chi) * (4.0 * state.beta - state.beta_prev) +
                                 chi * (4.0 * state.beta_bar - state.beta_bar_prev);
    const double hist_amp = 4.0 * u_cur - u_prev;

    // Convection operators contracted with the previous-step coefficients.
    Eigen::MatrixXd conv_beta = Eigen::MatrixXd::Zero(nv, nv);
    Eigen::MatrixXd ppe_conv_beta = Eigen::MatrixXd::Zero(np, nv);
    for (int j = 0; j < nv; ++j) {
        conv_beta += state.beta[j] * ops.convection[j];
        ppe_conv_beta += state.beta[j] * ops.ppe_convection[j];
    }

    const double c_time = 3.0 * rho / (2.0 * dt);
    const double c_hist = rho / (2.0 * dt);

    Eigen::MatrixXd lhs(nv + np, nv + np);
    lhs.topLeftCorner(nv, nv) =
        c_time * ops.mass + rho * (conv_beta + u_cur * ops.conv_lift_flux) - 2.0 * mu * ops.diffusion;
    lhs.topRightCorner(nv, np) = ops.grad_p;
    lhs.bottomLeftCorner(np, nv) = rho * (ppe_conv_beta + u_cur * ops.ppe_conv_lift_flux) -
                                   2.0 * mu * ops.ppe_curl + c_time * ops.ppe_flux;
    lhs.bottomRightCorner(np, np) = ops.ppe_laplacian;

    Eigen::VectorXd rhs(nv + np);
    rhs.head(nv) = c_hist * (ops.mass * hist + hist_amp * ops.lift_mass) -
                   rho * u_new * (ops.conv_lift_trans * state.beta) -
                   rho * u_cur * u_new * ops.conv_lift_both +
                   2.0 * mu * u_new * ops.lift_diffusion - c_time * u_new * ops.lift_mass;
    rhs.tail(np) = c_hist * (ops.ppe_flux * hist + hist_amp * ops.ppe_flux_lift) -
                   rho * u_new * (ops.ppe_conv_lift_trans * state.beta) -
                   rho * u_cur * u_new * ops.ppe_conv_lift_both +
                   2.0 * mu * u_new * ops.ppe_curl_lift - c_time * u_new * ops.ppe_flux_lift;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) {
        Eigen::FullPivLU<Eigen::MatrixXd> full(lhs);
        if (!full.isInvertible())
            throw std::runtime_error("rom_step: singular reduced system, rank " +
                                     std::to_string(full.rank()) + " of " +
                                     std::to_string(nv + np));
        sol = full.solve(rhs);
    }
    const Eigen::VectorXd beta_new = sol.head(nv);
    const Eigen::VectorXd gamma_new = sol.tail(np);
    info.div_residual = (np > 0) ? (ops.divergence * beta_new).norm() : 0.0;

    // Filter solve with the delta-contracted tensor.
    Eigen::MatrixXd filt = ops.mass;
    Eigen::VectorXd filt_rhs = ops.mass * beta_new;
    if (na > 0 && params.alpha != 0.0) {
        const double alpha2 = params.alpha * params.alpha;
        for (int j = 0; j < na; ++j) filt -= alpha2 * delta[j] * ops.filter[j];
        filt_rhs += alpha2 * u_new * (ops.filter_lift * delta);
    }
    const Eigen::VectorXd beta_bar_new = filt.partialPivLu().solve(filt_rhs);
    if (!beta_bar_new.allFinite()) throw std::runtime_error("rom_step: filter solve failed");

    state.beta_prev = state.beta;
    state.beta = beta_new;
    state.beta_bar_prev = state.beta_bar;
    state.beta_bar = beta_bar_new;
    state.gamma = gamma_new;
    state.amp_prev = state.amp;
    state.amp = u_new;
    state.time = t_new;
    state.step += 1;
    return info;
}

void reconstruct(const PodBasis& basis_v, const PodBasis& basis_p, const LiftingFunction& lifting,
                 const RomState& state, double chi_weight, Field& u_out, Field& p_out) {
    const Eigen::VectorXd mix = (1.0 - chi_weight) * state.beta + chi_weight * state.beta_bar;
    u_out = Field(FieldKind::Vector, lifting.control_field.n_cells());
    u_out.data() = lifting.amplitude(state.time) * lifting.control_field.data();
    for (int i = 0; i < basis_v.n_modes(); ++i)
        u_out.data() += mix[i] * basis_v.modes[i].data();
    p_out = Field(FieldKind::Scalar, lifting.control_field.n_cells());
    for (int i = 0; i < basis_p.n_modes(); ++i)
        p_out.data() += state.gamma[i] * basis_p.modes[i].data();
}

}  // namespace efr
