// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>

#include "efr/fv.hpp"

namespace efr {

/// Physical and algorithmic parameters of the evolve-filter-relax scheme.
struct EfrParams {
    double rho = 1.0;
    double mu = 1e-3;
    double dt = 1e-3;
    double alpha = 0.0;  ///< filter radius
    double chi = 1.0;    ///< relaxation weight in (0, 1]
    int picard_max_iters = 250;
    double picard_tol = 1e-10;
};

/// Time-stepping state. `v` is the previous intermediate (pre-filter)
/// velocity that supplies the convecting flux; `u`/`u_prev` are the relaxed
/// end-of-step velocities entering the BDF2 history.
struct FomState {
    double time = 0.0;
    long step = 0;
    Field u_prev, u, v, p, a, v_bar;
};

FomState make_rest_state(const CartesianMesh& mesh, double t0 = 0.0);

struct StepDiagnostics {
    double cfl = 0.0;
    double max_continuity_residual = 0.0;  ///< max_c |sum_f F_f| / V after the solve
    double indicator_min = 0.0;
    double indicator_max = 0.0;
};

/// Caches factorizations and assembly stencils tied to one mesh.
class FomWorkspace {
public:
    explicit FomWorkspace(const CartesianMesh& mesh);
    ~FomWorkspace();
    FomWorkspace(const FomWorkspace&) = delete;
    FomWorkspace& operator=(const FomWorkspace&) = delete;

    struct Impl;
    Impl& impl() { return *impl_; }

private:
    std::unique_ptr<Impl> impl_;
};

/// One BDF2 evolve solve: convecting flux frozen at `state.v` (boundary data
/// at the old time), unknown velocity/pressure at the new time. Returns the
/// intermediate velocity and pressure; `diag` (optional) receives the
/// post-solve continuity residual.
void evolve_step(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                 const FomState& state, const VelocityBc& bc_old, const VelocityBc& bc_new,
                 Field& v_out, Field& p_out, StepDiagnostics* diag = nullptr);

/// Linear Helmholtz filter: (I - alpha^2 Lap) w = v with the Dirichlet data
/// of `bc` on inflow/walls/obstacle and zero gradient at the outflow.
/// alpha = 0 returns the input unchanged.
Field helmholtz_filter(FomWorkspace& ws, const CartesianMesh& mesh, double alpha, const Field& v,
                       const VelocityBc& bc);

/// Deconvolution-based indicator a(v) = |v - F(v)| (pointwise magnitude).
Field indicator_field(FomWorkspace& ws, const CartesianMesh& mesh, double alpha, const Field& v,
                      const VelocityBc& bc);

/// Nonlinear differential filter: (I - alpha^2 div(a grad)) w = v, same
/// boundary data as the Helmholtz filter. A vanishing indicator returns the
/// input unchanged.
Field nonlinear_filter(FomWorkspace& ws, const CartesianMesh& mesh, double alpha, const Field& a,
                       const Field& v, const VelocityBc& bc);

/// Relax step u = (1 - chi) v + chi w.
Field relax(const Field& v, const Field& w, double chi);

/// Full evolve -> filter -> relax step; advances `state` by params.dt.
StepDiagnostics efr_step(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                         const std::function<double(double)>& inflow_shape,
                         const std::function<double(double)>& inflow_amplitude, FomState& state);

/// Steady Stokes solve (no convection) with the given boundary data; used to
/// build the lifting field.
void solve_stokes(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                  const VelocityBc& bc, Field& v_out, Field& p_out);

/// Steady Navier-Stokes solve via Picard iteration on the convecting flux.
/// Throws std::runtime_error if the iteration cap is hit.
void solve_steady(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                  const VelocityBc& bc, Field& v_out, Field& p_out, int* iters = nullptr);

/// Convective CFL number dt * max_c |v_c| / min(dx, dy).
double cfl_number(const CartesianMesh& mesh, const Field& v, double dt);

/// Force exerted by the fluid on the obstacle: per obstacle face
/// area * (p_own n + 2 mu u_own / d), n the fluid-to-obstacle unit normal.
Eigen::Vector2d obstacle_force(const CartesianMesh& mesh, const EfrParams& params, const Field& u,
                               const Field& p);

/// Drag and lift coefficients 2 F / (rho Uref^2 Lref).
std::pair<double, double> drag_lift_coefficients(const CartesianMesh& mesh,
                                                 const EfrParams& params, const Field& u,
                                                 const Field& p, double u_ref = 1.0,
                                                 double l_ref = 0.1);

}  // namespace efr
