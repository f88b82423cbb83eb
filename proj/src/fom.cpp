// SPDX-License-Identifier: Apache-2.0

#include "efr/fom.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace efr {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

namespace {

struct GradEntry {
    int cell;
    double gx, gy;
};

enum class SolveMode { Unsteady, SteadyStokes, SteadyNs };

}  // namespace

struct FomWorkspace::Impl {
    const CartesianMesh& mesh;
    // Per-cell Gauss pressure-gradient stencils (boundary traces folded in).
    std::vector<std::vector<GradEntry>> grad_stencil;

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> coupled_lu;
    bool coupled_analyzed = false;

    Eigen::SimplicialLDLT<SpMat> helm_ldlt;
    double helm_alpha = -1.0;

    Eigen::SimplicialLDLT<SpMat> nl_ldlt;
    bool nl_analyzed = false;

    explicit Impl(const CartesianMesh& m) : mesh(m) { build_grad_stencils(); }

    void build_grad_stencils() {
        const int n = mesh.n_cells();
        const double inv_vol = 1.0 / mesh.cell_volume();
        grad_stencil.assign(n, {});
        for (int c = 0; c < n; ++c) {
            std::vector<GradEntry>& st = grad_stencil[c];
            auto add = [&st](int cell, double gx, double gy) {
                for (GradEntry& e : st) {
                    if (e.cell == cell) {
                        e.gx += gx;
                        e.gy += gy;
                        return;
                    }
                }
                st.push_back({cell, gx, gy});
            };
            for (int fi : mesh.cell_faces[c]) {
                const FaceRecord& f = mesh.faces[fi];
                const auto area = mesh.outward_area(fi, c);
                const double ax = area[0] * inv_vol, ay = area[1] * inv_vol;
                if (f.neighbor >= 0) {
                    add(f.owner, 0.5 * ax, 0.5 * ay);
                    add(f.neighbor, 0.5 * ax, 0.5 * ay);
                } else if (f.tag != FaceTag::Outflow) {
                    add(c, ax, ay);
                }  // outflow: face value 0, no entry
            }
        }
    }
};

FomWorkspace::FomWorkspace(const CartesianMesh& mesh) : impl_(std::make_unique<Impl>(mesh)) {}
FomWorkspace::~FomWorkspace() = default;

FomState make_rest_state(const CartesianMesh& mesh, double t0) {
    FomState s;
    s.time = t0;
    s.step = 0;
    s.u_prev = Field::vector(mesh);
    s.u = Field::vector(mesh);
    s.v = Field::vector(mesh);
    s.p = Field::scalar(mesh);
    s.a = Field::scalar(mesh);
    s.v_bar = Field::vector(mesh);
    return s;
}

namespace {

/// Assembles and solves the coupled momentum + continuity system. Continuity
/// uses face fluxes with a pressure-stabilizing correction
///   F_f = v_f . A - D_f ((p_N - p_O) |A| / d - g_f . A),
/// g the central interpolation of cell Gauss pressure gradients; D_f is
/// 2 dt / (3 rho) in time-dependent solves and the inverse momentum diagonal
/// in steady ones. Velocity-Dirichlet faces carry their exact flux.
void solve_coupled(FomWorkspace::Impl& impl, const CartesianMesh& mesh, const EfrParams& params,
                   SolveMode mode, const Field* flux_v, const VelocityBc& flux_bc,
                   const VelocityBc& bc_new, const Eigen::VectorXd* mom_rhs, Field& v_out,
                   Field& p_out, double* max_residual) {
    const int n = mesh.n_cells();
    const double vol = mesh.cell_volume();
    const double rho = params.rho, mu = params.mu;
    const bool unsteady = (mode == SolveMode::Unsteady);
    const double a_time = unsteady ? 3.0 * rho * vol / (2.0 * params.dt) : 0.0;

    auto col_u = [n](int comp, int c) { return comp * n + c; };
    auto col_p = [n](int c) { return 2 * n + c; };

    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(60) * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * n);

    // Momentum diagonal accumulator; defines D_f for steady solves.
    std::vector<double> a_diag(n, a_time);

    for (int c = 0; c < n; ++c) {
        trips.emplace_back(col_u(0, c), col_u(0, c), a_time);
        trips.emplace_back(col_u(1, c), col_u(1, c), a_time);
        if (mom_rhs) {
            rhs[col_u(0, c)] += (*mom_rhs)[2 * c];
            rhs[col_u(1, c)] += (*mom_rhs)[2 * c + 1];
        }
    }

    // Momentum rows, face by face. Convection slots are always emitted (zero
    // flux in Stokes mode) so the sparsity pattern is solve-mode independent.
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const int O = f.owner, Nb = f.neighbor;
        const double kdiff = 2.0 * mu * f.area / f.dist;
        const double phi =
            (mode == SolveMode::SteadyStokes) ? 0.0 : rho * face_mass_flux(mesh, fi, *flux_v, flux_bc);

        if (Nb >= 0) {
            for (int comp = 0; comp < 2; ++comp) {
                const int rO = col_u(comp, O), rN = col_u(comp, Nb);
                trips.emplace_back(rO, rO, kdiff + 0.5 * phi);
                trips.emplace_back(rO, rN, -kdiff + 0.5 * phi);
                trips.emplace_back(rN, rN, kdiff - 0.5 * phi);
                trips.emplace_back(rN, rO, -kdiff - 0.5 * phi);
            }
            a_diag[O] += kdiff + 0.5 * phi;
            a_diag[Nb] += kdiff - 0.5 * phi;
            for (int dir = 0; dir < 2; ++dir) {
                const double cgrad = 0.5 * f.area_vector[dir];
                trips.emplace_back(col_u(dir, O), col_p(O), cgrad);
                trips.emplace_back(col_u(dir, O), col_p(Nb), cgrad);
                trips.emplace_back(col_u(dir, Nb), col_p(O), -cgrad);
                trips.emplace_back(col_u(dir, Nb), col_p(Nb), -cgrad);
            }
        } else if (f.tag == FaceTag::Outflow) {
            for (int comp = 0; comp < 2; ++comp)
                trips.emplace_back(col_u(comp, O), col_u(comp, O), phi);
            a_diag[O] += phi;
            // zero-gradient velocity: no diffusive flux; pressure face value 0
        } else {
            const auto vb = bc_new.dirichlet(f);
            for (int comp = 0; comp < 2; ++comp) {
                const int rO = col_u(comp, O);
                trips.emplace_back(rO, rO, kdiff);
                rhs[rO] += kdiff * vb[comp] - phi * vb[comp];
            }
            a_diag[O] += kdiff;
            for (int dir = 0; dir < 2; ++dir)
                trips.emplace_back(col_u(dir, O), col_p(O), f.area_vector[dir]);
        }
    }

    // Face stabilization coefficients.
    std::vector<double> d_face(mesh.n_faces(), 0.0);
    const double d_unsteady = 2.0 * params.dt / (3.0 * rho);
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (unsteady) {
            d_face[fi] = d_unsteady;
        } else if (f.neighbor >= 0) {
            d_face[fi] = 0.5 * (vol / a_diag[f.owner] + vol / a_diag[f.neighbor]);
        } else {
            d_face[fi] = vol / a_diag[f.owner];
        }
    }

    // Continuity rows.
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const int O = f.owner, Nb = f.neighbor;
        const int rO = 2 * n + O;
        const double ax = f.area_vector[0], ay = f.area_vector[1];
        const double D = d_face[fi];
        if (Nb >= 0) {
            const int rN = 2 * n + Nb;
            for (int comp = 0; comp < 2; ++comp) {
                const double a_comp = f.area_vector[comp];
                trips.emplace_back(rO, col_u(comp, O), 0.5 * a_comp);
                trips.emplace_back(rO, col_u(comp, Nb), 0.5 * a_comp);
                trips.emplace_back(rN, col_u(comp, O), -0.5 * a_comp);
                trips.emplace_back(rN, col_u(comp, Nb), -0.5 * a_comp);
            }
            const double ktp = D * f.area / f.dist;
            trips.emplace_back(rO, col_p(O), ktp);
            trips.emplace_back(rO, col_p(Nb), -ktp);
            trips.emplace_back(rN, col_p(Nb), ktp);
            trips.emplace_back(rN, col_p(O), -ktp);
            for (const GradEntry& e : impl.grad_stencil[O]) {
                const double cg = D * 0.5 * (e.gx * ax + e.gy * ay);
                trips.emplace_back(rO, col_p(e.cell), cg);
                trips.emplace_back(rN, col_p(e.cell), -cg);
            }
            for (const GradEntry& e : impl.grad_stencil[Nb]) {
                const double cg = D * 0.5 * (e.gx * ax + e.gy * ay);
                trips.emplace_back(rO, col_p(e.cell), cg);
                trips.emplace_back(rN, col_p(e.cell), -cg);
            }
        } else if (f.tag == FaceTag::Outflow) {
            for (int comp = 0; comp < 2; ++comp)
                trips.emplace_back(rO, col_u(comp, O), f.area_vector[comp]);
            trips.emplace_back(rO, col_p(O), D * f.area / f.dist);
            for (const GradEntry& e : impl.grad_stencil[O])
                trips.emplace_back(rO, col_p(e.cell), D * (e.gx * ax + e.gy * ay));
        } else {
            const auto vb = bc_new.dirichlet(f);
            rhs[rO] -= vb[0] * ax + vb[1] * ay;
        }
    }

    SpMat A(3 * n, 3 * n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    if (!impl.coupled_analyzed) {
        impl.coupled_lu.analyzePattern(A);
        impl.coupled_analyzed = true;
    }
    impl.coupled_lu.factorize(A);
    if (impl.coupled_lu.info() != Eigen::Success)
        throw std::runtime_error("coupled solve: factorization failed");
    const Eigen::VectorXd sol = impl.coupled_lu.solve(rhs);
    if (impl.coupled_lu.info() != Eigen::Success)
        throw std::runtime_error("coupled solve: back substitution failed");

    v_out = Field(FieldKind::Vector, n);
    p_out = Field(FieldKind::Scalar, n);
    for (int c = 0; c < n; ++c) {
        v_out.x(c) = sol[c];
        v_out.y(c) = sol[n + c];
        p_out.s(c) = sol[2 * n + c];
    }

    if (max_residual) {
        // Recompute the continuity fluxes with the solved fields.
        Field g = gauss_gradient_pressure(mesh, p_out);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (int fi = 0; fi < mesh.n_faces(); ++fi) {
            const FaceRecord& f = mesh.faces[fi];
            double flux;
            if (f.neighbor >= 0) {
                const Eigen::Vector2d vf = 0.5 * (v_out.vec(f.owner) + v_out.vec(f.neighbor));
                const Eigen::Vector2d gf = 0.5 * (g.vec(f.owner) + g.vec(f.neighbor));
                flux = vf[0] * f.area_vector[0] + vf[1] * f.area_vector[1];
                flux -= d_face[fi] * ((p_out.s(f.neighbor) - p_out.s(f.owner)) * f.area / f.dist -
                                      (gf[0] * f.area_vector[0] + gf[1] * f.area_vector[1]));
            } else if (f.tag == FaceTag::Outflow) {
                const Eigen::Vector2d vf = v_out.vec(f.owner);
                flux = vf[0] * f.area_vector[0] + vf[1] * f.area_vector[1];
                flux -= d_face[fi] * ((0.0 - p_out.s(f.owner)) * f.area / f.dist -
                                      (g.x(f.owner) * f.area_vector[0] + g.y(f.owner) * f.area_vector[1]));
            } else {
                const auto vb = bc_new.dirichlet(f);
                flux = vb[0] * f.area_vector[0] + vb[1] * f.area_vector[1];
            }
            acc[f.owner] += flux;
            if (f.neighbor >= 0) acc[f.neighbor] -= flux;
        }
        *max_residual = acc.cwiseAbs().maxCoeff() / vol;
    }
}

}  // namespace

void evolve_step(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                 const FomState& state, const VelocityBc& bc_old, const VelocityBc& bc_new,
                 Field& v_out, Field& p_out, StepDiagnostics* diag) {
    const int n = mesh.n_cells();
    Eigen::VectorXd mom_rhs(2 * n);
    const double c_hist = params.rho * mesh.cell_volume() / (2.0 * params.dt);
    for (int c = 0; c < n; ++c) {
        mom_rhs[2 * c] = c_hist * (4.0 * state.u.x(c) - state.u_prev.x(c));
        mom_rhs[2 * c + 1] = c_hist * (4.0 * state.u.y(c) - state.u_prev.y(c));
    }
    double residual = 0.0;
    solve_coupled(ws.impl(), mesh, params, SolveMode::Unsteady, &state.v, bc_old, bc_new, &mom_rhs,
                  v_out, p_out, diag ? &residual : nullptr);
    if (diag) diag->max_continuity_residual = residual;
}

namespace {

/// Scalar Helmholtz-type matrix V I + alpha^2 L(coeff) with Dirichlet data on
/// inflow/wall/obstacle faces and zero flux through the outflow.
SpMat filter_matrix(const CartesianMesh& mesh, double alpha2, const Field* coeff) {
    const int n = mesh.n_cells();
    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(5) * n);
    const double vol = mesh.cell_volume();
    for (int c = 0; c < n; ++c) trips.emplace_back(c, c, vol);
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (f.neighbor < 0 && f.tag == FaceTag::Outflow) continue;
        double af = 1.0;
        if (coeff)
            af = (f.neighbor >= 0) ? 0.5 * (coeff->s(f.owner) + coeff->s(f.neighbor))
                                   : coeff->s(f.owner);
        const double k = alpha2 * af * f.area / f.dist;
        if (f.neighbor >= 0) {
            trips.emplace_back(f.owner, f.owner, k);
            trips.emplace_back(f.neighbor, f.neighbor, k);
            trips.emplace_back(f.owner, f.neighbor, -k);
            trips.emplace_back(f.neighbor, f.owner, -k);
        } else {
            trips.emplace_back(f.owner, f.owner, k);
        }
    }
    SpMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

Field filter_solve(const CartesianMesh& mesh, Eigen::SimplicialLDLT<SpMat>& ldlt, double alpha2,
                   const Field* coeff, const Field& v, const VelocityBc& bc) {
    const int n = mesh.n_cells();
    Field out(FieldKind::Vector, n);
    const double vol = mesh.cell_volume();
    for (int comp = 0; comp < 2; ++comp) {
        Eigen::VectorXd rhs(n);
        for (int c = 0; c < n; ++c) rhs[c] = vol * v.data()[2 * c + comp];
        for (int fi = 0; fi < mesh.n_faces(); ++fi) {
            const FaceRecord& f = mesh.faces[fi];
            if (f.neighbor >= 0 || f.tag == FaceTag::Outflow) continue;
            double af = 1.0;
            if (coeff) af = coeff->s(f.owner);
            const auto vb = bc.dirichlet(f);
            rhs[f.owner] += alpha2 * af * f.area / f.dist * vb[comp];
        }
        const Eigen::VectorXd sol = ldlt.solve(rhs);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("filter solve failed");
        for (int c = 0; c < n; ++c) out.data()[2 * c + comp] = sol[c];
    }
    return out;
}

}  // namespace

Field helmholtz_filter(FomWorkspace& ws, const CartesianMesh& mesh, double alpha, const Field& v,
                       const VelocityBc& bc) {
    if (alpha == 0.0) return v;
    FomWorkspace::Impl& impl = ws.impl();
    const double alpha2 = alpha * alpha;
    if (impl.helm_alpha != alpha) {
        const SpMat M = filter_matrix(mesh, alpha2, nullptr);
        impl.helm_ldlt.compute(M);
        if (impl.helm_ldlt.info() != Eigen::Success)
            throw std::runtime_error("helmholtz filter: factorization failed");
        impl.helm_alpha = alpha;
    }
    return filter_solve(mesh, impl.helm_ldlt, alpha2, nullptr, v, bc);
}

Field indicator_field(FomWorkspace& ws, const CartesianMesh& mesh, double alpha, const Field& v,
                      const VelocityBc& bc) {
    const Field filtered = helmholtz_filter(ws, mesh, alpha, v, bc);
    Field a(FieldKind::Scalar, mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c)
        a.s(c) = std::hypot(v.x(c) - filtered.x(c), v.y(c) - filtered.y(c));
    return a;
}

Field nonlinear_filter(FomWorkspace& ws, const CartesianMesh& mesh, double alpha, const Field& a,
                       const Field& v, const VelocityBc& bc) {
    if (alpha == 0.0) return v;
    if (a.data().size() == 0 || a.data().cwiseAbs().maxCoeff() == 0.0) return v;
    FomWorkspace::Impl& impl = ws.impl();
    const double alpha2 = alpha * alpha;
    const SpMat M = filter_matrix(mesh, alpha2, &a);
    if (!impl.nl_analyzed) {
        impl.nl_ldlt.analyzePattern(M);
        impl.nl_analyzed = true;
    }
    impl.nl_ldlt.factorize(M);
    if (impl.nl_ldlt.info() != Eigen::Success)
        throw std::runtime_error("nonlinear filter: factorization failed");
    return filter_solve(mesh, impl.nl_ldlt, alpha2, &a, v, bc);
}

Field relax(const Field& v, const Field& w, double chi) {
    require_same_shape(v, w, "relax");
    if (chi == 0.0) return v;
    Field u = v;
    u.data() = (1.0 - chi) * v.data() + chi * w.data();
    return u;
}

StepDiagnostics efr_step(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                         const std::function<double(double)>& inflow_shape,
                         const std::function<double(double)>& inflow_amplitude, FomState& state) {
    const double t_new = state.time + params.dt;
    const VelocityBc bc_old{inflow_shape, inflow_amplitude(state.time)};
    const VelocityBc bc_new{inflow_shape, inflow_amplitude(t_new)};

    StepDiagnostics diag;
    Field v_new, p_new;
    evolve_step(ws, mesh, params, state, bc_old, bc_new, v_new, p_new, &diag);

    const Field a_new = indicator_field(ws, mesh, params.alpha, v_new, bc_new);
    const Field v_bar = nonlinear_filter(ws, mesh, params.alpha, a_new, v_new, bc_new);
    const Field u_new = relax(v_new, v_bar, params.chi);

    diag.cfl = cfl_number(mesh, v_new, params.dt);
    diag.indicator_min = a_new.data().minCoeff();
    diag.indicator_max = a_new.data().maxCoeff();

    state.u_prev = state.u;
    state.u = u_new;
    state.v = v_new;
    state.p = p_new;
    state.a = a_new;
    state.v_bar = v_bar;
    state.time = t_new;
    state.step += 1;
    return diag;
}

void solve_stokes(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                  const VelocityBc& bc, Field& v_out, Field& p_out) {
    const Field zero_flux = Field::vector(mesh);
    solve_coupled(ws.impl(), mesh, params, SolveMode::SteadyStokes, &zero_flux, bc, bc, nullptr,
                  v_out, p_out, nullptr);
}

void solve_steady(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                  const VelocityBc& bc, Field& v_out, Field& p_out, int* iters) {
    solve_stokes(ws, mesh, params, bc, v_out, p_out);
    for (int it = 1; it <= params.picard_max_iters; ++it) {
        Field v_next, p_next;
        solve_coupled(ws.impl(), mesh, params, SolveMode::SteadyNs, &v_out, bc, bc, nullptr,
                      v_next, p_next, nullptr);
        const double dv = (v_next.data() - v_out.data()).norm();
        const double scale = std::max(v_next.data().norm(), 1e-30);
        v_out = v_next;
        p_out = p_next;
        if (dv / scale < params.picard_tol) {
            if (iters) *iters = it;
            return;
        }
    }
    throw std::runtime_error("steady solve: Picard iteration cap reached");
}

double cfl_number(const CartesianMesh& mesh, const Field& v, double dt) {
    double vmax = 0.0;
    for (int c = 0; c < v.n_cells(); ++c)
        vmax = std::max(vmax, std::hypot(v.x(c), v.y(c)));
    return dt * vmax / std::min(mesh.dx, mesh.dy);
}

Eigen::Vector2d obstacle_force(const CartesianMesh& mesh, const EfrParams& params, const Field& u,
                               const Field& p) {
    Eigen::Vector2d force = Eigen::Vector2d::Zero();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (f.tag != FaceTag::Obstacle) continue;
        const int O = f.owner;
        force[0] += f.area * (p.s(O) * f.normal[0] + 2.0 * params.mu * u.x(O) / f.dist);
        force[1] += f.area * (p.s(O) * f.normal[1] + 2.0 * params.mu * u.y(O) / f.dist);
    }
    return force;
}

std::pair<double, double> drag_lift_coefficients(const CartesianMesh& mesh,
                                                 const EfrParams& params, const Field& u,
                                                 const Field& p, double u_ref, double l_ref) {
    if (!mesh.has_obstacle())
        throw std::invalid_argument("drag_lift_coefficients: mesh has no obstacle");
    const Eigen::Vector2d f = obstacle_force(mesh, params, u, p);
    const double denom = 0.5 * params.rho * u_ref * u_ref * l_ref;
    return {f[0] / denom, f[1] / denom};
}

}  // namespace efr
