// SPDX-License-Identifier: Apache-2.0

#include "efr/rom_offline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace efr {

namespace {

VelocityBc homogeneous_bc() {
    return VelocityBc{[](double) { return 0.0; }, 0.0};
}

/// Boundary tangential-gradient factor (n x grad psi)_z at a face, from the
/// owner-cell Gauss gradient of psi.
double boundary_tangential(const FaceRecord& f, const Field& grad_psi) {
    return f.normal[0] * grad_psi.y(f.owner) - f.normal[1] * grad_psi.x(f.owner);
}

double pressure_trace(const FaceRecord& f, const Field& psi) {
    return (f.tag == FaceTag::Outflow) ? 0.0 : psi.s(f.owner);
}

}  // namespace

ReducedOperators project_operators(const CartesianMesh& mesh, const PodBasis& basis_v,
                                   const PodBasis& basis_p, const PodBasis& basis_a,
                                   const LiftingFunction& lifting,
                                   const std::function<double(double)>& inflow_shape) {
    const int nv = basis_v.n_modes();
    const int np = basis_p.n_modes();
    const int na = basis_a.n_modes();
    if (nv == 0) throw std::invalid_argument("project_operators: empty velocity basis");
    for (const Field& m : basis_v.modes)
        if (m.n_cells() != mesh.n_cells())
            throw std::invalid_argument("project_operators: basis mesh mismatch");
    for (const Field& m : basis_p.modes)
        if (m.n_cells() != mesh.n_cells())
            throw std::invalid_argument("project_operators: basis mesh mismatch");
    for (const Field& m : basis_a.modes)
        if (m.n_cells() != mesh.n_cells())
            throw std::invalid_argument("project_operators: basis mesh mismatch");
    if (lifting.control_field.n_cells() != mesh.n_cells())
        throw std::invalid_argument("project_operators: lifting mesh mismatch");

    const VelocityBc hom = homogeneous_bc();
    const VelocityBc lift_bc{inflow_shape, 1.0};
    const Field& chi = lifting.control_field;

    ReducedOperators ops;
    ops.nv = nv;
    ops.np = np;
    ops.na = na;

    ops.mass.resize(nv, nv);
    ops.diffusion.resize(nv, nv);
    ops.grad_p.resize(nv, np);
    ops.divergence.resize(np, nv);
    ops.ppe_laplacian.resize(np, np);
    ops.ppe_curl.resize(np, nv);
    ops.ppe_flux.resize(np, nv);
    ops.lift_mass.resize(nv);
    ops.lift_diffusion.resize(nv);
    ops.conv_lift_flux.resize(nv, nv);
    ops.conv_lift_trans.resize(nv, nv);
    ops.conv_lift_both.resize(nv);
    ops.filter_lift.resize(nv, na);
    ops.ppe_conv_lift_flux.resize(np, nv);
    ops.ppe_conv_lift_trans.resize(np, nv);
    ops.ppe_conv_lift_both.resize(np);
    ops.ppe_curl_lift.resize(np);
    ops.ppe_flux_lift.resize(np);

    // Precomputed ingredients.
    std::vector<Field> grad_psi;
    grad_psi.reserve(np);
    for (int i = 0; i < np; ++i)
        grad_psi.push_back(gauss_gradient_pressure(mesh, basis_p.modes[i]));
    std::vector<Field> curl_phi;
    curl_phi.reserve(nv);
    for (int j = 0; j < nv; ++j) curl_phi.push_back(curl_z(mesh, basis_v.modes[j], hom));
    const Field curl_chi = curl_z(mesh, chi, lift_bc);

    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j)
            ops.mass(i, j) = l2_inner(mesh, basis_v.modes[i], basis_v.modes[j]);
        ops.lift_mass[i] = l2_inner(mesh, basis_v.modes[i], chi);
    }

    for (int j = 0; j < nv; ++j) {
        const Field lap = apply_laplacian_velocity(mesh, basis_v.modes[j], hom);
        for (int i = 0; i < nv; ++i) ops.diffusion(i, j) = l2_inner(mesh, basis_v.modes[i], lap);
    }
    {
        const Field lap_chi = apply_laplacian_velocity(mesh, chi, lift_bc);
        for (int i = 0; i < nv; ++i) ops.lift_diffusion[i] = l2_inner(mesh, basis_v.modes[i], lap_chi);
    }

    for (int j = 0; j < np; ++j)
        for (int i = 0; i < nv; ++i)
            ops.grad_p(i, j) = l2_inner(mesh, basis_v.modes[i], grad_psi[j]);

    for (int j = 0; j < nv; ++j) {
        const Field div = divergence_fv(mesh, basis_v.modes[j], hom);
        for (int i = 0; i < np; ++i) ops.divergence(i, j) = l2_inner(mesh, basis_p.modes[i], div);
    }

    for (int i = 0; i < np; ++i)
        for (int j = i; j < np; ++j) {
            const double val = l2_inner(mesh, grad_psi[i], grad_psi[j]);
            ops.ppe_laplacian(i, j) = val;
            ops.ppe_laplacian(j, i) = val;
        }

    // Volume convection tensors; the (j, k) pass covers both test families.
    ops.convection.assign(nv, Eigen::MatrixXd(nv, nv));
    ops.ppe_convection.assign(nv, Eigen::MatrixXd(np, nv));
    for (int j = 0; j < nv; ++j) {
        for (int k = 0; k < nv; ++k) {
            const Field conv =
                apply_convection(mesh, basis_v.modes[j], hom, basis_v.modes[k], hom);
            for (int i = 0; i < nv; ++i)
                ops.convection[j](i, k) = l2_inner(mesh, basis_v.modes[i], conv);
            for (int i = 0; i < np; ++i)
                ops.ppe_convection[j](i, k) = l2_inner(mesh, grad_psi[i], conv);
        }
        {
            const Field conv = apply_convection(mesh, basis_v.modes[j], hom, chi, lift_bc);
            for (int i = 0; i < nv; ++i)
                ops.conv_lift_trans(i, j) = l2_inner(mesh, basis_v.modes[i], conv);
            for (int i = 0; i < np; ++i)
                ops.ppe_conv_lift_trans(i, j) = l2_inner(mesh, grad_psi[i], conv);
        }
    }
    for (int k = 0; k < nv; ++k) {
        const Field conv = apply_convection(mesh, chi, lift_bc, basis_v.modes[k], hom);
        for (int i = 0; i < nv; ++i)
            ops.conv_lift_flux(i, k) = l2_inner(mesh, basis_v.modes[i], conv);
        for (int i = 0; i < np; ++i)
            ops.ppe_conv_lift_flux(i, k) = l2_inner(mesh, grad_psi[i], conv);
    }
    {
        const Field conv = apply_convection(mesh, chi, lift_bc, chi, lift_bc);
        for (int i = 0; i < nv; ++i)
            ops.conv_lift_both[i] = l2_inner(mesh, basis_v.modes[i], conv);
        for (int i = 0; i < np; ++i)
            ops.ppe_conv_lift_both[i] = l2_inner(mesh, grad_psi[i], conv);
    }

    // Indicator-filter tensors.
    ops.filter.assign(na, Eigen::MatrixXd(nv, nv));
    for (int j = 0; j < na; ++j) {
        for (int k = 0; k < nv; ++k) {
            const Field fld =
                apply_coeff_laplacian(mesh, basis_a.modes[j], basis_v.modes[k], hom);
            for (int i = 0; i < nv; ++i)
                ops.filter[j](i, k) = l2_inner(mesh, basis_v.modes[i], fld);
        }
        const Field fld = apply_coeff_laplacian(mesh, basis_a.modes[j], chi, lift_bc);
        for (int i = 0; i < nv; ++i) ops.filter_lift(i, j) = l2_inner(mesh, basis_v.modes[i], fld);
    }

    // Boundary operators, integrated over every boundary face.
    ops.ppe_curl.setZero();
    ops.ppe_flux.setZero();
    ops.ppe_curl_lift.setZero();
    ops.ppe_flux_lift.setZero();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (f.neighbor >= 0) continue;
        for (int i = 0; i < np; ++i) {
            const double tang = boundary_tangential(f, grad_psi[i]);
            const double trace = pressure_trace(f, basis_p.modes[i]);
            for (int j = 0; j < nv; ++j) {
                ops.ppe_curl(i, j) += f.area * tang * curl_phi[j].s(f.owner);
                const Eigen::Vector2d vf = velocity_face_value(mesh, fi, basis_v.modes[j], hom);
                ops.ppe_flux(i, j) +=
                    f.area * trace * (vf[0] * f.normal[0] + vf[1] * f.normal[1]);
            }
            ops.ppe_curl_lift[i] += f.area * tang * curl_chi.s(f.owner);
            const Eigen::Vector2d cf = velocity_face_value(mesh, fi, chi, lift_bc);
            ops.ppe_flux_lift[i] +=
                f.area * trace * (cf[0] * f.normal[0] + cf[1] * f.normal[1]);
        }
    }

    return ops;
}

Eigen::VectorXd RbfInterpolant::eval(double t, bool* extrapolated) const {
    const int ns = n_centers();
    if (extrapolated) {
        const double lo = centers[0] - widths[0];
        const double hi = centers[ns - 1] + widths[ns - 1];
        *extrapolated = (t < lo || t > hi);
    }
    Eigen::VectorXd kernel(ns);
    for (int j = 0; j < ns; ++j) {
        const double r = (t - centers[j]) / widths[j];
        kernel[j] = std::exp(-r * r);
    }
    return weights * kernel;
}

RbfInterpolant rbf_fit(const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                       double sigma_factor, double reg_scale) {
    const int ns = static_cast<int>(times.size());
    if (ns < 2) throw std::invalid_argument("rbf_fit: at least two nodes required");
    if (values.cols() != ns) throw std::invalid_argument("rbf_fit: value column count mismatch");
    std::vector<double> spacing(ns - 1);
    for (int k = 0; k + 1 < ns; ++k) {
        spacing[k] = times[k + 1] - times[k];
        if (!(spacing[k] > 0.0))
            throw std::invalid_argument("rbf_fit: times must be strictly increasing");
    }
    std::sort(spacing.begin(), spacing.end());
    const double median = (ns - 1) % 2 ? spacing[(ns - 1) / 2]
                                       : 0.5 * (spacing[(ns - 1) / 2 - 1] + spacing[(ns - 1) / 2]);
    const double sigma = sigma_factor * median;

    Eigen::MatrixXd kernel(ns, ns);
    for (int k = 0; k < ns; ++k)
        for (int j = 0; j < ns; ++j) {
            const double r = (times[k] - times[j]) / sigma;
            kernel(k, j) = std::exp(-r * r);
        }
    const double lambda = reg_scale * kernel.trace() / ns;
    kernel.diagonal().array() += lambda;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(kernel);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("rbf_fit: kernel system singular after regularization");

    RbfInterpolant interp;
    interp.centers = times;
    interp.widths = Eigen::VectorXd::Constant(ns, sigma);
    interp.weights = ldlt.solve(values.transpose()).transpose();
    interp.lambda = lambda;
    return interp;
}

}  // namespace efr
