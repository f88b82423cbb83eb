// SPDX-License-Identifier: Apache-2.0

#include "efr/fv.hpp"

namespace efr {

Eigen::Vector2d velocity_face_value(const CartesianMesh& mesh, int face, const Field& v,
                                    const VelocityBc& bc) {
    const FaceRecord& f = mesh.faces[face];
    if (f.neighbor >= 0) return 0.5 * (v.vec(f.owner) + v.vec(f.neighbor));
    if (f.tag == FaceTag::Outflow) return v.vec(f.owner);
    const auto d = bc.dirichlet(f);
    return {d[0], d[1]};
}

double pressure_face_value(const CartesianMesh& mesh, int face, const Field& p) {
    const FaceRecord& f = mesh.faces[face];
    if (f.neighbor >= 0) return 0.5 * (p.s(f.owner) + p.s(f.neighbor));
    if (f.tag == FaceTag::Outflow) return 0.0;
    return p.s(f.owner);
}

double face_mass_flux(const CartesianMesh& mesh, int face, const Field& v, const VelocityBc& bc) {
    const FaceRecord& f = mesh.faces[face];
    const Eigen::Vector2d vf = velocity_face_value(mesh, face, v, bc);
    return vf[0] * f.area_vector[0] + vf[1] * f.area_vector[1];
}

Field gauss_gradient_pressure(const CartesianMesh& mesh, const Field& p) {
    Field g(FieldKind::Vector, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double pf = pressure_face_value(mesh, fi, p);
        g.x(f.owner) += pf * f.area_vector[0] * inv_vol;
        g.y(f.owner) += pf * f.area_vector[1] * inv_vol;
        if (f.neighbor >= 0) {
            g.x(f.neighbor) -= pf * f.area_vector[0] * inv_vol;
            g.y(f.neighbor) -= pf * f.area_vector[1] * inv_vol;
        }
    }
    return g;
}

GradientTensor gauss_gradient_velocity(const CartesianMesh& mesh, const Field& v,
                                       const VelocityBc& bc) {
    GradientTensor g;
    g.data = Eigen::VectorXd::Zero(4 * mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const Eigen::Vector2d vf = velocity_face_value(mesh, fi, v, bc);
        for (int comp = 0; comp < 2; ++comp) {
            for (int dir = 0; dir < 2; ++dir) {
                const double contrib = vf[comp] * f.area_vector[dir] * inv_vol;
                g.data[4 * f.owner + 2 * comp + dir] += contrib;
                if (f.neighbor >= 0) g.data[4 * f.neighbor + 2 * comp + dir] -= contrib;
            }
        }
    }
    return g;
}

Field curl_z(const CartesianMesh& mesh, const Field& v, const VelocityBc& bc) {
    const GradientTensor g = gauss_gradient_velocity(mesh, v, bc);
    Field w(FieldKind::Scalar, mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c) w.s(c) = g.dyx(c) - g.dxy(c);
    return w;
}

Field divergence_fv(const CartesianMesh& mesh, const Field& v, const VelocityBc& bc) {
    Field div(FieldKind::Scalar, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double flux = face_mass_flux(mesh, fi, v, bc);
        div.s(f.owner) += flux * inv_vol;
        if (f.neighbor >= 0) div.s(f.neighbor) -= flux * inv_vol;
    }
    return div;
}

Field apply_laplacian_velocity(const CartesianMesh& mesh, const Field& v, const VelocityBc& bc) {
    Field lap(FieldKind::Vector, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double coef = f.area / f.dist * inv_vol;
        if (f.neighbor >= 0) {
            for (int comp = 0; comp < 2; ++comp) {
                const double diff = v.data()[2 * f.neighbor + comp] - v.data()[2 * f.owner + comp];
                lap.data()[2 * f.owner + comp] += coef * diff;
                lap.data()[2 * f.neighbor + comp] -= coef * diff;
            }
        } else if (f.tag != FaceTag::Outflow) {
            const auto d = bc.dirichlet(f);
            for (int comp = 0; comp < 2; ++comp)
                lap.data()[2 * f.owner + comp] += coef * (d[comp] - v.data()[2 * f.owner + comp]);
        }
    }
    return lap;
}

Field apply_laplacian_pressure(const CartesianMesh& mesh, const Field& psi) {
    Field lap(FieldKind::Scalar, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double coef = f.area / f.dist * inv_vol;
        if (f.neighbor >= 0) {
            const double diff = psi.s(f.neighbor) - psi.s(f.owner);
            lap.s(f.owner) += coef * diff;
            lap.s(f.neighbor) -= coef * diff;
        } else if (f.tag == FaceTag::Outflow) {
            lap.s(f.owner) += coef * (0.0 - psi.s(f.owner));
        }
    }
    return lap;
}

Field apply_convection(const CartesianMesh& mesh, const Field& flux_v, const VelocityBc& flux_bc,
                       const Field& w, const VelocityBc& w_bc) {
    Field conv(FieldKind::Vector, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double flux = face_mass_flux(mesh, fi, flux_v, flux_bc);
        const Eigen::Vector2d wf = velocity_face_value(mesh, fi, w, w_bc);
        for (int comp = 0; comp < 2; ++comp) {
            const double contrib = flux * wf[comp] * inv_vol;
            conv.data()[2 * f.owner + comp] += contrib;
            if (f.neighbor >= 0) conv.data()[2 * f.neighbor + comp] -= contrib;
        }
    }
    return conv;
}

Field apply_coeff_laplacian(const CartesianMesh& mesh, const Field& coeff, const Field& v,
                            const VelocityBc& bc) {
    Field lap(FieldKind::Vector, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double af = (f.neighbor >= 0) ? 0.5 * (coeff.s(f.owner) + coeff.s(f.neighbor))
                                            : coeff.s(f.owner);
        const double coef = af * f.area / f.dist * inv_vol;
        if (f.neighbor >= 0) {
            for (int comp = 0; comp < 2; ++comp) {
                const double diff = v.data()[2 * f.neighbor + comp] - v.data()[2 * f.owner + comp];
                lap.data()[2 * f.owner + comp] += coef * diff;
                lap.data()[2 * f.neighbor + comp] -= coef * diff;
            }
        } else if (f.tag != FaceTag::Outflow) {
            const auto d = bc.dirichlet(f);
            for (int comp = 0; comp < 2; ++comp)
                lap.data()[2 * f.owner + comp] += coef * (d[comp] - v.data()[2 * f.owner + comp]);
        }
    }
    return lap;
}

}  // namespace efr
