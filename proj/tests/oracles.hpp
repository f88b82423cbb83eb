// SPDX-License-Identifier: Apache-2.0

// Brute-force reference computations for the test suites. Everything here is
// written as direct per-cell gather loops over raw mesh data, so none of the
// library's stencil or assembly code is exercised: a disagreement points at
// the implementation, not at a shared helper.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "efr/field.hpp"
#include "efr/mesh.hpp"

namespace oracle {

using efr::CartesianMesh;
using efr::FaceRecord;
using efr::FaceTag;
using efr::Field;

using Shape = std::function<double(double)>;

inline Shape zero_shape() {
    return [](double) { return 0.0; };
}

/// Face trace of a velocity-like field: central mean inside, owner value at
/// the outflow, Dirichlet data elsewhere (inflow profile, no-slip walls).
inline std::array<double, 2> face_velocity(const Field& v, const FaceRecord& f,
                                           const Shape& shape, double scale) {
    if (f.neighbor >= 0)
        return {0.5 * (v.x(f.owner) + v.x(f.neighbor)), 0.5 * (v.y(f.owner) + v.y(f.neighbor))};
    if (f.tag == FaceTag::Outflow) return {v.x(f.owner), v.y(f.owner)};
    if (f.tag == FaceTag::Inflow) return {scale * shape(f.centroid[1]), 0.0};
    return {0.0, 0.0};
}

/// Face trace of a pressure-like field: central mean inside, 0 at the
/// outflow, owner value elsewhere.
inline double face_pressure(const Field& p, const FaceRecord& f) {
    if (f.neighbor >= 0) return 0.5 * (p.s(f.owner) + p.s(f.neighbor));
    if (f.tag == FaceTag::Outflow) return 0.0;
    return p.s(f.owner);
}

/// Volume-weighted L2 inner product, accumulated cell by cell.
inline double inner(const CartesianMesh& mesh, const Field& a, const Field& b) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        if (a.kind() == efr::FieldKind::Vector)
            sum += a.x(c) * b.x(c) + a.y(c) * b.y(c);
        else
            sum += a.s(c) * b.s(c);
    }
    return sum * mesh.cell_volume();
}

inline Eigen::MatrixXd correlation(const CartesianMesh& mesh, const std::vector<Field>& cols) {
    const int ns = static_cast<int>(cols.size());
    Eigen::MatrixXd c(ns, ns);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) c(i, j) = inner(mesh, cols[i], cols[j]);
    return c;
}

/// Gauss divergence of one cell.
inline double divergence_cell(const CartesianMesh& mesh, int c, const Field& v,
                              const Shape& shape, double scale) {
    double sum = 0.0;
    for (int fi : mesh.cell_faces[c]) {
        const FaceRecord& f = mesh.faces[fi];
        const double s = (f.owner == c) ? 1.0 : -1.0;
        const auto vf = face_velocity(v, f, shape, scale);
        sum += s * (vf[0] * f.area_vector[0] + vf[1] * f.area_vector[1]);
    }
    return sum / mesh.cell_volume();
}

/// Gauss gradient of a pressure-like field at one cell.
inline std::array<double, 2> grad_pressure_cell(const CartesianMesh& mesh, int c,
                                                const Field& p) {
    std::array<double, 2> g{0.0, 0.0};
    for (int fi : mesh.cell_faces[c]) {
        const FaceRecord& f = mesh.faces[fi];
        const double s = (f.owner == c) ? 1.0 : -1.0;
        const double pf = face_pressure(p, f);
        g[0] += s * pf * f.area_vector[0];
        g[1] += s * pf * f.area_vector[1];
    }
    g[0] /= mesh.cell_volume();
    g[1] /= mesh.cell_volume();
    return g;
}

/// Gauss gradient tensor of a velocity-like field at one cell:
/// [dux/dx, dux/dy, duy/dx, duy/dy].
inline std::array<double, 4> grad_velocity_cell(const CartesianMesh& mesh, int c, const Field& v,
                                                const Shape& shape, double scale) {
    std::array<double, 4> g{0.0, 0.0, 0.0, 0.0};
    for (int fi : mesh.cell_faces[c]) {
        const FaceRecord& f = mesh.faces[fi];
        const double s = (f.owner == c) ? 1.0 : -1.0;
        const auto vf = face_velocity(v, f, shape, scale);
        for (int comp = 0; comp < 2; ++comp)
            for (int dir = 0; dir < 2; ++dir)
                g[2 * comp + dir] += s * vf[comp] * f.area_vector[dir];
    }
    for (double& x : g) x /= mesh.cell_volume();
    return g;
}

inline double curl_cell(const CartesianMesh& mesh, int c, const Field& v, const Shape& shape,
                        double scale) {
    const auto g = grad_velocity_cell(mesh, c, v, shape, scale);
    return g[2] - g[1];
}

/// Two-point Laplacian of a velocity-like field at one cell (no diffusive
/// flux through the outflow).
inline std::array<double, 2> laplacian_velocity_cell(const CartesianMesh& mesh, int c,
                                                     const Field& v, const Shape& shape,
                                                     double scale) {
    std::array<double, 2> lap{0.0, 0.0};
    for (int fi : mesh.cell_faces[c]) {
        const FaceRecord& f = mesh.faces[fi];
        const double coef = f.area / f.dist;
        if (f.neighbor >= 0) {
            const int o = (f.owner == c) ? f.neighbor : f.owner;
            lap[0] += coef * (v.x(o) - v.x(c));
            lap[1] += coef * (v.y(o) - v.y(c));
        } else if (f.tag != FaceTag::Outflow) {
            const auto d = face_velocity(v, f, shape, scale);
            lap[0] += coef * (d[0] - v.x(c));
            lap[1] += coef * (d[1] - v.y(c));
        }
    }
    lap[0] /= mesh.cell_volume();
    lap[1] /= mesh.cell_volume();
    return lap;
}

/// Variable-coefficient Laplacian div(a grad v) at one cell; the face
/// coefficient is the arithmetic mean (owner value on boundary faces).
inline std::array<double, 2> coeff_laplacian_cell(const CartesianMesh& mesh, int c,
                                                  const Field& a, const Field& v,
                                                  const Shape& shape, double scale) {
    std::array<double, 2> lap{0.0, 0.0};
    for (int fi : mesh.cell_faces[c]) {
        const FaceRecord& f = mesh.faces[fi];
        const double af =
            (f.neighbor >= 0) ? 0.5 * (a.s(f.owner) + a.s(f.neighbor)) : a.s(f.owner);
        const double coef = af * f.area / f.dist;
        if (f.neighbor >= 0) {
            const int o = (f.owner == c) ? f.neighbor : f.owner;
            lap[0] += coef * (v.x(o) - v.x(c));
            lap[1] += coef * (v.y(o) - v.y(c));
        } else if (f.tag != FaceTag::Outflow) {
            const auto d = face_velocity(v, f, shape, scale);
            lap[0] += coef * (d[0] - v.x(c));
            lap[1] += coef * (d[1] - v.y(c));
        }
    }
    lap[0] /= mesh.cell_volume();
    lap[1] /= mesh.cell_volume();
    return lap;
}

/// Convective term div(flux_v (x) w) at one cell, central fluxes.
inline std::array<double, 2> convection_cell(const CartesianMesh& mesh, int c,
                                             const Field& flux_v, const Shape& flux_shape,
                                             double flux_scale, const Field& w,
                                             const Shape& w_shape, double w_scale) {
    std::array<double, 2> conv{0.0, 0.0};
    for (int fi : mesh.cell_faces[c]) {
        const FaceRecord& f = mesh.faces[fi];
        const double s = (f.owner == c) ? 1.0 : -1.0;
        const auto uf = face_velocity(flux_v, f, flux_shape, flux_scale);
        const double flux = uf[0] * f.area_vector[0] + uf[1] * f.area_vector[1];
        const auto wf = face_velocity(w, f, w_shape, w_scale);
        conv[0] += s * flux * wf[0];
        conv[1] += s * flux * wf[1];
    }
    conv[0] /= mesh.cell_volume();
    conv[1] /= mesh.cell_volume();
    return conv;
}

/// A velocity-like described by the field plus its boundary data.
struct TracedField {
    const Field* field = nullptr;
    Shape shape = zero_shape();
    double scale = 0.0;
};

/// (test, div(flux (x) carried)) with a velocity or pressure-gradient test
/// function; `test_grad` switches between (phi_i, .) and (grad psi_i, .).
inline double convection_entry(const CartesianMesh& mesh, const Field& test, bool test_grad,
                               const TracedField& flux, const TracedField& carried) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto conv = convection_cell(mesh, c, *flux.field, flux.shape, flux.scale,
                                          *carried.field, carried.shape, carried.scale);
        if (test_grad) {
            const auto g = grad_pressure_cell(mesh, c, test);
            sum += g[0] * conv[0] + g[1] * conv[1];
        } else {
            sum += test.x(c) * conv[0] + test.y(c) * conv[1];
        }
    }
    return sum * mesh.cell_volume();
}

inline double diffusion_entry(const CartesianMesh& mesh, const Field& phi_i,
                              const TracedField& arg) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto lap = laplacian_velocity_cell(mesh, c, *arg.field, arg.shape, arg.scale);
        sum += phi_i.x(c) * lap[0] + phi_i.y(c) * lap[1];
    }
    return sum * mesh.cell_volume();
}

inline double filter_entry(const CartesianMesh& mesh, const Field& phi_i, const Field& eta_j,
                           const TracedField& arg) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto lap = coeff_laplacian_cell(mesh, c, eta_j, *arg.field, arg.shape, arg.scale);
        sum += phi_i.x(c) * lap[0] + phi_i.y(c) * lap[1];
    }
    return sum * mesh.cell_volume();
}

inline double grad_p_entry(const CartesianMesh& mesh, const Field& phi_i, const Field& psi_j) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto g = grad_pressure_cell(mesh, c, psi_j);
        sum += phi_i.x(c) * g[0] + phi_i.y(c) * g[1];
    }
    return sum * mesh.cell_volume();
}

inline double divergence_entry(const CartesianMesh& mesh, const Field& psi_i,
                               const TracedField& phi_j) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c)
        sum += psi_i.s(c) * divergence_cell(mesh, c, *phi_j.field, phi_j.shape, phi_j.scale);
    return sum * mesh.cell_volume();
}

inline double ppe_laplacian_entry(const CartesianMesh& mesh, const Field& psi_i,
                                  const Field& psi_j) {
    double sum = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto gi = grad_pressure_cell(mesh, c, psi_i);
        const auto gj = grad_pressure_cell(mesh, c, psi_j);
        sum += gi[0] * gj[0] + gi[1] * gj[1];
    }
    return sum * mesh.cell_volume();
}

/// Boundary integral (n x grad psi_i, curl arg), owner-cell gradients.
inline double ppe_curl_entry(const CartesianMesh& mesh, const Field& psi_i,
                             const TracedField& arg) {
    double sum = 0.0;
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (f.neighbor >= 0) continue;
        const auto g = grad_pressure_cell(mesh, f.owner, psi_i);
        const double tang = f.normal[0] * g[1] - f.normal[1] * g[0];
        const double curl = curl_cell(mesh, f.owner, *arg.field, arg.shape, arg.scale);
        sum += f.area * tang * curl;
    }
    return sum;
}

/// Boundary integral (psi_i, n . arg) with face traces on both factors.
inline double ppe_flux_entry(const CartesianMesh& mesh, const Field& psi_i,
                             const TracedField& arg) {
    double sum = 0.0;
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (f.neighbor >= 0) continue;
        const double trace = (f.tag == FaceTag::Outflow) ? 0.0 : psi_i.s(f.owner);
        const auto vf = face_velocity(*arg.field, f, arg.shape, arg.scale);
        sum += f.area * trace * (vf[0] * f.normal[0] + vf[1] * f.normal[1]);
    }
    return sum;
}

/// Dense Gaussian-kernel fit solved with full-pivot LU on the explicitly
/// assembled kernel matrix; mirrors only the documented contract (shared
/// kernel, sigma = sigma_factor * median spacing, Tikhonov shift
/// reg_scale * trace / n).
struct DenseRbf {
    Eigen::VectorXd centers;
    double sigma = 0.0;
    double lambda = 0.0;
    Eigen::MatrixXd weights;

    Eigen::VectorXd eval(double t) const {
        Eigen::VectorXd k(centers.size());
        for (Eigen::Index j = 0; j < centers.size(); ++j) {
            const double r = (t - centers[j]) / sigma;
            k[j] = std::exp(-r * r);
        }
        return weights * k;
    }
};

inline DenseRbf rbf_fit_dense(const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                              double sigma_factor, double reg_scale) {
    const Eigen::Index ns = times.size();
    std::vector<double> gaps;
    for (Eigen::Index j = 1; j < ns; ++j) gaps.push_back(times[j] - times[j - 1]);
    std::sort(gaps.begin(), gaps.end());
    const double median = gaps.size() % 2 == 1
                              ? gaps[gaps.size() / 2]
                              : 0.5 * (gaps[gaps.size() / 2 - 1] + gaps[gaps.size() / 2]);
    DenseRbf out;
    out.centers = times;
    out.sigma = sigma_factor * median;
    Eigen::MatrixXd kernel(ns, ns);
    for (Eigen::Index i = 0; i < ns; ++i)
        for (Eigen::Index j = 0; j < ns; ++j) {
            const double r = (times[i] - times[j]) / out.sigma;
            kernel(i, j) = std::exp(-r * r);
        }
    out.lambda = reg_scale * kernel.trace() / static_cast<double>(ns);
    kernel.diagonal().array() += out.lambda;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kernel);
    out.weights.resize(values.rows(), ns);
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        out.weights.row(i) = lu.solve(values.row(i).transpose()).transpose();
    return out;
}

}  // namespace oracle
