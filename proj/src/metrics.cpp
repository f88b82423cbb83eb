// SPDX-License-Identifier: Apache-2.0

#include "efr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace efr {

double relative_l2_error(const CartesianMesh& mesh, const Field& fom_field,
                         const Field& rom_field) {
    require_same_shape(fom_field, rom_field, "relative_l2_error");
    const double ref = l2_norm(mesh, fom_field);
    if (!(ref > 0.0)) throw std::invalid_argument("relative_l2_error: zero-norm reference");
    Field diff = fom_field;
    diff.data() -= rom_field.data();
    return l2_norm(mesh, diff) / ref;
}

double lift_error(const std::vector<double>& times, const std::vector<double>& fom_series,
                  const std::vector<double>& rom_series, double window_begin, double window_end) {
    if (times.size() != fom_series.size() || times.size() != rom_series.size())
        throw std::invalid_argument("lift_error: series length mismatch");
    std::vector<double> t, df, rf;
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= window_begin && times[k] <= window_end) {
            t.push_back(times[k]);
            df.push_back(fom_series[k]);
            rf.push_back(rom_series[k]);
        }
    }
    if (t.size() < 2) throw std::invalid_argument("lift_error: empty window");
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k + 1 < t.size(); ++k) {
        const double h = t[k + 1] - t[k];
        const double d0 = df[k] - rf[k], d1 = df[k + 1] - rf[k + 1];
        num += 0.5 * h * (d0 * d0 + d1 * d1);
        den += 0.5 * h * (df[k] * df[k] + df[k + 1] * df[k + 1]);
    }
    if (!(den > 0.0)) throw std::invalid_argument("lift_error: zero-norm reference series");
    return std::sqrt(num / den);
}

namespace {

/// Face value of one velocity component with linear extrapolation at
/// boundary faces: (3 f_own - f_inward) / 2 along the face normal.
double extrapolated_face_value(const CartesianMesh& mesh, const FaceRecord& f, const Field& v,
                               int comp) {
    if (f.neighbor >= 0)
        return 0.5 * (v.data()[2 * f.owner + comp] + v.data()[2 * f.neighbor + comp]);
    const int g = mesh.grid_of_cell[f.owner];
    int i = g % mesh.nx, j = g / mesh.nx;
    // Step one cell inward, away from the boundary face.
    if (f.normal[0] > 0.5) i -= 1;
    else if (f.normal[0] < -0.5) i += 1;
    else if (f.normal[1] > 0.5) j -= 1;
    else j += 1;
    int inner = -1;
    if (i >= 0 && i < mesh.nx && j >= 0 && j < mesh.ny)
        inner = mesh.cell_of_grid[i + static_cast<size_t>(mesh.nx) * j];
    const double own = v.data()[2 * f.owner + comp];
    if (inner < 0) return own;
    return 1.5 * own - 0.5 * v.data()[2 * inner + comp];
}

}  // namespace

Field divergence_gauss_extrapolated(const CartesianMesh& mesh, const Field& v) {
    if (v.kind() != FieldKind::Vector)
        throw std::invalid_argument("divergence: vector field required");
    Field div(FieldKind::Scalar, mesh.n_cells());
    const double inv_vol = 1.0 / mesh.cell_volume();
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const double vx = extrapolated_face_value(mesh, f, v, 0);
        const double vy = extrapolated_face_value(mesh, f, v, 1);
        const double flux = vx * f.area_vector[0] + vy * f.area_vector[1];
        div.s(f.owner) += flux * inv_vol;
        if (f.neighbor >= 0) div.s(f.neighbor) -= flux * inv_vol;
    }
    return div;
}

double mass_error_volume(const CartesianMesh& mesh, const Field& v) {
    const Field div = divergence_gauss_extrapolated(mesh, v);
    return div.data().sum() / mesh.n_cells();
}

double mass_error_flowrate(const CartesianMesh& mesh, const Field& v, double x_location,
                           double exact_flowrate) {
    if (x_location < 0.0 || x_location > mesh.length)
        throw std::invalid_argument("mass_error_flowrate: location outside domain");
    if (!(std::abs(exact_flowrate) > 0.0))
        throw std::invalid_argument("mass_error_flowrate: reference flow rate must be nonzero");
    // Snap to the nearest vertical face column.
    const int column = static_cast<int>(std::lround(x_location / mesh.dx));
    const double x_snap = column * mesh.dx;
    const double tol = 1e-9 * std::max(mesh.dx, 1.0);
    double q = 0.0;
    bool found = false;
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        if (std::abs(f.normal[0]) < 0.5) continue;  // x-normal faces only
        if (std::abs(f.centroid[0] - x_snap) > tol) continue;
        found = true;
        double vx;
        if (f.neighbor >= 0) {
            vx = 0.5 * (v.x(f.owner) + v.x(f.neighbor));
        } else if (f.tag == FaceTag::Wall || f.tag == FaceTag::Obstacle) {
            vx = 0.0;  // no-slip trace
        } else {
            vx = v.x(f.owner);
        }
        q += vx * f.area;
    }
    if (!found) throw std::invalid_argument("mass_error_flowrate: no faces at location");
    return (q - exact_flowrate) / exact_flowrate;
}

}  // namespace efr
