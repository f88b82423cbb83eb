// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>

#include "efr/mesh.hpp"

namespace efr {

/// Boundary data for the velocity. The inflow profile is
/// u(0, y, t) = scale * shape(y) in x, 0 in y; walls and the obstacle are
/// no-slip; the outflow is zero-gradient. Pressure is fixed to 0 on the
/// outflow and zero-gradient elsewhere.
struct VelocityBc {
    std::function<double(double)> inflow_shape;  ///< x-velocity profile over y
    double inflow_scale = 0.0;                   ///< time-dependent amplitude

    /// Dirichlet velocity on a boundary face (not valid for outflow faces).
    std::array<double, 2> dirichlet(const FaceRecord& face) const {
        if (face.tag == FaceTag::Inflow)
            return {inflow_scale * inflow_shape(face.centroid[1]), 0.0};
        return {0.0, 0.0};
    }
};

/// Parabolic profile with the given peak value, zero at y = 0 and y = height.
inline std::function<double(double)> parabolic_profile(double height, double peak) {
    return [height, peak](double y) { return 4.0 * peak * y * (height - y) / (height * height); };
}

/// Channel benchmark inflow shape: 6 y (H - y) / H^2 (unit mean, peak 1.5).
inline std::function<double(double)> channel_inflow_shape(double height) {
    return parabolic_profile(height, 1.5);
}

/// Channel benchmark inflow amplitude over one ramp period: sin(pi t / 8).
inline double channel_inflow_amplitude(double t) {
    return std::sin(M_PI * t / 8.0);
}

}  // namespace efr
