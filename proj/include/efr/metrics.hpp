// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "efr/field.hpp"

namespace efr {

/// ||fom - rom|| / ||fom|| in the volume-weighted L2 norm.
/// Throws std::invalid_argument on a zero-norm reference.
double relative_l2_error(const CartesianMesh& mesh, const Field& fom_field,
                         const Field& rom_field);

/// Relative L2(window) distance between two coefficient series sampled on a
/// common time grid, integrated with the trapezoidal rule.
double lift_error(const std::vector<double>& times, const std::vector<double>& fom_series,
                  const std::vector<double>& rom_series, double window_begin, double window_end);

/// Cell divergence from central face interpolation; boundary-face values are
/// linearly extrapolated from the two cells nearest the face (exact for
/// fields linear in space), falling back to the owner value where no second
/// cell exists.
Field divergence_gauss_extrapolated(const CartesianMesh& mesh, const Field& v);

/// Domain-averaged divergence (signed); callers report its magnitude.
double mass_error_volume(const CartesianMesh& mesh, const Field& v);

/// Signed flow-rate defect (Q - Q_ref)/Q_ref, Q summed over the vertical face
/// column nearest x_location (no-slip boundary faces contribute zero).
double mass_error_flowrate(const CartesianMesh& mesh, const Field& v, double x_location,
                           double exact_flowrate);

}  // namespace efr
