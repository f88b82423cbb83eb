// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "efr/field.hpp"

namespace efr {

/// Legacy ASCII VTK export: one quad per active cell, each named field
/// attached as CELL_DATA (scalars stay scalars, vectors gain a zero z).
void write_vtk(const std::filesystem::path& path, const CartesianMesh& mesh,
               const std::vector<std::pair<std::string, const Field*>>& fields);

}  // namespace efr
