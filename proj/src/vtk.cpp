// SPDX-License-Identifier: Apache-2.0

#include "efr/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace efr {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace

void write_vtk(const std::filesystem::path& path, const CartesianMesh& mesh,
               const std::vector<std::pair<std::string, const Field*>>& fields) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());

    // Grid nodes shared by the active-cell quads, numbered in row-major order.
    const int nxn = mesh.nx + 1;
    const int nyn = mesh.ny + 1;
    std::vector<int> node_id(static_cast<size_t>(nxn) * nyn, -1);
    int n_nodes = 0;
    auto mark = [&](int i, int j) {
        int& id = node_id[i + static_cast<size_t>(nxn) * j];
        if (id < 0) id = n_nodes++;
    };
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const int g = mesh.grid_of_cell[c];
        const int i = g % mesh.nx, j = g / mesh.nx;
        mark(i, j);
        mark(i + 1, j);
        mark(i, j + 1);
        mark(i + 1, j + 1);
    }

    os << "# vtk DataFile Version 3.0\n";
    os << "channel fields\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << n_nodes << " double\n";
    for (int j = 0; j < nyn; ++j)
        for (int i = 0; i < nxn; ++i)
            if (node_id[i + static_cast<size_t>(nxn) * j] >= 0)
                os << fmt(i * mesh.dx) << " " << fmt(j * mesh.dy) << " 0\n";

    os << "CELLS " << mesh.n_cells() << " " << 5 * mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const int g = mesh.grid_of_cell[c];
        const int i = g % mesh.nx, j = g / mesh.nx;
        os << "4 " << node_id[i + static_cast<size_t>(nxn) * j] << " "
           << node_id[i + 1 + static_cast<size_t>(nxn) * j] << " "
           << node_id[i + 1 + static_cast<size_t>(nxn) * (j + 1)] << " "
           << node_id[i + static_cast<size_t>(nxn) * (j + 1)] << "\n";
    }
    os << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) os << "9\n";  // VTK_QUAD

    if (!fields.empty()) os << "CELL_DATA " << mesh.n_cells() << "\n";
    for (const auto& [name, field] : fields) {
        if (field->n_cells() != mesh.n_cells())
            throw std::invalid_argument("vtk: field '" + name + "' does not match the mesh");
        if (field->kind() == FieldKind::Scalar) {
            os << "SCALARS " << name << " double 1\n";
            os << "LOOKUP_TABLE default\n";
            for (int c = 0; c < mesh.n_cells(); ++c) os << fmt(field->s(c)) << "\n";
        } else {
            os << "VECTORS " << name << " double\n";
            for (int c = 0; c < mesh.n_cells(); ++c)
                os << fmt(field->x(c)) << " " << fmt(field->y(c)) << " 0\n";
        }
    }
    if (!os) throw std::runtime_error("short write: " + path.string());
}

}  // namespace efr
