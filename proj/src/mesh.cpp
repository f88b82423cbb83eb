// SPDX-License-Identifier: Apache-2.0

#include "efr/mesh.hpp"

#include <cmath>
#include <cstring>
#include <ostream>

namespace efr {

const char* to_string(FaceTag tag) {
    switch (tag) {
        case FaceTag::Interior: return "interior";
        case FaceTag::Inflow: return "inflow";
        case FaceTag::Outflow: return "outflow";
        case FaceTag::Wall: return "wall";
        case FaceTag::Obstacle: return "obstacle";
    }
    return "unknown";
}

bool CartesianMesh::has_obstacle() const { return obstacle_halfwidth > 0.0; }

namespace {

void fnv1a_append(uint64_t& h, const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
}

void fnv1a_append_double(uint64_t& h, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    fnv1a_append(h, &bits, sizeof(bits));
}

}  // namespace

std::string CartesianMesh::geometry_hash() const {
    uint64_t h = 1469598103934665603ULL;
    const int64_t dims[2] = {nx, ny};
    fnv1a_append(h, dims, sizeof(dims));
    fnv1a_append_double(h, dx);
    fnv1a_append_double(h, dy);
    fnv1a_append_double(h, length);
    fnv1a_append_double(h, height);
    fnv1a_append_double(h, obstacle_center[0]);
    fnv1a_append_double(h, obstacle_center[1]);
    fnv1a_append_double(h, obstacle_halfwidth);
    if (!active_mask.empty())
        fnv1a_append(h, active_mask.data(), active_mask.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

CartesianMesh build_channel_mesh(double length, double height,
                                 std::array<double, 2> obstacle_center,
                                 double obstacle_halfwidth, int nx, int ny) {
    if (nx < 4 || ny < 4)
        throw std::invalid_argument("mesh: nx and ny must be at least 4");
    if (!(length > 0.0) || !(height > 0.0))
        throw std::invalid_argument("mesh: domain dimensions must be positive");
    if (obstacle_halfwidth < 0.0)
        throw std::invalid_argument("mesh: obstacle halfwidth must be non-negative");
    if (obstacle_halfwidth > 0.0) {
        const double cx = obstacle_center[0], cy = obstacle_center[1], hw = obstacle_halfwidth;
        if (cx - hw <= 0.0 || cx + hw >= length || cy - hw <= 0.0 || cy + hw >= height)
            throw std::invalid_argument("mesh: obstacle must lie strictly inside the channel");
    }

    CartesianMesh m;
    m.nx = nx;
    m.ny = ny;
    m.length = length;
    m.height = height;
    m.dx = length / nx;
    m.dy = height / ny;
    m.obstacle_center = obstacle_center;
    m.obstacle_halfwidth = obstacle_halfwidth;

    m.active_mask.assign(static_cast<size_t>(nx) * ny, 1);
    if (obstacle_halfwidth > 0.0) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double x = (i + 0.5) * m.dx;
                const double y = (j + 0.5) * m.dy;
                if (std::abs(x - obstacle_center[0]) <= obstacle_halfwidth &&
                    std::abs(y - obstacle_center[1]) <= obstacle_halfwidth)
                    m.active_mask[i + static_cast<size_t>(nx) * j] = 0;
            }
        }
    }

    m.cell_of_grid.assign(static_cast<size_t>(nx) * ny, -1);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const size_t g = i + static_cast<size_t>(nx) * j;
            if (m.active_mask[g]) {
                m.cell_of_grid[g] = static_cast<int>(m.grid_of_cell.size());
                m.grid_of_cell.push_back(static_cast<int>(g));
            }
        }
    }
    if (m.grid_of_cell.empty())
        throw std::invalid_argument("mesh: obstacle blanks every cell");

    auto cell_at = [&](int i, int j) -> int {
        if (i < 0 || i >= nx || j < 0 || j >= ny) return -1;
        return m.cell_of_grid[i + static_cast<size_t>(nx) * j];
    };

    // Vertical faces (normal along x) first, then horizontal; fixed order so
    // assembly and artifacts are reproducible run to run.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const int left = cell_at(i - 1, j);
            const int right = cell_at(i, j);
            if (left < 0 && right < 0) continue;
            FaceRecord f;
            f.centroid = {i * m.dx, (j + 0.5) * m.dy};
            f.area = m.dy;
            if (left >= 0 && right >= 0) {
                f.owner = left;
                f.neighbor = right;
                f.tag = FaceTag::Interior;
                f.area_vector = {m.dy, 0.0};
                f.dist = m.dx;
            } else if (right < 0) {
                f.owner = left;
                f.tag = (i == nx) ? FaceTag::Outflow : FaceTag::Obstacle;
                f.area_vector = {m.dy, 0.0};
                f.dist = 0.5 * m.dx;
            } else {
                f.owner = right;
                f.tag = (i == 0) ? FaceTag::Inflow : FaceTag::Obstacle;
                f.area_vector = {-m.dy, 0.0};
                f.dist = 0.5 * m.dx;
            }
            f.normal = {f.area_vector[0] / f.area, f.area_vector[1] / f.area};
            m.faces.push_back(f);
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int below = cell_at(i, j - 1);
            const int above = cell_at(i, j);
            if (below < 0 && above < 0) continue;
            FaceRecord f;
            f.centroid = {(i + 0.5) * m.dx, j * m.dy};
            f.area = m.dx;
            if (below >= 0 && above >= 0) {
                f.owner = below;
                f.neighbor = above;
                f.tag = FaceTag::Interior;
                f.area_vector = {0.0, m.dx};
                f.dist = m.dy;
            } else if (above < 0) {
                f.owner = below;
                f.tag = (j == ny) ? FaceTag::Wall : FaceTag::Obstacle;
                f.area_vector = {0.0, m.dx};
                f.dist = 0.5 * m.dy;
            } else {
                f.owner = above;
                f.tag = (j == 0) ? FaceTag::Wall : FaceTag::Obstacle;
                f.area_vector = {0.0, -m.dx};
                f.dist = 0.5 * m.dy;
            }
            f.normal = {f.area_vector[0] / f.area, f.area_vector[1] / f.area};
            m.faces.push_back(f);
        }
    }

    m.cell_faces.assign(m.grid_of_cell.size(), {});
    for (int fi = 0; fi < m.n_faces(); ++fi) {
        const FaceRecord& f = m.faces[fi];
        m.cell_faces[f.owner].push_back(fi);
        if (f.neighbor >= 0) m.cell_faces[f.neighbor].push_back(fi);
    }
    return m;
}

MeshMetrics mesh_metrics(const CartesianMesh& mesh) {
    MeshMetrics s;
    s.n_cells = mesh.n_cells();
    const double h = std::hypot(mesh.dx, mesh.dy);
    s.h_min = h;
    s.h_avg = h;
    s.h_max = h;
    return s;
}

void CartesianMesh::write_report(std::ostream& os) const {
    const MeshMetrics s = mesh_metrics(*this);
    int tag_count[5] = {0, 0, 0, 0, 0};
    for (const FaceRecord& f : faces) tag_count[static_cast<int>(f.tag)]++;
    os << "mesh_type = channel_cartesian\n";
    os << "nx = " << nx << "\n";
    os << "ny = " << ny << "\n";
    os << "length = " << length << "\n";
    os << "height = " << height << "\n";
    os << "dx = " << dx << "\n";
    os << "dy = " << dy << "\n";
    os << "obstacle_center_x = " << obstacle_center[0] << "\n";
    os << "obstacle_center_y = " << obstacle_center[1] << "\n";
    os << "obstacle_halfwidth = " << obstacle_halfwidth << "\n";
    os << "n_cells = " << n_cells() << "\n";
    os << "n_faces = " << n_faces() << "\n";
    os << "n_interior_faces = " << tag_count[0] << "\n";
    os << "n_inflow_faces = " << tag_count[1] << "\n";
    os << "n_outflow_faces = " << tag_count[2] << "\n";
    os << "n_wall_faces = " << tag_count[3] << "\n";
    os << "n_obstacle_faces = " << tag_count[4] << "\n";
    os << "h_min = " << s.h_min << "\n";
    os << "h_avg = " << s.h_avg << "\n";
    os << "h_max = " << s.h_max << "\n";
    os << "geometry_hash = " << geometry_hash() << "\n";
}

}  // namespace efr
