// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace efr {

/// Classification of a mesh face.
enum class FaceTag : uint8_t {
    Interior,
    Inflow,    ///< x = 0 plane
    Outflow,   ///< x = length plane
    Wall,      ///< y = 0 and y = height planes
    Obstacle,  ///< face between a fluid cell and a blanked cell
};

const char* to_string(FaceTag tag);

/// One finite-volume face. The area vector points from owner to neighbor,
/// or outward from the owner on boundary faces.
struct FaceRecord {
    int owner = -1;
    int neighbor = -1;  ///< -1 on boundary faces
    FaceTag tag = FaceTag::Interior;
    std::array<double, 2> area_vector{0.0, 0.0};
    std::array<double, 2> centroid{0.0, 0.0};
    double area = 0.0;      ///< |area_vector|
    double dist = 0.0;      ///< owner->neighbor centroid distance, or owner->face on boundaries
    std::array<double, 2> normal{0.0, 0.0};  ///< unit normal, same orientation as area_vector

    bool is_boundary() const { return neighbor < 0; }
};

/// Structured 2D Cartesian finite-volume mesh of a rectangular channel with
/// an optional blanked square obstacle. Cells whose centroid falls inside the
/// obstacle are deactivated; the remaining (active) cells are indexed
/// compactly 0..n_cells()-1. Immutable after construction.
class CartesianMesh {
public:
    CartesianMesh() = default;

    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    double length = 0.0, height = 0.0;
    std::array<double, 2> obstacle_center{0.0, 0.0};
    double obstacle_halfwidth = 0.0;

    std::vector<uint8_t> active_mask;   ///< per grid cell (i + nx*j), 1 = fluid
    std::vector<int> cell_of_grid;      ///< grid cell -> compact index, -1 if blanked
    std::vector<int> grid_of_cell;      ///< compact index -> grid cell
    std::vector<FaceRecord> faces;
    std::vector<std::vector<int>> cell_faces;  ///< compact cell -> incident face ids

    int n_cells() const { return static_cast<int>(grid_of_cell.size()); }
    int n_faces() const { return static_cast<int>(faces.size()); }
    double cell_volume() const { return dx * dy; }
    double domain_volume() const { return n_cells() * cell_volume(); }

    std::array<double, 2> cell_centroid(int cell) const {
        const int g = grid_of_cell[cell];
        const int i = g % nx, j = g / nx;
        return {(i + 0.5) * dx, (j + 0.5) * dy};
    }

    /// True if the face is owned by `cell` (area vector already outward for it).
    bool face_outward(int face, int cell) const { return faces[face].owner == cell; }

    /// Outward area vector of `face` as seen from `cell`.
    std::array<double, 2> outward_area(int face, int cell) const {
        const FaceRecord& f = faces[face];
        const double s = (f.owner == cell) ? 1.0 : -1.0;
        return {s * f.area_vector[0], s * f.area_vector[1]};
    }

    /// The cell on the other side of an interior face.
    int other_cell(int face, int cell) const {
        const FaceRecord& f = faces[face];
        return f.owner == cell ? f.neighbor : f.owner;
    }

    bool has_obstacle() const;

    /// FNV-1a hash over the mesh geometry; used to validate stored artifacts.
    std::string geometry_hash() const;

    /// Plain-text summary: counts, spacings, h statistics.
    void write_report(std::ostream& os) const;
};

/// Mesh statistics. Cell diameter convention: diagonal sqrt(dx^2 + dy^2).
struct MeshMetrics {
    double h_min = 0.0;
    double h_avg = 0.0;
    double h_max = 0.0;
    int n_cells = 0;
};

/// Build the channel mesh. The obstacle is the square
/// |x - cx| <= halfwidth, |y - cy| <= halfwidth; halfwidth 0 disables it.
/// Throws std::invalid_argument on bad geometry (obstacle touching the
/// boundary, nx or ny < 4).
CartesianMesh build_channel_mesh(double length, double height,
                                 std::array<double, 2> obstacle_center,
                                 double obstacle_halfwidth, int nx, int ny);

MeshMetrics mesh_metrics(const CartesianMesh& mesh);

}  // namespace efr
