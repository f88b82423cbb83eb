// SPDX-License-Identifier: Apache-2.0

#include "efr/pod.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace efr {

namespace {

/// Replace v with the closest field (in the unweighted Euclidean sense, which
/// equals the volume-weighted L2 sense on a uniform mesh) whose discrete
/// face-flux divergence vanishes in every cell under the given boundary data.
/// Solved as the KKT saddle system of the equality-constrained projection.
void project_divergence_free(const CartesianMesh& mesh, const VelocityBc& bc, Field& v) {
    const int n = mesh.n_cells();
    const double inv_vol = 1.0 / mesh.cell_volume();
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd trace_div = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < 2 * n; ++i) trips.emplace_back(i, i, 1.0);
    for (int fi = 0; fi < mesh.n_faces(); ++fi) {
        const FaceRecord& f = mesh.faces[fi];
        const int own = f.owner, nb = f.neighbor;
        for (int comp = 0; comp < 2; ++comp) {
            const double a = f.area_vector[comp] * inv_vol;
            if (nb >= 0) {
                for (const auto& [row, col, w] : {std::tuple{own, 2 * own + comp, 0.5 * a},
                                                  {own, 2 * nb + comp, 0.5 * a},
                                                  {nb, 2 * own + comp, -0.5 * a},
                                                  {nb, 2 * nb + comp, -0.5 * a}}) {
                    trips.emplace_back(2 * n + row, col, w);
                    trips.emplace_back(col, 2 * n + row, w);
                }
            } else if (f.tag == FaceTag::Outflow) {
                trips.emplace_back(2 * n + own, 2 * own + comp, a);
                trips.emplace_back(2 * own + comp, 2 * n + own, a);
            } else {
                trace_div[own] += bc.dirichlet(f)[comp] * a;
            }
        }
    }
    Eigen::SparseMatrix<double> kkt(3 * n, 3 * n);
    kkt.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd rhs(3 * n);
    rhs.head(2 * n) = v.data();
    rhs.tail(n) = -trace_div;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(kkt);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("build_lifting: divergence projection failed");
    const Eigen::VectorXd sol = lu.solve(rhs);
    v.data() = sol.head(2 * n);
}

}  // namespace

void SnapshotSet::validate() const {
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("snapshot set: times must be strictly increasing");
    if (times.size() != columns.size())
        throw std::invalid_argument("snapshot set: time/column count mismatch");
    for (size_t k = 1; k < columns.size(); ++k)
        require_same_shape(columns[0], columns[k], "snapshot set");
}

SnapshotSet homogenize(const SnapshotSet& snaps, const LiftingFunction& lift) {
    if (snaps.variable != "v" && snaps.variable != "u" && snaps.variable != "vbar")
        throw std::invalid_argument("homogenize: velocity snapshots only");
    SnapshotSet out = snaps;
    for (int k = 0; k < out.size(); ++k) {
        const double amp = lift.amplitude(out.times[k]);
        out.columns[k].data() -= amp * lift.control_field.data();
    }
    out.homogenized = true;
    return out;
}

LiftingFunction build_lifting(FomWorkspace& ws, const CartesianMesh& mesh, const EfrParams& params,
                              const std::function<double(double)>& inflow_shape) {
    const VelocityBc unit_bc{inflow_shape, 1.0};
    LiftingFunction lift;
    Field p_unused;
    solve_stokes(ws, mesh, params, unit_bc, lift.control_field, p_unused);
    // The stabilized coupled solve conserves mass in its own corrected face
    // flux; project onto the plain central-flux divergence-free subspace so
    // the control field is divergence-free under the reusable stencil too.
    project_divergence_free(mesh, unit_bc, lift.control_field);
    lift.amplitude = channel_inflow_amplitude;
    return lift;
}

Eigen::MatrixXd correlation_matrix(const CartesianMesh& mesh, const std::vector<Field>& columns) {
    const int ns = static_cast<int>(columns.size());
    Eigen::MatrixXd c(ns, ns);
    for (int i = 0; i < ns; ++i) {
        for (int j = i; j < ns; ++j) {
            const double v = l2_inner(mesh, columns[i], columns[j]);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

PodBasis pod_compute(const CartesianMesh& mesh, const std::string& variable,
                     const std::vector<Field>& columns, double energy_threshold, int max_modes) {
    if (columns.empty()) throw std::invalid_argument("pod_compute: empty snapshot set");
    if (!(energy_threshold > 0.0 && energy_threshold <= 1.0))
        throw std::invalid_argument("pod_compute: threshold must lie in (0, 1]");

    const int ns = static_cast<int>(columns.size());
    const Eigen::MatrixXd c = correlation_matrix(mesh, columns);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("pod_compute: eigendecomposition failed");

    // Ascending from the solver; flip to descending and clip tiny negatives.
    Eigen::VectorXd lambda(ns);
    Eigen::MatrixXd q(ns, ns);
    for (int i = 0; i < ns; ++i) {
        lambda[i] = eig.eigenvalues()[ns - 1 - i];
        q.col(i) = eig.eigenvectors().col(ns - 1 - i);
    }
    const double lmax = lambda.size() ? std::max(lambda[0], 0.0) : 0.0;
    if (lmax <= 0.0) throw std::invalid_argument("pod_compute: all-zero snapshot set");
    for (int i = 0; i < ns; ++i) lambda[i] = std::max(lambda[i], 0.0);

    const double total = lambda.sum();
    const double clip = 1e-12 * lmax;
    int usable = 0;
    while (usable < ns && lambda[usable] > clip) ++usable;

    int n_r = usable;
    double cum = 0.0;
    for (int i = 0; i < usable; ++i) {
        cum += lambda[i];
        if (cum / total >= energy_threshold) {
            n_r = i + 1;
            break;
        }
    }
    if (max_modes > 0) n_r = std::min(n_r, max_modes);

    PodBasis basis;
    basis.variable = variable;
    basis.eigenvalues = lambda;
    basis.threshold = energy_threshold;
    basis.modes.reserve(n_r);
    for (int i = 0; i < n_r; ++i) {
        Field mode(columns[0].kind(), columns[0].n_cells());
        const double scale = 1.0 / std::sqrt(lambda[i]);
        for (int j = 0; j < ns; ++j) mode.data() += (q(j, i) * scale) * columns[j].data();
        basis.modes.push_back(std::move(mode));
    }

    // Re-orthonormalize (two modified Gram-Schmidt passes) to push the
    // trailing modes to round-off orthogonality; spans are unchanged.
    for (int i = 0; i < n_r; ++i) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < i; ++j) {
                const double proj = l2_inner(mesh, basis.modes[j], basis.modes[i]);
                basis.modes[i].data() -= proj * basis.modes[j].data();
            }
        }
        const double norm = l2_norm(mesh, basis.modes[i]);
        if (!(norm > 0.0))
            throw std::runtime_error("pod_compute: degenerate mode after orthogonalization");
        basis.modes[i].data() /= norm;
    }

    // Sign convention: first component larger than 1e-12 in magnitude is positive.
    for (Field& mode : basis.modes) {
        for (Eigen::Index k = 0; k < mode.data().size(); ++k) {
            if (std::abs(mode.data()[k]) > 1e-12) {
                if (mode.data()[k] < 0.0) mode.data() = -mode.data();
                break;
            }
        }
    }

    double retained = 0.0;
    for (int i = 0; i < n_r; ++i) retained += lambda[i];
    basis.retained_energy = retained / total;
    return basis;
}

Eigen::VectorXd project_field(const CartesianMesh& mesh, const PodBasis& basis,
                              const Field& field) {
    Eigen::VectorXd coeffs(basis.n_modes());
    for (int i = 0; i < basis.n_modes(); ++i)
        coeffs[i] = l2_inner(mesh, basis.modes[i], field);
    return coeffs;
}

Field reconstruct_from_basis(const PodBasis& basis, const Eigen::VectorXd& coeffs) {
    if (basis.n_modes() == 0) throw std::invalid_argument("reconstruct: empty basis");
    if (coeffs.size() != basis.n_modes())
        throw std::invalid_argument("reconstruct: coefficient count mismatch");
    Field out(basis.modes[0].kind(), basis.modes[0].n_cells());
    for (int i = 0; i < basis.n_modes(); ++i) out.data() += coeffs[i] * basis.modes[i].data();
    return out;
}

}  // namespace efr
