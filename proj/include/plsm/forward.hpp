#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "plsm/geometry.hpp"
#include "plsm/specfun.hpp"

namespace plsm {

enum class LayerKind { single_layer, combined };

/// Dense Nystrom discretization of a boundary layer operator, quadrature
/// weights folded in. Self-interaction blocks use the spectrally accurate
/// periodic log-quadrature (Kress) for the logarithmic kernel singularity;
/// blocks between disjoint boundaries are plain weighted kernel evaluations.
struct LayerMatrix {
    Eigen::MatrixXcd entries;  // target rows x source columns
    LayerKind kind = LayerKind::single_layer;
};

LayerMatrix assemble_layer(const BoundaryMesh& source, const BoundaryMesh& target, double k,
                           LayerKind kind, double eta = -1.0);
LayerMatrix assemble_layer(const BoundaryMesh& source, std::span<const Point2> target, double k,
                           LayerKind kind, double eta = -1.0);

/// Node data of a (possibly multi-part) boundary, stacked part by part.
struct StackedBoundary {
    std::vector<Point2> nodes;
    std::vector<Point2> normals;
    std::vector<double> weights;
    std::vector<double> spacings;  // local arc length per node, for near-singular refusal
    std::vector<int> part_offsets;

    int size() const { return int(nodes.size()); }
};

/// Surface density attached to its boundary and representation.
struct SurfaceDensity {
    std::shared_ptr<const StackedBoundary> boundary;
    Eigen::VectorXcd values;  // one per node
    LayerKind kind = LayerKind::single_layer;
    double k = 0.0;
    double eta = 0.0;  // combined-representation coupling parameter
};

/// Radiating potential of a surface density at exterior points. Points closer
/// to the boundary than half the local node spacing are refused.
Eigen::VectorXcd eval_field(const SurfaceDensity& density, std::span<const Point2> points);

/// Exterior Dirichlet solver on one or more disjoint closed curves using the
/// combined (double minus i*eta*single) layer ansatz, eta = k by default; the
/// formulation stays injective at interior Dirichlet eigenvalues.
class ExteriorSolver {
public:
    ExteriorSolver(std::vector<BoundaryMesh> parts, double k, double eta = -1.0);

    const StackedBoundary& boundary() const { return *boundary_; }
    std::shared_ptr<const StackedBoundary> boundary_ptr() const { return boundary_; }
    double k() const { return k_; }
    double eta() const { return eta_; }

    /// Condition estimate of the discrete combined operator (power iteration).
    double condition_estimate() const { return cond_; }

    /// Density whose combined potential takes the given boundary values.
    SurfaceDensity solve(const Eigen::VectorXcd& dirichlet_data) const;

    /// Apply the factored combined operator inverse to stacked boundary data.
    Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd& data) const { return lu_.solve(data); }
    Eigen::MatrixXcd apply_inverse(const Eigen::MatrixXcd& data) const { return lu_.solve(data); }

    Eigen::VectorXcd boundary_point_source(const Point2& z) const;  // phi(nodes, z)

private:
    std::vector<BoundaryMesh> parts_;
    std::shared_ptr<const StackedBoundary> boundary_;
    double k_;
    double eta_;
    double cond_ = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// One-shot exterior Dirichlet solve (combined formulation).
SurfaceDensity solve_dirichlet(const BoundaryMesh& mesh, const Eigen::VectorXcd& boundary_data,
                               double k, double eta = -1.0);

/// Scattered field u^s(., z) of the sound-soft obstacle hit by a point
/// source at z: solves with boundary data -phi(., z) and evaluates.
Eigen::VectorXcd scattered_field_us(const ExteriorSolver& solver, const Point2& z,
                                    std::span<const Point2> points);
Eigen::VectorXcd scattered_field_us(const BoundaryMesh& mesh, const Point2& z,
                                    std::span<const Point2> points, double k);

/// Small sound-soft disk handled in closed form (Fourier-Hankel series).
struct DiskScatterer {
    Point2 center{};
    double radius = 0.0;
    TruncationPolicy policy{};
};

/// Field scattered by the disk alone for a point source at z, evaluated by
/// the truncated series with coefficients H_n(k|c-z|) J_n(k rho) / H_n(k rho)
/// in the polar frame centered at the disk.
Eigen::VectorXcd disk_series_field(const DiskScatterer& disk, const Point2& z,
                                   std::span<const Point2> points, double k,
                                   SeriesStatus* status = nullptr);

/// Analytic inverse of the unit-disk single-layer operator at wavenumber
/// 2*pi*eps: Fourier data c_n (order -N..N, centered layout) maps to
/// d_n = -(2i/pi) c_n / (J_n(2*pi*eps) H_n^(1)(2*pi*eps)).
std::vector<Complex> disk_slp_inverse_coeffs(double eps, double k, const std::vector<Complex>& c);

/// Coupled obstacle + small-disk solver by block elimination: the obstacle
/// uses the combined-field discretization, the disk its analytic Fourier
/// inverse, so the tiny boundary is never meshed. Construction fails if the
/// off-diagonal contraction norm reaches 1 (obstacles too close).
class TwoObstacleSolver {
public:
    TwoObstacleSolver(const ExteriorSolver& obstacle, const DiskScatterer& disk);

    double contraction_norm() const { return contraction_; }
    int modes() const { return n_modes_; }
    const ExteriorSolver& obstacle() const { return obstacle_; }
    const DiskScatterer& disk() const { return disk_; }

    struct Solution {
        SurfaceDensity obstacle_density;
        Eigen::VectorXcd disk_coeffs;  // order -N..N
    };

    /// Dirichlet data f_D at obstacle nodes, f_eps as Fourier coefficients of
    /// the data on the disk boundary (centered layout, size 2*modes()+1).
    Solution solve(const Eigen::VectorXcd& f_D, const Eigen::VectorXcd& f_eps) const;

    Eigen::VectorXcd evaluate(const Solution& sol, std::span<const Point2> points) const;

    /// Fourier coefficients (centered layout) of phi(., z) on the disk boundary.
    Eigen::VectorXcd point_source_disk_coeffs(const Point2& z) const;

private:
    const ExteriorSolver& obstacle_;
    DiskScatterer disk_;
    int n_modes_ = 0;
    Eigen::VectorXcd sigma_;       // S_eps Fourier symbol, order -N..N
    Eigen::MatrixXcd T_;           // disk coeffs -> obstacle nodes
    Eigen::MatrixXcd B_;           // obstacle density -> disk Fourier data
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_IA_;
    double contraction_ = 0.0;
};

/// w^s_eps(., y_eps, z_eps): total scattered field of obstacle + disk for a
/// point source at z (Dirichlet data -phi on both boundaries).
Eigen::VectorXcd scattered_field_ws(const TwoObstacleSolver& solver, const Point2& z,
                                    std::span<const Point2> points);

/// Debug dump of a dense complex matrix as CSV ("re,im" pairs, row-major).
void dump_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path);

}  // namespace plsm
