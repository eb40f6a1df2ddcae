#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "plsm/correlation.hpp"
#include "plsm/geometry.hpp"

namespace plsm {

struct SvdFactors {
    Eigen::MatrixXcd U;
    Eigen::VectorXd s;  // nonincreasing
    Eigen::MatrixXcd V;
};

SvdFactors svd_decompose(const Eigen::MatrixXcd& C);

/// Tikhonov-filtered solution g = sum_i s_i/(s_i^2 + alpha) <u_i, rhs> v_i,
/// the minimizer of |C g - rhs|^2 + alpha |g|^2.
Eigen::VectorXcd tikhonov_solve(const SvdFactors& f, const Eigen::VectorXcd& rhs, double alpha);

struct MorozovResult {
    double alpha = 0.0;
    bool bracketed = true;  // false: no sign change, an interval endpoint was returned
};

/// Morozov discrepancy principle: the alpha with |C g_a - rhs| = delta |g_a|,
/// located by bisection on log(alpha) over [1e-16, 1e4] * s_max^2. The
/// discrepancy is nondecreasing and delta*|g_a| nonincreasing in alpha, so
/// the root is unique whenever the interval brackets a sign change.
MorozovResult morozov_alpha(const SvdFactors& f, const Eigen::VectorXcd& rhs, double delta_level);

struct IndicatorMap {
    SamplingGrid grid;
    std::vector<double> values;     // 1/|g_s|_2 per node (or raw |g_s|_2), masked
    std::vector<double> alpha_map;  // Morozov-selected alpha per node (0 where masked)
    bool masked = true;
    bool reciprocal = true;
};

/// Solves C g_s = phi_s per grid node (rhs (phi_s)_j = phi(x_j, s)) with
/// Morozov-selected Tikhonov regularization. The regularized density norm
/// |g_s|_2 is small inside the obstacle and grows outside, so the stored
/// indicator defaults to the reciprocal 1/|g_s|_2 (obstacle shows bright);
/// pass reciprocal = false for the raw density norm. Nodes outside
/// mask_radius are zeroed.
IndicatorMap indicator_map(const CrossCorrelationMatrix& C, const SamplingGrid& grid,
                           double delta_level, bool reciprocal = true);

struct ReconstructionMetrics {
    double best_threshold = 0.0;          // fraction of the map maximum
    double area_error = 0.0;              // |hull delta D| / |sampling domain|
    double area_error_obstacle = 0.0;     // |hull delta D| / |D|
    std::vector<Point2> hull_vertices;
};

/// Scans thresholds tau in {0.30, 0.31, ..., 0.90} * max(map); for each, takes
/// the convex hull of the super-level nodes and measures the symmetric
/// difference against the true obstacles on a fine pixel grid. Returns the
/// minimizing threshold.
ReconstructionMetrics level_set_metrics(const IndicatorMap& map,
                                        std::span<const BoundaryCurve> truth);

/// Point-in-region test for a closed curve (dense polygon, even-odd rule).
bool curve_contains(const BoundaryCurve& curve, const Point2& p, int poly_points = 1024);

/// Convex hull (monotone chain); returns counterclockwise vertices.
std::vector<Point2> convex_hull(std::vector<Point2> pts);

}  // namespace plsm
