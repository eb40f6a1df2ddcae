#include "plsm/lsm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plsm {

SvdFactors svd_decompose(const Eigen::MatrixXcd& C) {
    if (!C.allFinite()) throw std::invalid_argument("svd_decompose: matrix has non-finite entries");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    const double scale = std::max(1.0, C.norm());
    const Eigen::MatrixXcd rec = f.U * f.s.asDiagonal() * f.V.adjoint();
    if ((rec - C).norm() > 1e-10 * scale)
        throw std::runtime_error("svd_decompose: reconstruction residual above 1e-10");
    return f;
}

Eigen::VectorXcd tikhonov_solve(const SvdFactors& f, const Eigen::VectorXcd& rhs, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("tikhonov_solve: alpha must be positive");
    const Eigen::VectorXcd beta = f.U.adjoint() * rhs;
    Eigen::VectorXcd coeff(beta.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        const double s = f.s(i);
        coeff(i) = s / (s * s + alpha) * beta(i);
    }
    return f.V * coeff;
}

namespace {

/// Discrepancy gap |C g_a - rhs| - delta |g_a| from the SVD coordinates.
double morozov_gap(const Eigen::VectorXd& s, const Eigen::VectorXcd& beta, double rhs_norm2,
                   double delta, double alpha) {
    // |C g - rhs|^2 = sum |beta_i|^2 (alpha/(s_i^2+alpha))^2 + (|rhs|^2 - |beta|^2)
    // |g|^2 = sum |beta_i|^2 s_i^2/(s_i^2+alpha)^2
    double res2 = rhs_norm2 - beta.squaredNorm();
    res2 = std::max(res2, 0.0);  // rounding guard: beta is a projection of rhs
    double g2 = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double b2 = std::norm(beta(i));
        const double den = s(i) * s(i) + alpha;
        res2 += b2 * (alpha / den) * (alpha / den);
        g2 += b2 * s(i) * s(i) / (den * den);
    }
    return std::sqrt(res2) - delta * std::sqrt(g2);
}

}  // namespace

MorozovResult morozov_alpha(const SvdFactors& f, const Eigen::VectorXcd& rhs, double delta_level) {
    if (!(delta_level > 0.0)) throw std::domain_error("morozov_alpha: delta_level must be positive");
    const double rhs_norm = rhs.norm();
    if (!(delta_level < rhs_norm))
        throw std::domain_error("morozov_alpha: delta_level must be below |rhs|");

    const Eigen::VectorXcd beta = f.U.adjoint() * rhs;
    const double smax = f.s(0);
    double lo = 1e-16 * smax * smax;
    double hi = 1e+4 * smax * smax;

    const double g_lo = morozov_gap(f.s, beta, rhs_norm * rhs_norm, delta_level, lo);
    const double g_hi = morozov_gap(f.s, beta, rhs_norm * rhs_norm, delta_level, hi);
    if (g_lo > 0.0 || g_hi < 0.0) {
        // No sign change: return the closer endpoint, flagged.
        return {g_lo > 0.0 ? lo : hi, false};
    }
    // Bisection on log(alpha); the gap is monotone increasing in alpha.
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-8; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (morozov_gap(f.s, beta, rhs_norm * rhs_norm, delta_level, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return {std::sqrt(lo * hi), true};
}

IndicatorMap indicator_map(const CrossCorrelationMatrix& C, const SamplingGrid& grid,
                           double delta_level, bool reciprocal) {
    if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("indicator_map: degenerate grid");
    const SvdFactors f = svd_decompose(C.entries);
    const std::vector<Point2> xs = sensor_ring(C.scene);
    const double k = C.scene.k;

    IndicatorMap map;
    map.grid = grid;
    map.reciprocal = reciprocal;
    map.values.assign(size_t(grid.nx) * grid.ny, 0.0);
    map.alpha_map.assign(size_t(grid.nx) * grid.ny, 0.0);

    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Point2 s = grid.node(ix, iy);
            if (s.norm() > grid.mask_radius) continue;
            Eigen::VectorXcd rhs(xs.size());
            for (size_t j = 0; j < xs.size(); ++j) rhs(j) = green2d(xs[j], s, k);
            try {
                const MorozovResult mor = morozov_alpha(f, rhs, delta_level);
                const double gnorm = tikhonov_solve(f, rhs, mor.alpha).norm();
                map.values[grid.index(ix, iy)] = reciprocal ? 1.0 / gnorm : gnorm;
                map.alpha_map[grid.index(ix, iy)] = mor.alpha;
            } catch (const std::exception& e) {
                throw std::runtime_error("indicator_map: node (" + std::to_string(s.x) + ", " +
                                         std::to_string(s.y) + "): " + e.what());
            }
        }
    }
    return map;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const int n = int(pts.size());
    if (n < 3) return pts;
    auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point2> hull(2 * n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
        while (m >= 2 && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0.0) --m;
        hull[m++] = pts[i];
    }
    const int lower = m + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (m >= lower && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0.0) --m;
        hull[m++] = pts[i];
    }
    hull.resize(m - 1);
    return hull;
}

namespace {

struct BBox {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity(), y1 = -std::numeric_limits<double>::infinity();
    explicit BBox(const std::vector<Point2>& poly) {
        for (const Point2& p : poly) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    bool contains(const Point2& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

bool polygon_contains(const std::vector<Point2>& poly, const Point2& p) {
    bool inside = false;
    const int n = int(poly.size());
    for (int i = 0, j = n - 1; i < n; j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
            const double xc =
                poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) * (poly[i].x - poly[j].x);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

bool curve_contains(const BoundaryCurve& curve, const Point2& p, int poly_points) {
    std::vector<Point2> poly(poly_points);
    for (int i = 0; i < poly_points; ++i) poly[i] = curve.position(2.0 * M_PI * i / poly_points);
    return polygon_contains(poly, p);
}

ReconstructionMetrics level_set_metrics(const IndicatorMap& map,
                                        std::span<const BoundaryCurve> truth) {
    const SamplingGrid& g = map.grid;
    const double vmax = *std::max_element(map.values.begin(), map.values.end());
    if (!(vmax > 0.0)) throw std::runtime_error("level_set_metrics: indicator map is identically zero");

    // Truth polygons and the pixel raster of their union.
    const int px = 480, py = 480;
    std::vector<std::vector<Point2>> truth_polys;
    for (const auto& c : truth) {
        std::vector<Point2> poly(1024);
        for (int i = 0; i < 1024; ++i) poly[i] = c.position(2.0 * M_PI * i / 1024);
        truth_polys.push_back(std::move(poly));
    }
    std::vector<BBox> truth_boxes;
    for (const auto& poly : truth_polys) truth_boxes.emplace_back(poly);
    std::vector<char> in_truth(size_t(px) * py, 0);
    std::vector<Point2> pixels(size_t(px) * py);
    for (int iy = 0; iy < py; ++iy)
        for (int ix = 0; ix < px; ++ix) {
            const Point2 p{g.x0 + (g.x1 - g.x0) * (ix + 0.5) / px,
                           g.y0 + (g.y1 - g.y0) * (iy + 0.5) / py};
            pixels[size_t(iy) * px + ix] = p;
            for (size_t c = 0; c < truth_polys.size(); ++c)
                if (truth_boxes[c].contains(p) && polygon_contains(truth_polys[c], p)) {
                    in_truth[size_t(iy) * px + ix] = 1;
                    break;
                }
        }
    const double pixel_area = (g.x1 - g.x0) * (g.y1 - g.y0) / (double(px) * py);
    double truth_area = 0.0;
    for (char c : in_truth) truth_area += c;
    truth_area *= pixel_area;

    ReconstructionMetrics best;
    best.area_error = std::numeric_limits<double>::infinity();
    for (int step = 30; step <= 90; ++step) {
        const double tau = 0.01 * step * vmax;
        std::vector<Point2> level;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                if (map.values[g.index(ix, iy)] >= tau) level.push_back(g.node(ix, iy));
        if (level.size() < 3) continue;
        const std::vector<Point2> hull = convex_hull(std::move(level));
        if (hull.size() < 3) continue;

        const BBox hull_box(hull);
        double sym_diff = 0.0;
        for (size_t i = 0; i < pixels.size(); ++i) {
            const bool in_hull = hull_box.contains(pixels[i]) && polygon_contains(hull, pixels[i]);
            if (in_hull != bool(in_truth[i])) sym_diff += 1.0;
        }
        sym_diff *= pixel_area;
        const double err = sym_diff / g.area();
        if (err < best.area_error) {
            best.area_error = err;
            best.best_threshold = 0.01 * step;
            best.area_error_obstacle = sym_diff / truth_area;
            best.hull_vertices = hull;
        }
    }
    if (!std::isfinite(best.area_error))
        throw std::runtime_error("level_set_metrics: every scanned level set is empty");
    return best;
}

}  // namespace plsm
