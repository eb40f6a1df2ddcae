#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "plsm/point.hpp"
#include "plsm/rng.hpp"

namespace plsm {

enum class CurveKind { disk, ellipse, kite };

/// Closed smooth boundary curve: a base shape (disk / ellipse / kite),
/// recentred on its area centroid, then rotated, uniformly scaled and
/// translated. The parametrization is 2*pi-periodic and C^inf.
///
/// The kite is the standard benchmark shape
///   (cos t + 0.65 cos 2t - 0.65, 1.5 sin t),
/// see Colton & Kress, Inverse Acoustic and EM Scattering Theory, sect. 3.6.
struct BoundaryCurve {
    CurveKind kind = CurveKind::disk;
    Point2 center{};
    std::array<double, 2> params{1.0, 1.0};  // disk: {radius,-}; ellipse: {a,b}; kite: {scale,-}
    double rotation = 0.0;                   // radians
    double scale = 1.0;                      // uniform factor applied to the base shape

    Point2 position(double t) const;
    Point2 derivative(double t) const;
    Point2 second_derivative(double t) const;

    /// Max pairwise distance between curve points (coarse scan + local refinement).
    double diameter() const;

    /// Copy rescaled so that diameter() == size.
    BoundaryCurve scaled_to(double size) const;

    /// Curve perimeter by dense trapezoid quadrature of |gamma'|.
    double perimeter() const;
};

/// Base-shape constructor: rescales so the diameter equals scale_to_size and
/// places the area centroid at center.
BoundaryCurve make_curve(CurveKind kind, Point2 center, std::array<double, 2> params,
                         double scale_to_size, double rotation = 0.0);

/// Nystrom-ready discretization: M nodes at equispaced parameters, outward
/// unit normals, and arc-length quadrature weights |gamma'(t_i)| * 2*pi/M.
struct BoundaryMesh {
    BoundaryCurve curve;
    std::vector<double> params;      // t_i = 2*pi*i/M
    std::vector<Point2> nodes;
    std::vector<Point2> normals;     // unit outward
    std::vector<double> jacobians;   // |gamma'(t_i)|
    std::vector<double> weights;     // jacobians * 2*pi/M

    int size() const { return int(nodes.size()); }
};

BoundaryMesh discretize(const BoundaryCurve& curve, int M);

enum class Placement { perturbed_trapezoid, uniform_random };

/// Sampling grid for the indicator map; the indicator is zeroed outside the
/// disk of radius mask_radius.
struct SamplingGrid {
    double x0 = -6.0, x1 = 6.0;
    double y0 = -6.0, y1 = 6.0;
    int nx = 100, ny = 100;
    double mask_radius = 5.0;

    Point2 node(int ix, int iy) const {
        return {x0 + (x1 - x0) * ix / double(nx - 1), y0 + (y1 - y0) * iy / double(ny - 1)};
    }
    int index(int ix, int iy) const { return iy * nx + ix; }
    double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Every physical and algorithmic parameter of an experiment. The scatterer
/// ring radius lambda*eps^-p and the source distance lambda*eps^-q are always
/// derived, never stored.
struct SceneConfig {
    double k = 2.0 * M_PI;  // wavenumber; lambda = 2*pi/k
    double eps = 1e-2;
    double p = 1.0;
    double q = 2.0;
    double theta_z = M_PI;
    int J = 120;
    double sensor_radius = 5.0;      // 5*lambda with the default k
    double aperture = 2.0 * M_PI;    // arc span of the sensors
    int L = 150;
    int R = 1;
    Placement placement = Placement::perturbed_trapezoid;
    double beta_max = 0.1;           // perturbed-trapezoid only
    double noise_delta = 5e-3;
    std::uint64_t seed = 0;
    std::vector<BoundaryCurve> obstacles;

    double lambda() const { return 2.0 * M_PI / k; }
    double scatterer_radius() const { return lambda() * std::pow(eps, -p); }
    double source_distance() const { return lambda() * std::pow(eps, -q); }
    Point2 source_point() const { return polar(source_distance(), theta_z); }
    double disk_radius() const { return lambda() * eps; }

    void validate() const;  // throws std::invalid_argument on violated invariants
};

/// Sensors x_j = sensor_radius * e^{i theta_j}, theta_j = aperture*(j-1)/J.
/// The full aperture 2*pi reproduces the equispaced ring exactly.
std::vector<Point2> sensor_ring(const SceneConfig& scene);

/// L acquisitions of R scatterer centers on the ring of radius lambda*eps^-p.
/// perturbed_trapezoid requires R = 1: theta_l = (2*pi/L)(l-1+beta_l) with
/// beta_l ~ U(0, beta_max); uniform_random draws all angles i.i.d. U(0, 2*pi).
/// Acquisition l draws from rng.stream(kPlacement, l).
std::vector<std::vector<Point2>> scatterer_positions(const SceneConfig& scene, const Rng& rng);

/// JSON round-trip of SceneConfig; unknown keys are rejected, all defaults
/// are written explicitly on save.
std::string scene_to_json(const SceneConfig& scene);
SceneConfig scene_from_json(const std::string& text);

}  // namespace plsm
