#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "plsm/forward.hpp"
#include "plsm/geometry.hpp"

namespace plsm {

/// Point-scatterer transmission amplitude
/// mu_eps = -H_0^(1)(k|y - z|) / H_0^(1)(2 pi eps).
Complex mu_eps(const Point2& y, const Point2& z, double eps, double k);

/// Scaling factor of the modified Helmholtz-Kirchhoff identity,
/// sigma_eps = pi^2 |H_0^(1)(2 pi eps)|^2 eps^{-q}.
double sigma_eps(double eps, double q);

/// Point-source model of the small-scatterer fields: the incident part is
/// mu_eps * phi(., y_eps), the rescattered part mu_eps * u^s(., y_eps) with
/// u^s solved on the obstacle. One obstacle solve per call.
struct VTildeField {
    Eigen::VectorXcd incident;
    Eigen::VectorXcd scattered;

    Eigen::VectorXcd total() const { return incident + scattered; }
};
VTildeField v_tilde(std::span<const Point2> points, const Point2& y_eps, const Point2& z_eps,
                    const ExteriorSolver& obstacle, double eps);

/// Closed-form ring average of the incident point-scatterer field over the
/// scatterer circle: the leading expression
///   -(eps^{(p+q)/2} / (4 pi^2 H_0(2 pi eps))) e^{2 pi i (eps^-q + eps^-p)} J_0(2 pi h),
/// with h = |eps^-p e^{i theta_z} + c_x e^{i theta_x}|. Valid for |x| of the
/// order of the wavelength (the J_0 factor keeps the full ring oscillation).
Complex avg_v_tilde_i(const Point2& x, const SceneConfig& scene);

/// Least-squares fit of log(norm) against log(eps).
struct RateFit {
    std::string quantity;
    std::vector<double> eps_values;
    std::vector<double> norms;  // the fitted norms (log-compensated where noted)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

RateFit fit_rate(std::string quantity, std::vector<double> eps_values, std::vector<double> norms);

enum class RateQuantity {
    us_on_B,
    vi_on_B,
    vs_on_B,
    v_tilde_on_B,
    avg_v_tilde_on_B,
    decomposition_error,
    modified_hk_residual,
};

const char* rate_quantity_name(RateQuantity q);

/// Sensor-ring RMS norms of the named field for each eps, fitted against eps.
/// Quantities carrying the small-scatterer amplitude are multiplied by
/// |H_0^(1)(2 pi eps)| before fitting, so the fitted slope estimates the pure
/// power of eps; the raw norms differ by exactly that factor. The probe
/// scatterer sits at the fixed angle theta_y = 2 radians on its ring.
RateFit rate_probe(RateQuantity quantity, const std::vector<double>& eps_list,
                   const SceneConfig& scene_template, int mesh_nodes = 64);

}  // namespace plsm
