#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "plsm/asymptotic.hpp"
#include "plsm/forward.hpp"
#include "plsm/geometry.hpp"
#include "plsm/rng.hpp"

namespace plsm {

/// J x L matrix of near-field measurements w^s(x_j, y^l, z) (sensor row,
/// acquisition column).
struct NearFieldMatrix {
    Eigen::MatrixXcd entries;
    SceneConfig scene;
    bool averaged = false;
    bool noisy = false;
};

enum class CorrelationKind { standard_C, modified_C_tilde, multi_C_tilde_R };

struct CorrelationScale {
    double ring_area = 0.0;  // |Sigma| or |Sigma_eps|
    double sigma = 0.0;      // sigma_eps (1 for the standard matrix)
    int L = 0;
    int R = 1;
};

struct CrossCorrelationMatrix {
    Eigen::MatrixXcd entries;  // J x J
    CorrelationKind kind = CorrelationKind::modified_C_tilde;
    CorrelationScale scale;
    SceneConfig scene;
};

/// Builds the obstacle solver for a scene (one mesh per obstacle curve).
ExteriorSolver build_obstacle_solver(const SceneConfig& scene, int nodes_per_obstacle);

/// Near-field acquisition: for R = 1 each column is a full coupled
/// obstacle-plus-disk solve; for R > 1 the column is the superposition model
/// u^s(x_j, z) + sum_r v~(x_j, y^{l,r}) of independent point scatterers.
/// Scatterer positions derive from scene.seed.
NearFieldMatrix acquire_near_field(const SceneConfig& scene, const ExteriorSolver& obstacle);

/// Multiplicative measurement noise: entry *= 1 + delta*zeta, zeta complex
/// with re/im i.i.d. uniform on [-1, 1], drawn from rng.stream(kNoise, 0).
NearFieldMatrix apply_noise(const NearFieldMatrix& N, double delta, const Rng& rng);

/// Removes the per-sensor empirical mean over acquisitions, exposing the
/// scatterer-dependent field component.
NearFieldMatrix remove_acquisition_mean(const NearFieldMatrix& N);

/// Modified cross-correlation matrix
///   C~_{jm} = (2ik |Sigma_eps| sigma_eps / L) sum_l conj(N~_{jl}) N~_{ml}
///             - [phi(x_j, x_m) - conj(phi(x_j, x_m))].
/// The diagonal of the correction is i/2 (Im phi(x, x) = 1/4).
CrossCorrelationMatrix modified_cross_correlation(const NearFieldMatrix& N_tilde);

/// Multi-scatterer variant: the 1/L prefactor becomes 1/(L R).
CrossCorrelationMatrix multi_cross_correlation(const NearFieldMatrix& N_tilde, int R);

/// Classical cross-correlation matrix for total fields u(x_j, z_l) of sources
/// on the ring Sigma (radius lambda*eps^-p of the scene).
CrossCorrelationMatrix standard_cross_correlation(const Eigen::MatrixXcd& total_fields,
                                                  const SceneConfig& scene);

enum class HkKind { standard, modified };

/// Max relative defect of the (standard or modified) Helmholtz-Kirchhoff
/// identity over the sample pairs, with the ring integral evaluated by a
/// dense trapezoid rule.
double hk_residual(HkKind kind, const SceneConfig& scene, const ExteriorSolver& obstacle,
                   std::span<const std::pair<Point2, Point2>> pairs, int quad_points = 2048);

}  // namespace plsm
