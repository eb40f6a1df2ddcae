#include "plsm/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace plsm {

namespace {

/// phi(x, x') - conj(phi(x, x')) = 2i Im phi. The real part of phi is
/// log-singular at zero separation but cancels here; Im phi(x, x) = 1/4
/// (J_0(0)/4), so the diagonal is exactly i/2.
Eigen::MatrixXcd green_correction(const std::vector<Point2>& xs, double k) {
    const int J = int(xs.size());
    Eigen::MatrixXcd G(J, J);
    for (int j = 0; j < J; ++j) {
        G(j, j) = Complex(0.0, 0.5);
        for (int m = j + 1; m < J; ++m) {
            const Complex c(0.0, 2.0 * green2d(xs[j], xs[m], k).imag());
            G(j, m) = c;
            G(m, j) = c;
        }
    }
    return G;
}

}  // namespace

ExteriorSolver build_obstacle_solver(const SceneConfig& scene, int nodes_per_obstacle) {
    if (scene.obstacles.empty())
        throw std::invalid_argument("build_obstacle_solver: scene has no obstacles");
    std::vector<BoundaryMesh> meshes;
    for (const BoundaryCurve& c : scene.obstacles) meshes.push_back(discretize(c, nodes_per_obstacle));
    return ExteriorSolver(std::move(meshes), scene.k);
}

NearFieldMatrix acquire_near_field(const SceneConfig& scene, const ExteriorSolver& obstacle) {
    scene.validate();
    const std::vector<Point2> sensors = sensor_ring(scene);
    const auto positions = scatterer_positions(scene, Rng(scene.seed));
    const Point2 z = scene.source_point();
    const int J = scene.J, L = scene.L;

    NearFieldMatrix N;
    N.scene = scene;
    N.entries.resize(J, L);

    if (scene.R == 1) {
        for (int l = 0; l < L; ++l) {
            try {
                const DiskScatterer disk{positions[l][0], scene.disk_radius(), {}};
                const TwoObstacleSolver coupled(obstacle, disk);
                N.entries.col(l) = scattered_field_ws(coupled, z, sensors);
            } catch (const std::exception& e) {
                throw std::runtime_error("acquire_near_field: acquisition " + std::to_string(l) +
                                         " failed: " + e.what());
            }
        }
        return N;
    }

    // Several scatterers: superposition of independent point-scatterer fields
    // on top of the direct obstacle response (no inter-scatterer scattering).
    const Eigen::VectorXcd us_z = scattered_field_us(obstacle, z, sensors);
    for (int l = 0; l < L; ++l) {
        try {
            Eigen::VectorXcd col = us_z;
            for (int r = 0; r < scene.R; ++r) {
                const VTildeField vt = v_tilde(sensors, positions[l][r], z, obstacle, scene.eps);
                col += vt.total();
            }
            N.entries.col(l) = col;
        } catch (const std::exception& e) {
            throw std::runtime_error("acquire_near_field: acquisition " + std::to_string(l) +
                                     " failed: " + e.what());
        }
    }
    return N;
}

NearFieldMatrix apply_noise(const NearFieldMatrix& N, double delta, const Rng& rng) {
    if (!(delta >= 0.0)) throw std::invalid_argument("apply_noise: delta must be >= 0");
    NearFieldMatrix out = N;
    if (delta == 0.0) return out;
    Rng stream = rng.stream(Rng::kNoise, 0);
    for (Eigen::Index j = 0; j < out.entries.rows(); ++j)
        for (Eigen::Index l = 0; l < out.entries.cols(); ++l)
            out.entries(j, l) *= 1.0 + delta * stream.box_complex();
    out.noisy = true;
    return out;
}

NearFieldMatrix remove_acquisition_mean(const NearFieldMatrix& N) {
    if (N.averaged) throw std::logic_error("remove_acquisition_mean: matrix already averaged");
    NearFieldMatrix out = N;
    const Eigen::VectorXcd row_mean = N.entries.rowwise().mean();
    out.entries.colwise() -= row_mean;
    out.averaged = true;
    return out;
}

namespace {

CrossCorrelationMatrix correlate(const NearFieldMatrix& Nt, int R, CorrelationKind kind) {
    if (!Nt.averaged)
        throw std::logic_error("cross_correlation: input must be acquisition-mean-removed first");
    const SceneConfig& s = Nt.scene;
    const std::vector<Point2> xs = sensor_ring(s);
    const double ring_area = 2.0 * M_PI * s.scatterer_radius();
    const double sig = sigma_eps(s.eps, s.q);
    const int L = int(Nt.entries.cols());

    CrossCorrelationMatrix C;
    C.scene = s;
    C.kind = kind;
    C.scale = {ring_area, sig, L, R};
    const Complex pref = Complex(0.0, 2.0 * s.k) * ring_area * sig / double(L * R);
    C.entries = pref * (Nt.entries.conjugate() * Nt.entries.transpose());
    C.entries -= green_correction(xs, s.k);
    return C;
}

}  // namespace

CrossCorrelationMatrix modified_cross_correlation(const NearFieldMatrix& N_tilde) {
    if (N_tilde.scene.R != 1)
        throw std::invalid_argument("modified_cross_correlation: scene has R > 1, use the multi variant");
    return correlate(N_tilde, 1, CorrelationKind::modified_C_tilde);
}

CrossCorrelationMatrix multi_cross_correlation(const NearFieldMatrix& N_tilde, int R) {
    if (R < 1 || R != N_tilde.scene.R)
        throw std::invalid_argument("multi_cross_correlation: R does not match the scene");
    return correlate(N_tilde, R, CorrelationKind::multi_C_tilde_R);
}

CrossCorrelationMatrix standard_cross_correlation(const Eigen::MatrixXcd& total_fields,
                                                  const SceneConfig& scene) {
    const std::vector<Point2> xs = sensor_ring(scene);
    if (total_fields.rows() != Eigen::Index(xs.size()))
        throw std::invalid_argument("standard_cross_correlation: row count differs from sensor count");
    const double ring_area = 2.0 * M_PI * scene.scatterer_radius();
    const int L = int(total_fields.cols());

    CrossCorrelationMatrix C;
    C.scene = scene;
    C.kind = CorrelationKind::standard_C;
    C.scale = {ring_area, 1.0, L, 1};
    const Complex pref = Complex(0.0, 2.0 * scene.k) * ring_area / double(L);
    C.entries = pref * (total_fields.conjugate() * total_fields.transpose());
    C.entries -= green_correction(xs, scene.k);
    return C;
}

double hk_residual(HkKind kind, const SceneConfig& scene, const ExteriorSolver& obstacle,
                   std::span<const std::pair<Point2, Point2>> pairs, int quad_points) {
    if (pairs.empty()) throw std::invalid_argument("hk_residual: no sample pairs");
    const double k = scene.k;
    const double ring_radius = scene.scatterer_radius();
    const Point2 z = scene.source_point();

    std::vector<Point2> ring(quad_points);
    for (int q = 0; q < quad_points; ++q)
        ring[q] = polar(ring_radius, 2.0 * M_PI * q / quad_points);

    // Distinct pair endpoints; u^s(x, ring) via reciprocity, one solve each.
    std::vector<Point2> endpoints;
    auto endpoint_index = [&](const Point2& p) {
        for (size_t i = 0; i < endpoints.size(); ++i)
            if (endpoints[i].x == p.x && endpoints[i].y == p.y) return int(i);
        endpoints.push_back(p);
        return int(endpoints.size()) - 1;
    };
    std::vector<std::pair<int, int>> idx_pairs;
    for (const auto& [a, b] : pairs) idx_pairs.emplace_back(endpoint_index(a), endpoint_index(b));

    const int E = int(endpoints.size());
    Eigen::MatrixXcd us_ring(E, quad_points);  // u^s(endpoint_e, ring_q)
    for (int e = 0; e < E; ++e)
        us_ring.row(e) = scattered_field_us(obstacle, endpoints[e], ring).transpose();

    // field(endpoint, ring point): total field u for the standard identity,
    // v~ for the modified one.
    Eigen::MatrixXcd F(E, quad_points);
    for (int q = 0; q < quad_points; ++q) {
        const Complex mu = kind == HkKind::modified ? mu_eps(ring[q], z, scene.eps, k) : 1.0;
        for (int e = 0; e < E; ++e)
            F(e, q) = mu * (green2d(endpoints[e], ring[q], k) + us_ring(e, q));
    }

    // u^s between endpoints for the left-hand side (solve per source endpoint).
    Eigen::MatrixXcd us_ee(E, E);
    for (int e = 0; e < E; ++e)
        us_ee.col(e) = scattered_field_us(obstacle, endpoints[e], endpoints);

    const double ds = 2.0 * M_PI * ring_radius / quad_points;
    const double sig = kind == HkKind::modified ? sigma_eps(scene.eps, scene.q) : 1.0;

    double worst = 0.0;
    for (const auto& [ia, ib] : idx_pairs) {
        const Complex us_ab = us_ee(ia, ib);
        const Complex lhs(0.0, 2.0 * us_ab.imag());
        Complex integral = 0.0;
        for (int q = 0; q < quad_points; ++q) integral += std::conj(F(ia, q)) * F(ib, q);
        integral *= ds;
        const Point2 a = endpoints[ia], b = endpoints[ib];
        const Complex phi_corr =
            (a.x == b.x && a.y == b.y) ? Complex(0.0, 0.5)
                                       : Complex(0.0, 2.0 * green2d(a, b, k).imag());
        const Complex rhs = Complex(0.0, 2.0 * k) * sig * integral - phi_corr;
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
    }
    return worst;
}

}  // namespace plsm
