#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "plsm/forward.hpp"

using namespace plsm;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using std::abs;

namespace {

const double kTwoPi = 2.0 * M_PI;

BoundaryMesh unit_circle_mesh(int M, Point2 center = {0, 0}, double radius = 1.0) {
    return discretize(make_curve(CurveKind::disk, center, {1.0, 0.0}, 2.0 * radius), M);
}

// Off-grid Kress weight R_j(t) and balanced trigonometric interpolation,
// used to evaluate boundary traces at midpoints (test-side machinery).
double kress_weight_at(double t, double tj, int M) {
    const int n = M / 2;
    double s = 0.0;
    for (int m = 1; m < n; ++m) s += std::cos(m * (t - tj)) / m;
    return -(2.0 * M_PI / n) * s - (M_PI / (n * n)) * std::cos(n * (t - tj));
}

Complex trig_interp(const VectorXcd& values, const std::vector<double>& params, double t) {
    const int M = int(values.size());
    const int n = M / 2;
    Complex acc = 0.0;
    for (int j = 0; j < M; ++j) {
        const double u = t - params[j];
        double d = 1.0;
        for (int m = 1; m < n; ++m) d += 2.0 * std::cos(m * u);
        d += std::cos(n * u);
        acc += values(j) * d / double(M);
    }
    return acc;
}

// Combined-potential boundary trace at an off-node parameter t of the mesh.
Complex boundary_trace(const BoundaryMesh& mesh, const VectorXcd& psi, double t, double k, double eta) {
    const int M = mesh.size();
    const double h = 2.0 * M_PI / M;
    const Point2 x = mesh.curve.position(t);
    Complex acc = 0.5 * trig_interp(psi, mesh.params, t);
    for (int j = 0; j < M; ++j) {
        const double r = distance(x, mesh.nodes[j]);
        const double lg = std::log(std::pow(2.0 * std::sin(0.5 * (t - mesh.params[j])), 2));
        const double g = dot(x - mesh.nodes[j], mesh.jacobians[j] * mesh.normals[j]);
        // single layer split
        const Complex Mfull = Complex(0, 0.25) * hankel1(0, k * r) * mesh.jacobians[j];
        const double M1 = -bessel_j(0, k * r) * mesh.jacobians[j] / (4.0 * M_PI);
        // double layer split
        const Complex Lfull = Complex(0, 0.25 * k) * hankel1(1, k * r) * g / r;
        const double L1 = -k * bessel_j(1, k * r) * g / (4.0 * M_PI * r);
        const double Rj = kress_weight_at(t, mesh.params[j], M);
        const Complex S_part = Rj * M1 + h * (Mfull - M1 * lg);
        const Complex K_part = Rj * L1 + h * (Lfull - L1 * lg);
        acc += (K_part - Complex(0, eta) * S_part) * psi(j);
    }
    return acc;
}

}  // namespace

TEST_CASE("assemble_layer: distant meshes are plain weighted kernel evaluations") {
    const BoundaryMesh a = unit_circle_mesh(16, {0, 0}, 0.5);
    const BoundaryMesh b = unit_circle_mesh(24, {10.0, 0}, 0.5);
    const LayerMatrix ab = assemble_layer(a, b, kTwoPi, LayerKind::single_layer);
    REQUIRE(ab.entries.rows() == 24);
    REQUIRE(ab.entries.cols() == 16);
    for (int i : {0, 5, 23})
        for (int j : {0, 7, 15}) {
            const Complex expect = a.weights[j] * green2d(b.nodes[i], a.nodes[j], kTwoPi);
            CHECK(abs(ab.entries(i, j) - expect) <= 1e-14);
        }

    // transpose-compatible evaluation of the same kernel
    const LayerMatrix ba = assemble_layer(b, a, kTwoPi, LayerKind::single_layer);
    for (int i : {1, 11})
        for (int j : {2, 13}) {
            CHECK(abs(ab.entries(i, j) * b.weights[i] - ba.entries(j, i) * a.weights[j]) <= 1e-14);
        }
}

TEST_CASE("assemble_layer rejects overlapping distinct meshes") {
    const BoundaryMesh a = unit_circle_mesh(16);
    const BoundaryMesh b = unit_circle_mesh(32, {0.5, 0}, 1.0);
    CHECK_THROWS_AS(assemble_layer(a, b, kTwoPi, LayerKind::single_layer), std::invalid_argument);
}

TEST_CASE("assemble_layer: circle self-interaction reproduces the Fourier eigenvalue") {
    // S applied to the constant density on the unit circle equals
    // (i pi / 2) J_0(k) H_0(k); this is the n = 0 symbol of the operator.
    const BoundaryMesh m = unit_circle_mesh(256);
    const LayerMatrix S = assemble_layer(m, m, kTwoPi, LayerKind::single_layer);
    const VectorXcd ones = VectorXcd::Ones(256);
    const VectorXcd val = S.entries * ones;
    const Complex expect = Complex(0, 0.5 * M_PI) * bessel_j(0, kTwoPi) * hankel1(0, kTwoPi);
    for (int i = 0; i < 256; ++i) CHECK(abs(val(i) - expect) <= 1e-6);

    // complex symmetry on the constant-Jacobian circle
    CHECK((S.entries - S.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("assemble_layer: weighted symmetry on a non-constant-Jacobian curve") {
    const BoundaryMesh m = discretize(make_curve(CurveKind::ellipse, {0, 0}, {1.5, 1.0}, 1.0), 64);
    const LayerMatrix S = assemble_layer(m, m, kTwoPi, LayerKind::single_layer);
    for (int i : {0, 3, 17})
        for (int j : {1, 9, 40}) {
            CHECK(abs(S.entries(i, j) * m.jacobians[i] - S.entries(j, i) * m.jacobians[j]) <= 1e-12);
        }
}

TEST_CASE("solve_dirichlet: disk scattering matches the analytic series to 1e-4") {
    const double lambda = 1.0;
    const BoundaryCurve curve = make_curve(CurveKind::disk, {0, 0}, {1.0, 0.0}, 0.5 * lambda);
    const BoundaryMesh mesh = discretize(curve, 100);
    const Point2 z{10.0 * lambda, 0.0};

    std::vector<Point2> probes;
    for (int i = 0; i < 20; ++i) probes.push_back(polar(1.0 + 0.2 * i, 0.37 * i));

    const VectorXcd bem = scattered_field_us(mesh, z, probes, kTwoPi);
    DiskScatterer disk{{0, 0}, 0.25 * lambda, {}};
    const VectorXcd series = disk_series_field(disk, z, probes, kTwoPi);
    for (int i = 0; i < 20; ++i) CHECK(abs(bem(i) - series(i)) <= 1e-4 * abs(series(i)));
}

TEST_CASE("solve_dirichlet: zero data gives the trivial solution") {
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::kite, {0, 0}, {1.0, 0.0}, 0.5), 64);
    const SurfaceDensity d = solve_dirichlet(mesh, VectorXcd::Zero(64), kTwoPi);
    CHECK(d.values.norm() <= 1e-12);
    std::vector<Point2> pts{{3.0, 1.0}, {-2.0, 2.0}};
    CHECK(eval_field(d, pts).norm() <= 1e-12);
}

TEST_CASE("solve_dirichlet: self-convergence under mesh doubling") {
    const BoundaryCurve curve = make_curve(CurveKind::disk, {0, 0}, {1.0, 0.0}, 0.5);
    const Point2 z{10.0, 0.0};
    std::vector<Point2> probes{{2.0, 0.3}, {-1.5, 1.1}, {0.0, -3.0}};
    const VectorXcd u1 = scattered_field_us(discretize(curve, 50), z, probes, kTwoPi);
    const VectorXcd u2 = scattered_field_us(discretize(curve, 100), z, probes, kTwoPi);
    CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("solve_dirichlet surfaces its condition estimate") {
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::ellipse, {0, 0}, {1.5, 1.0}, 0.5), 48);
    const ExteriorSolver solver({mesh}, kTwoPi);
    CHECK(solver.condition_estimate() > 1.0);
    CHECK(solver.condition_estimate() < 1e6);
}

TEST_CASE("scattered field: total field vanishes on boundary midpoints") {
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::kite, {0.3, -0.1}, {1.0, 0.0}, 0.5), 80);
    const ExteriorSolver solver({mesh}, kTwoPi);
    const Point2 z{4.0, 3.0};
    const SurfaceDensity psi = solver.solve(-solver.boundary_point_source(z));

    const double h = 2.0 * M_PI / mesh.size();
    double worst = 0.0;
    for (int i = 0; i < mesh.size(); i += 5) {
        const double t = h * (i + 0.5);
        const Complex us = boundary_trace(mesh, psi.values, t, kTwoPi, solver.eta());
        const Complex phi = green2d(mesh.curve.position(t), z, kTwoPi);
        worst = std::max(worst, abs(us + phi) / abs(phi));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("scattered field reciprocity") {
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::ellipse, {0, 0}, {1.5, 1.0}, 0.5), 80);
    const ExteriorSolver solver({mesh}, kTwoPi);
    const Point2 a{2.2, 0.4}, b{-1.3, 1.8};
    std::vector<Point2> pa{a}, pb{b};
    const Complex uab = scattered_field_us(solver, b, pa)(0);
    const Complex uba = scattered_field_us(solver, a, pb)(0);
    CHECK(abs(uab - uba) <= 1e-6 * abs(uab));
}

TEST_CASE("eval_field basics") {
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::disk, {0, 0}, {1.0, 0.0}, 1.0), 64);

    SUBCASE("zero density gives zero field") {
        SurfaceDensity d;
        d.boundary = ExteriorSolver({mesh}, kTwoPi).boundary_ptr();
        d.values = VectorXcd::Zero(64);
        d.kind = LayerKind::single_layer;
        d.k = kTwoPi;
        std::vector<Point2> pts{{2, 0}, {0, 3}};
        CHECK(eval_field(d, pts).norm() == 0.0);
    }

    SUBCASE("far-field 1/sqrt(r) decay") {
        const ExteriorSolver solver({mesh}, kTwoPi);
        const SurfaceDensity psi = solver.solve(-solver.boundary_point_source({3.0, 0.0}));
        for (double dist : {100.0, 250.0}) {
            std::vector<Point2> pts{polar(dist, 1.1), polar(2.0 * dist, 1.1)};
            const VectorXcd u = eval_field(psi, pts);
            CHECK(abs(u(1)) == doctest::Approx(abs(u(0)) / std::sqrt(2.0)).epsilon(0.05));
        }
    }

    SUBCASE("points hugging the boundary are refused") {
        const ExteriorSolver solver({mesh}, kTwoPi);
        const SurfaceDensity psi = solver.solve(-solver.boundary_point_source({3.0, 0.0}));
        std::vector<Point2> pts{{0.5 + 1e-4, 0.0}};
        CHECK_THROWS_AS(eval_field(psi, pts), std::domain_error);
    }
}

TEST_CASE("eval_field matches a refined-quadrature oracle for a smooth density") {
    const BoundaryCurve curve = make_curve(CurveKind::ellipse, {0, 0}, {1.5, 1.0}, 1.0);
    auto density_fn = [](double t) { return Complex(std::exp(std::cos(t)), std::sin(2.0 * t)); };
    std::vector<Point2> pts{{2.5, 0.2}, {-1.8, 1.4}, {0.1, -2.6}};

    auto potential = [&](int M) {
        const BoundaryMesh m = discretize(curve, M);
        VectorXcd g(M);
        for (int j = 0; j < M; ++j) g(j) = density_fn(m.params[j]);
        VectorXcd out(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
            Complex acc = 0.0;
            for (int j = 0; j < M; ++j) acc += m.weights[j] * green2d(pts[i], m.nodes[j], kTwoPi) * g(j);
            out(i) = acc;
        }
        return out;
    };
    const VectorXcd coarse = potential(96);
    const VectorXcd fine = potential(4 * 96);
    CHECK((coarse - fine).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("disk_series_field") {
    const double eps = 1e-2;
    DiskScatterer disk{{70.0, 70.0}, eps, {}};  // radius = lambda*eps, lambda = 1
    const Point2 z{-1e4, 0.0};

    SUBCASE("boundary condition v + phi = 0 on the disk boundary") {
        std::vector<Point2> bpts;
        for (int i = 0; i < 64; ++i) bpts.push_back(disk.center + polar(disk.radius, kTwoPi * i / 64.0));
        const VectorXcd v = disk_series_field(disk, z, bpts, kTwoPi);
        for (int i = 0; i < 64; ++i) {
            const Complex phi = green2d(bpts[i], z, kTwoPi);
            CHECK(abs(v(i) + phi) <= 1e-10 * abs(phi));
        }
    }

    SUBCASE("monopole term dominates, higher modes enter at the eps^2 scale") {
        std::vector<Point2> pts{disk.center + Point2{1.0, 0.5}, disk.center + Point2{-2.0, 1.0}};
        auto truncation_gap = [&](double e) {
            DiskScatterer d{disk.center, e, {}};
            DiskScatterer mono = d;
            mono.policy.max_terms = 1;  // n = 0 only
            const VectorXcd full = disk_series_field(d, z, pts, kTwoPi);
            const VectorXcd m0 = disk_series_field(mono, z, pts, kTwoPi);
            return (full - m0).norm() / full.norm();
        };
        const double g2 = truncation_gap(2.0 * eps), g1 = truncation_gap(eps);
        CHECK(g1 <= 2e-2);       // dipole pair reaches ~2 pi^2 eps^2 |H_0(2 pi eps)|
        CHECK(g2 / g1 >= 3.0);   // quadratic in eps (dipole strength J_1/H_1)
        CHECK(g2 / g1 <= 5.5);
    }

    SUBCASE("agreement with the BEM solve on the same disk") {
        // A disk big enough for a comfortable mesh: radius lambda/4.
        DiskScatterer big{{0.0, 0.0}, 0.25, {}};
        const BoundaryMesh mesh = discretize(make_curve(CurveKind::disk, big.center, {1.0, 0.0}, 0.5), 64);
        const Point2 src{5.0, 2.0};
        std::vector<Point2> pts;
        for (int i = 0; i < 10; ++i) pts.push_back(polar(1.5 + 0.3 * i, 0.61 * i));
        const VectorXcd series = disk_series_field(big, src, pts, kTwoPi);
        const VectorXcd bem = scattered_field_us(mesh, src, pts, kTwoPi);
        for (int i = 0; i < 10; ++i) CHECK(abs(series(i) - bem(i)) <= 1e-6 * abs(series(i)));
    }
}

TEST_CASE("disk_slp_inverse_coeffs") {
    SUBCASE("monopole magnitude at eps = 1e-2") {
        // d_0 = -(2i/pi) / (J_0 H_0)(2 pi eps); direct evaluation gives
        // |d_0| ~ 0.305 (the 1/|log eps| scale of the small-argument law).
        const std::vector<Complex> c{0.0, 1.0, 0.0};
        const auto d = disk_slp_inverse_coeffs(1e-2, kTwoPi, c);
        const Complex expect = Complex(0, -2.0 / M_PI) / (bessel_j(0, kTwoPi * 1e-2) * hankel1(0, kTwoPi * 1e-2));
        CHECK(abs(d[1] - expect) <= 1e-14 * abs(expect));
        CHECK(abs(d[1]) >= 0.3);
        CHECK(abs(d[1]) <= 0.4);
        CHECK(abs(d[0]) == 0.0);
    }

    SUBCASE("even symmetry passes through") {
        std::vector<Complex> c(7, 0.0);
        c[3 - 2] = {0.4, -0.1};
        c[3 + 2] = {0.4, -0.1};
        const auto d = disk_slp_inverse_coeffs(0.03, kTwoPi, c);
        CHECK(abs(d[1] - d[5]) == 0.0);
    }

    SUBCASE("dense-matrix cross-check on 256 nodes") {
        for (double eps : {0.04, 0.01}) {
            const double kd = kTwoPi * eps;  // unit-disk operator at wavenumber 2*pi*eps
            const BoundaryMesh m = unit_circle_mesh(256);
            const MatrixXcd S = assemble_layer(m, m, kd, LayerKind::single_layer).entries;
            const Eigen::PartialPivLU<MatrixXcd> lu(S);
            for (int n = -10; n <= 10; ++n) {
                VectorXcd f(256);
                for (int j = 0; j < 256; ++j) f(j) = std::polar(1.0, n * m.params[j]);
                const VectorXcd g = lu.solve(f);
                Complex dn = 0.0;
                for (int j = 0; j < 256; ++j) dn += g(j) * std::polar(1.0 / 256.0, -n * m.params[j]);
                const Complex expect = Complex(0, -2.0 / M_PI) / (bessel_j(n, kd) * hankel1(n, kd));
                CHECK(abs(dn - expect) <= 1e-6 * abs(expect));
            }
        }
    }
}

TEST_CASE("two-obstacle block solve") {
    const double eps = 1e-2;
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::ellipse, {0, 0}, {1.5, 1.0}, 0.5), 80);
    const ExteriorSolver obstacle({mesh}, kTwoPi);
    DiskScatterer disk{polar(100.0, 2.0), eps, {}};
    const TwoObstacleSolver solver(obstacle, disk);
    const Point2 z = polar(1e4, M_PI);

    SUBCASE("boundary residual on both boundaries") {
        const auto sol = solver.solve(-obstacle.boundary_point_source(z), -solver.point_source_disk_coeffs(z));

        // test-side disk single-layer potential from the Fourier density
        auto disk_potential = [&](const Point2& x) {
            const Point2 v = x - disk.center;
            const int N = solver.modes();
            Complex acc = 0.0;
            for (int m = -N; m <= N; ++m)
                acc += sol.disk_coeffs(m + N) * bessel_j(m, kTwoPi * disk.radius) *
                       hankel1(m, kTwoPi * v.norm()) * std::polar(1.0, m * v.angle());
            return Complex(0, 0.5 * M_PI * disk.radius) * acc;
        };

        // obstacle midpoints via the trace machinery
        const double h = 2.0 * M_PI / mesh.size();
        double worst = 0.0;
        for (int i = 0; i < mesh.size(); i += 7) {
            const double t = h * (i + 0.5);
            const Point2 x = mesh.curve.position(t);
            const Complex w =
                boundary_trace(mesh, sol.obstacle_density.values, t, kTwoPi, obstacle.eta()) +
                disk_potential(x);
            const Complex phi = green2d(x, z, kTwoPi);
            worst = std::max(worst, abs(w + phi) / abs(phi));
        }
        CHECK(worst <= 1e-4);

        // disk boundary points: full field (obstacle part is smooth there)
        double worst_disk = 0.0;
        for (int i = 0; i < 32; ++i) {
            std::vector<Point2> pt{disk.center + polar(disk.radius, kTwoPi * i / 32.0)};
            const Complex w = solver.evaluate(sol, pt)(0);
            const Complex phi = green2d(pt[0], z, kTwoPi);
            worst_disk = std::max(worst_disk, abs(w + phi) / abs(phi));
        }
        CHECK(worst_disk <= 1e-4);
    }

    SUBCASE("disk removed reduces to the plain scattered field exactly") {
        DiskScatterer none{{50.0, 50.0}, 0.0, {}};
        const TwoObstacleSolver degenerate(obstacle, none);
        std::vector<Point2> pts;
        for (int j = 0; j < 8; ++j) pts.push_back(polar(5.0, kTwoPi * j / 8.0));
        const VectorXcd w = scattered_field_ws(degenerate, z, pts);
        const VectorXcd us = scattered_field_us(obstacle, z, pts);
        CHECK((w - us).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("scattered-field decomposition: w ~ u^s + v^i + v^s with a 10x smaller remainder") {
        std::vector<Point2> sensors;
        for (int j = 0; j < 16; ++j) sensors.push_back(polar(5.0, kTwoPi * j / 16.0));

        const VectorXcd w = scattered_field_ws(solver, z, sensors);
        const VectorXcd us = scattered_field_us(obstacle, z, sensors);
        const VectorXcd vi = disk_series_field(disk, z, sensors, kTwoPi);

        // v^s: scattering of v^i by the obstacle
        const VectorXcd vi_on_D =
            disk_series_field(disk, z, std::span<const Point2>(mesh.nodes), kTwoPi);
        const VectorXcd vs = eval_field(obstacle.solve(-vi_on_D), sensors);

        const double err = (w - us - vi - vs).norm();
        const double v_scale = (vi + vs).norm();
        CHECK(err * 10.0 <= v_scale);
    }
}

TEST_CASE("contraction norm decays like eps^p") {
    const BoundaryMesh mesh = discretize(make_curve(CurveKind::ellipse, {0, 0}, {1.5, 1.0}, 0.5), 64);
    const ExteriorSolver obstacle({mesh}, kTwoPi);
    std::vector<double> norms;
    for (double eps : {0.04, 0.02, 0.01}) {
        DiskScatterer disk{polar(std::pow(eps, -1.0), 2.0), eps, {}};
        norms.push_back(TwoObstacleSolver(obstacle, disk).contraction_norm());
    }
    CHECK(norms[0] < 1.0);
    CHECK(norms[1] <= 0.7 * norms[0]);
    CHECK(norms[2] <= 0.7 * norms[1]);
}
