#include "plsm/forward.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace plsm {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

double resolve_eta(double k, double eta) { return eta > 0.0 ? eta : k; }

/// Kress weights R_{|i-j|} for the periodic quadrature of
/// ln(4 sin^2((t-tau)/2)) against trigonometric interpolants, M even.
std::vector<double> kress_log_weights(int M) {
    const int n = M / 2;
    std::vector<double> R(M);
    for (int d = 0; d < M; ++d) {
        double s = 0.0;
        for (int m = 1; m < n; ++m) s += std::cos(2.0 * M_PI * m * d / M) / m;
        R[d] = -(2.0 * M_PI / n) * s - (M_PI / (n * n)) * ((d & 1) ? -1.0 : 1.0);
    }
    return R;
}

double log4sin2(double dt) {
    const double s = 2.0 * std::sin(0.5 * dt);
    return std::log(s * s);
}

/// Single-layer parametrized kernel (i/4) H_0(k r) |x'(tau)| and its
/// log-splitting companion -(1/4pi) J_0(k r) |x'(tau)|.
struct SingleLayerKernel {
    double k;
    Complex full(double r, double jac) const {
        return Complex(0.0, 0.25) * hankel1(0, k * r) * jac;
    }
    double log_part(double r, double jac) const { return -bessel_j(0, k * r) * jac / (4.0 * M_PI); }
    Complex smooth_diag(double jac) const {
        return (Complex(0.0, 0.25) - (kEulerGamma + std::log(0.5 * k * jac)) / (2.0 * M_PI)) * jac;
    }
};

/// Double-layer parametrized kernel (ik/4) H_1(k r) <x - y, nu(y)> / r with
/// the Jacobian folded into nu(y)|x'(tau)| = (y2', -y1').
struct DoubleLayerKernel {
    double k;
    Complex full(double r, double g) const {
        return Complex(0.0, 0.25 * k) * hankel1(1, k * r) * g / r;
    }
    double log_part(double r, double g) const { return -k * bessel_j(1, k * r) * g / (4.0 * M_PI * r); }
    // lim g/r^2 = (x1'' x2' - x2'' x1') / (2 |x'|^2), divided by 2 pi.
    double smooth_diag(const Point2& d1, const Point2& d2) const {
        const double cross = d2.x * d1.y - d2.y * d1.x;
        return cross / (4.0 * M_PI * dot(d1, d1));
    }
};

void self_blocks(const BoundaryMesh& mesh, double k, Eigen::MatrixXcd& S, Eigen::MatrixXcd* K) {
    const int M = mesh.size();
    if (M % 2 != 0) throw std::invalid_argument("assemble_layer: node count must be even for the log quadrature");
    const std::vector<double> R = kress_log_weights(M);
    const double h = 2.0 * M_PI / M;
    const SingleLayerKernel sl{k};
    const DoubleLayerKernel dl{k};
    S.resize(M, M);
    if (K) K->resize(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            if (i == j) {
                // M1(t,t) = -J_0(0)|x'|/(4 pi) = -|x'|/(4 pi)
                S(i, i) = R[0] * (-mesh.jacobians[i] / (4.0 * M_PI)) + h * sl.smooth_diag(mesh.jacobians[i]);
                if (K) {
                    const Point2 d1 = mesh.curve.derivative(mesh.params[i]);
                    const Point2 d2 = mesh.curve.second_derivative(mesh.params[i]);
                    (*K)(i, i) = h * dl.smooth_diag(d1, d2);
                }
                continue;
            }
            const double r = distance(mesh.nodes[i], mesh.nodes[j]);
            const double lg = log4sin2(mesh.params[i] - mesh.params[j]);
            const double s1 = sl.log_part(r, mesh.jacobians[j]);
            S(i, j) = R[std::abs(i - j)] * s1 + h * (sl.full(r, mesh.jacobians[j]) - s1 * lg);
            if (K) {
                const Point2 nu_jac = mesh.jacobians[j] * mesh.normals[j];
                const double g = dot(mesh.nodes[i] - mesh.nodes[j], nu_jac);
                const double l1 = dl.log_part(r, g);
                (*K)(i, j) = R[std::abs(i - j)] * l1 + h * (dl.full(r, g) - l1 * lg);
            }
        }
    }
}

void check_disjoint(const BoundaryMesh& source, std::span<const Point2> targets, bool targets_are_mesh) {
    double min_d = std::numeric_limits<double>::infinity();
    for (const Point2& t : targets)
        for (const Point2& s : source.nodes) min_d = std::min(min_d, distance(t, s));
    double spacing = *std::max_element(source.weights.begin(), source.weights.end());
    if (targets_are_mesh && min_d < 0.5 * spacing)
        throw std::invalid_argument("assemble_layer: distinct meshes overlap or nearly touch");
}

bool same_nodes(const BoundaryMesh& a, const BoundaryMesh& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a.nodes[i].x != b.nodes[i].x || a.nodes[i].y != b.nodes[i].y) return false;
    return true;
}

}  // namespace

LayerMatrix assemble_layer(const BoundaryMesh& source, const BoundaryMesh& target, double k,
                           LayerKind kind, double eta) {
    eta = resolve_eta(k, eta);
    if (same_nodes(source, target)) {
        Eigen::MatrixXcd S, K;
        if (kind == LayerKind::single_layer) {
            self_blocks(source, k, S, nullptr);
            return {std::move(S), kind};
        }
        self_blocks(source, k, S, &K);
        Eigen::MatrixXcd A = K - Complex(0.0, eta) * S;
        A.diagonal().array() += 0.5;  // exterior trace jump of the double layer
        return {std::move(A), kind};
    }
    check_disjoint(source, target.nodes, true);
    return assemble_layer(source, std::span<const Point2>(target.nodes), k, kind, eta);
}

LayerMatrix assemble_layer(const BoundaryMesh& source, std::span<const Point2> target, double k,
                           LayerKind kind, double eta) {
    eta = resolve_eta(k, eta);
    const int M = source.size();
    const int P = int(target.size());
    Eigen::MatrixXcd A(P, M);
    for (int i = 0; i < P; ++i) {
        for (int j = 0; j < M; ++j) {
            const double r = distance(target[i], source.nodes[j]);
            if (r == 0.0) throw std::invalid_argument("assemble_layer: target point lies on the source mesh");
            const Complex sl = green2d(target[i], source.nodes[j], k);
            if (kind == LayerKind::single_layer) {
                A(i, j) = source.weights[j] * sl;
            } else {
                const double g = dot(target[i] - source.nodes[j], source.normals[j]);
                const Complex dlk = Complex(0.0, 0.25 * k) * hankel1(1, k * r) * g / r;
                A(i, j) = source.weights[j] * (dlk - Complex(0.0, eta) * sl);
            }
        }
    }
    return {std::move(A), kind};
}

ExteriorSolver::ExteriorSolver(std::vector<BoundaryMesh> parts, double k, double eta)
    : parts_(std::move(parts)), k_(k), eta_(resolve_eta(k, eta)) {
    if (parts_.empty()) throw std::invalid_argument("ExteriorSolver: need at least one boundary part");
    auto bnd = std::make_shared<StackedBoundary>();
    for (const auto& m : parts_) {
        bnd->part_offsets.push_back(bnd->size());
        bnd->nodes.insert(bnd->nodes.end(), m.nodes.begin(), m.nodes.end());
        bnd->normals.insert(bnd->normals.end(), m.normals.begin(), m.normals.end());
        bnd->weights.insert(bnd->weights.end(), m.weights.begin(), m.weights.end());
    }
    bnd->spacings = bnd->weights;
    boundary_ = bnd;

    const int n = bnd->size();
    Eigen::MatrixXcd A(n, n);
    for (size_t pi = 0; pi < parts_.size(); ++pi) {
        for (size_t pj = 0; pj < parts_.size(); ++pj) {
            const int r0 = bnd->part_offsets[pi];
            const int c0 = bnd->part_offsets[pj];
            if (pi == pj) {
                A.block(r0, c0, parts_[pi].size(), parts_[pi].size()) =
                    assemble_layer(parts_[pi], parts_[pi], k_, LayerKind::combined, eta_).entries;
            } else {
                A.block(r0, c0, parts_[pi].size(), parts_[pj].size()) =
                    assemble_layer(parts_[pj], std::span<const Point2>(parts_[pi].nodes), k_,
                                   LayerKind::combined, eta_)
                        .entries;
            }
        }
    }

    lu_.compute(A);

    // Condition estimate: power iteration for sigma_max, inverse iteration
    // through the factorization for sigma_min.
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    for (int i = 0; i < n; ++i) v(i) += Complex(0.0, i / double(8 * n));
    v.normalize();
    double smax = 0.0;
    for (int it = 0; it < 12; ++it) {
        Eigen::VectorXcd w = A * v;
        v = A.adjoint() * w;
        smax = std::sqrt(v.norm());
        v.normalize();
    }
    Eigen::VectorXcd u = Eigen::VectorXcd::Ones(n).normalized();
    double smin_inv = 1.0;
    for (int it = 0; it < 12; ++it) {
        Eigen::VectorXcd w = lu_.solve(u);
        u = lu_.adjoint().solve(w);
        smin_inv = std::sqrt(u.norm());
        u.normalize();
    }
    cond_ = smax * smin_inv;
    if (!std::isfinite(cond_) || cond_ > 1e12)
        throw std::runtime_error("ExteriorSolver: combined operator is numerically singular, cond ~ " +
                                 std::to_string(cond_));
}

SurfaceDensity ExteriorSolver::solve(const Eigen::VectorXcd& dirichlet_data) const {
    if (dirichlet_data.size() != boundary_->size())
        throw std::invalid_argument("ExteriorSolver::solve: data size does not match node count");
    if (!dirichlet_data.allFinite())
        throw std::invalid_argument("ExteriorSolver::solve: boundary data must be finite");
    SurfaceDensity d;
    d.boundary = boundary_;
    d.values = lu_.solve(dirichlet_data);
    d.kind = LayerKind::combined;
    d.k = k_;
    d.eta = eta_;
    return d;
}

Eigen::VectorXcd ExteriorSolver::boundary_point_source(const Point2& z) const {
    const int n = boundary_->size();
    Eigen::VectorXcd f(n);
    for (int i = 0; i < n; ++i) f(i) = green2d(boundary_->nodes[i], z, k_);
    return f;
}

Eigen::VectorXcd eval_field(const SurfaceDensity& density, std::span<const Point2> points) {
    const StackedBoundary& b = *density.boundary;
    const double k = density.k;
    Eigen::VectorXcd out(points.size());
    for (size_t p = 0; p < points.size(); ++p) {
        Complex acc = 0.0;
        for (int j = 0; j < b.size(); ++j) {
            const double r = distance(points[p], b.nodes[j]);
            if (r < 0.5 * b.spacings[j])
                throw std::domain_error(
                    "eval_field: point within half a mesh spacing of the boundary; "
                    "use boundary traces instead");
            const Complex sl = Complex(0.0, 0.25) * hankel1(0, k * r);
            if (density.kind == LayerKind::single_layer) {
                acc += b.weights[j] * sl * density.values(j);
            } else {
                const double g = dot(points[p] - b.nodes[j], b.normals[j]);
                const Complex dlk = Complex(0.0, 0.25 * k) * hankel1(1, k * r) * g / r;
                acc += b.weights[j] * (dlk - Complex(0.0, density.eta) * sl) * density.values(j);
            }
        }
        out(p) = acc;
    }
    return out;
}

SurfaceDensity solve_dirichlet(const BoundaryMesh& mesh, const Eigen::VectorXcd& boundary_data,
                               double k, double eta) {
    ExteriorSolver solver({mesh}, k, eta);
    return solver.solve(boundary_data);
}

Eigen::VectorXcd scattered_field_us(const ExteriorSolver& solver, const Point2& z,
                                    std::span<const Point2> points) {
    const SurfaceDensity psi = solver.solve(-solver.boundary_point_source(z));
    return eval_field(psi, points);
}

Eigen::VectorXcd scattered_field_us(const BoundaryMesh& mesh, const Point2& z,
                                    std::span<const Point2> points, double k) {
    ExteriorSolver solver({mesh}, k);
    return scattered_field_us(solver, z, points);
}

namespace {

/// J_0..J_N and Y_0..Y_N at one argument (GSL array routines).
void bessel_arrays(int N, double x, std::vector<double>& J, std::vector<double>& Y) {
    J.resize(N + 1);
    Y.resize(N + 1);
    if (N == 0) {
        J[0] = bessel_j(0, x);
        Y[0] = detail::bessel_y(0, x);
        return;
    }
    if (gsl_sf_bessel_Jn_array(0, N, x, J.data()) != 0)
        for (int n = 0; n <= N; ++n) J[n] = bessel_j(n, x);
    if (gsl_sf_bessel_Yn_array(0, N, x, Y.data()) != 0)
        for (int n = 0; n <= N; ++n) Y[n] = detail::bessel_y(n, x);
}

}  // namespace

Eigen::VectorXcd disk_series_field(const DiskScatterer& disk, const Point2& z,
                                   std::span<const Point2> points, double k,
                                   SeriesStatus* status) {
    if (!(disk.radius > 0.0)) throw std::invalid_argument("disk_series_field: radius must be positive");
    const double a = k * disk.radius;
    const Point2 zc = z - disk.center;
    const double dist_z = zc.norm();
    if (dist_z <= disk.radius) throw std::domain_error("disk_series_field: source inside the disk");
    const double psi_z = zc.angle();

    // Coefficients H_n(k d) J_n(a) / H_n(a); the n-th term magnitude on and
    // outside the boundary is bounded by |H_n(k d) J_n(a)|.
    const TruncationPolicy& pol = disk.policy;
    std::vector<Complex> coeff;
    SeriesStatus st{0, true};
    int small_run = 0;
    const double b0 = std::abs(hankel1(0, k * dist_z) * bessel_j(0, a));
    for (int n = 0; n < pol.max_terms; ++n) {
        const Complex hz = hankel1(n, k * dist_z);
        const double ja = bessel_j(n, a);
        const Complex ha = hankel1(n, a);
        Complex c = hz * ja / ha;
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) c = 0.0;
        coeff.push_back(c);
        ++st.terms_used;
        small_run = (n > 0 && std::abs(hz) * std::abs(ja) < pol.rel_tol * b0) ? small_run + 1 : 0;
        if (small_run >= 2) {
            st.hit_cap = false;
            break;
        }
    }
    if (st.hit_cap) detail::warn_truncation("disk_series_field");
    if (status) *status = st;

    const int N = int(coeff.size()) - 1;
    Eigen::VectorXcd out(points.size());
    std::vector<double> Jx, Yx;
    for (size_t p = 0; p < points.size(); ++p) {
        const Point2 xc = points[p] - disk.center;
        const double r = xc.norm();
        if (r < disk.radius * (1.0 - 1e-12))
            throw std::domain_error("disk_series_field: evaluation point inside the disk");
        const double theta = xc.angle();
        bessel_arrays(N, k * r, Jx, Yx);
        Complex acc = coeff[0] * Complex(Jx[0], Yx[0]);
        for (int n = 1; n <= N; ++n)
            acc += 2.0 * coeff[n] * Complex(Jx[n], Yx[n]) * std::cos(n * (theta - psi_z));
        out(p) = Complex(0.0, -0.25) * acc;
    }
    return out;
}

std::vector<Complex> disk_slp_inverse_coeffs(double eps, double k, const std::vector<Complex>& c) {
    (void)k;  // k|y| on the scaled unit disk is 2*pi*eps for every k
    if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("disk_slp_inverse_coeffs: eps must lie in (0, 1/2)");
    if (c.size() % 2 == 0) throw std::invalid_argument("disk_slp_inverse_coeffs: centered layout needs odd size");
    const int N = int(c.size()) / 2;
    const double x = 2.0 * M_PI * eps;
    std::vector<Complex> d(c.size());
    for (int m = -N; m <= N; ++m) {
        const Complex jh = bessel_j(m, x) * hankel1(m, x);
        d[m + N] = Complex(0.0, -2.0 / M_PI) * c[m + N] / jh;
    }
    return d;
}

TwoObstacleSolver::TwoObstacleSolver(const ExteriorSolver& obstacle, const DiskScatterer& disk)
    : obstacle_(obstacle), disk_(disk) {
    const double k = obstacle.k();
    const double a = k * disk.radius;
    const StackedBoundary& bnd = obstacle.boundary();
    const int M = bnd.size();

    if (disk.radius == 0.0) {
        // Degenerate "disk removed" solver: zero coupling blocks, so the
        // block elimination collapses to the plain obstacle solve.
        n_modes_ = 0;
        sigma_ = Eigen::VectorXcd::Ones(1);
        T_ = Eigen::MatrixXcd::Zero(M, 1);
        B_ = Eigen::MatrixXcd::Zero(1, M);
        contraction_ = 0.0;
        lu_IA_.compute(Eigen::MatrixXcd::Identity(M, M));
        return;
    }

    double min_dist = std::numeric_limits<double>::infinity();
    for (const Point2& n : bnd.nodes) min_dist = std::min(min_dist, distance(n, disk.center));
    if (min_dist <= disk.radius)
        throw std::invalid_argument("TwoObstacleSolver: disk intersects the obstacle");
    if (disk.radius / min_dist > 0.1)
        std::fprintf(stderr, "[plsm] warning: disk radius is more than a tenth of its distance to the obstacle\n");

    // Mode cutoff from the disk's scattering strengths |J_n(a)/H_n(a)|.
    const TruncationPolicy& pol = disk.policy;
    const double t0 = std::abs(bessel_j(0, a) / hankel1(0, a));
    int N = 2;
    int small_run = 0;
    for (int n = 1; n <= pol.max_terms; ++n) {
        N = n;
        const Complex ha = hankel1(n, a);
        const double tn = std::isfinite(ha.imag()) ? std::abs(bessel_j(n, a) / ha) : 0.0;
        small_run = (tn < pol.rel_tol * t0) ? small_run + 1 : 0;
        if (small_run >= 2) break;
        if (n == pol.max_terms) detail::warn_truncation("TwoObstacleSolver modes");
    }
    n_modes_ = N;

    sigma_.resize(2 * N + 1);
    for (int m = -N; m <= N; ++m)
        sigma_(m + N) = Complex(0.0, M_PI * disk.radius / 2.0) * bessel_j(m, a) * hankel1(m, a);

    // T: disk Fourier density -> single-layer values at obstacle nodes.
    T_.resize(M, 2 * N + 1);
    std::vector<double> Jd, Yd, Ja, Ya;
    bessel_arrays(N, a, Ja, Ya);
    for (int i = 0; i < M; ++i) {
        const Point2 v = bnd.nodes[i] - disk.center;
        const double r = v.norm(), th = v.angle();
        bessel_arrays(N, k * r, Jd, Yd);
        for (int m = -N; m <= N; ++m) {
            const int am = std::abs(m);
            const Complex hm = Complex(Jd[am], Yd[am]);
            const Complex phase = std::polar(1.0, m * th);
            T_(i, m + N) = Complex(0.0, M_PI * disk.radius / 2.0) * Ja[am] * hm * phase;
        }
    }

    // B: obstacle density -> Fourier data of its potential on the disk circle
    // (evaluate at Q equispaced points, project; the field there is smooth and
    // effectively band-limited, so the projection is exact to round-off).
    const int Q = std::max(32, 4 * N + 4);
    std::vector<Point2> ring(Q);
    for (int q = 0; q < Q; ++q)
        ring[q] = disk.center + polar(disk.radius, 2.0 * M_PI * q / Q);
    Eigen::MatrixXcd E(Q, M);
    for (int q = 0; q < Q; ++q) {
        for (int j = 0; j < M; ++j) {
            const double r = distance(ring[q], bnd.nodes[j]);
            const Complex sl = Complex(0.0, 0.25) * hankel1(0, k * r);
            const double g = dot(ring[q] - bnd.nodes[j], bnd.normals[j]);
            const Complex dlk = Complex(0.0, 0.25 * k) * hankel1(1, k * r) * g / r;
            E(q, j) = bnd.weights[j] * (dlk - Complex(0.0, obstacle.eta()) * sl);
        }
    }
    B_.resize(2 * N + 1, M);
    for (int m = -N; m <= N; ++m) {
        Eigen::RowVectorXcd proj(Q);
        for (int q = 0; q < Q; ++q) proj(q) = std::polar(1.0 / Q, -m * 2.0 * M_PI * q / Q);
        B_.row(m + N) = proj * E;
    }

    // Contraction block A_eps = A_D^{-1} T S_eps^{-1} B and its norm.
    Eigen::MatrixXcd C = T_ * sigma_.cwiseInverse().asDiagonal() * B_;
    Eigen::MatrixXcd A_eps = obstacle.apply_inverse(C);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(M);
    for (int i = 0; i < M; ++i) v(i) += Complex(0.0, i / double(8 * M));
    v.normalize();
    for (int it = 0; it < 15; ++it) {
        Eigen::VectorXcd w = A_eps * v;
        v = A_eps.adjoint() * w;
        contraction_ = std::sqrt(v.norm());
        v.normalize();
    }
    if (!(contraction_ < 1.0))
        throw std::invalid_argument(
            "TwoObstacleSolver: contraction norm " + std::to_string(contraction_) +
            " >= 1; obstacles too close for the block elimination");
    Eigen::MatrixXcd IA = Eigen::MatrixXcd::Identity(M, M) - A_eps;
    lu_IA_.compute(IA);
}

TwoObstacleSolver::Solution TwoObstacleSolver::solve(const Eigen::VectorXcd& f_D,
                                                     const Eigen::VectorXcd& f_eps) const {
    if (f_eps.size() != sigma_.size())
        throw std::invalid_argument("TwoObstacleSolver::solve: disk data has wrong mode count");
    const Eigen::VectorXcd d0 = f_eps.cwiseQuotient(sigma_);
    const Eigen::VectorXcd rhs = obstacle_.apply_inverse(Eigen::VectorXcd(f_D - T_ * d0));
    Solution sol;
    sol.obstacle_density.boundary = obstacle_.boundary_ptr();
    sol.obstacle_density.values = lu_IA_.solve(rhs);
    sol.obstacle_density.kind = LayerKind::combined;
    sol.obstacle_density.k = obstacle_.k();
    sol.obstacle_density.eta = obstacle_.eta();
    sol.disk_coeffs = (f_eps - B_ * sol.obstacle_density.values).cwiseQuotient(sigma_);
    return sol;
}

Eigen::VectorXcd TwoObstacleSolver::evaluate(const Solution& sol, std::span<const Point2> points) const {
    Eigen::VectorXcd out = eval_field(sol.obstacle_density, points);
    if (disk_.radius == 0.0) return out;
    const double k = obstacle_.k();
    const double a = k * disk_.radius;
    const int N = n_modes_;
    std::vector<double> Ja, Ya, Jx, Yx;
    bessel_arrays(N, a, Ja, Ya);
    for (size_t p = 0; p < points.size(); ++p) {
        const Point2 v = points[p] - disk_.center;
        const double r = v.norm();
        if (r < disk_.radius * (1.0 - 1e-12))
            throw std::domain_error("TwoObstacleSolver::evaluate: point inside the disk");
        const double th = v.angle();
        bessel_arrays(N, k * r, Jx, Yx);
        Complex acc = 0.0;
        for (int m = -N; m <= N; ++m) {
            const int am = std::abs(m);
            acc += sol.disk_coeffs(m + N) * Ja[am] * Complex(Jx[am], Yx[am]) * std::polar(1.0, m * th);
        }
        out(p) += Complex(0.0, M_PI * disk_.radius / 2.0) * acc;
    }
    return out;
}

Eigen::VectorXcd TwoObstacleSolver::point_source_disk_coeffs(const Point2& z) const {
    if (disk_.radius == 0.0) return Eigen::VectorXcd::Zero(1);
    const double k = obstacle_.k();
    const double a = k * disk_.radius;
    const Point2 zc = z - disk_.center;
    const double d = zc.norm(), psi = zc.angle();
    const int N = n_modes_;
    std::vector<double> Jd, Yd, Ja, Ya;
    bessel_arrays(N, a, Ja, Ya);
    bessel_arrays(N, k * d, Jd, Yd);
    Eigen::VectorXcd c(2 * N + 1);
    for (int m = -N; m <= N; ++m) {
        const int am = std::abs(m);
        c(m + N) = Complex(0.0, 0.25) * Complex(Jd[am], Yd[am]) * Ja[am] * std::polar(1.0, -m * psi);
    }
    return c;
}

Eigen::VectorXcd scattered_field_ws(const TwoObstacleSolver& solver, const Point2& z,
                                    std::span<const Point2> points) {
    // Both boundaries carry the sound-soft data -phi(., z).
    const Eigen::VectorXcd f_D = -solver.obstacle().boundary_point_source(z);
    const Eigen::VectorXcd f_eps = -solver.point_source_disk_coeffs(z);
    return solver.evaluate(solver.solve(f_D, f_eps), points);
}

void dump_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_matrix_csv: cannot open " + path);
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", m(i, j).real(), m(i, j).imag());
            out << buf << (j + 1 < m.cols() ? "," : "");
        }
        out << "\n";
    }
}

}  // namespace plsm
