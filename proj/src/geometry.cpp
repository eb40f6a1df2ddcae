#include "plsm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace plsm {

namespace {

// Base shapes before centroid shift / rotation / scaling.
Point2 base_position(CurveKind kind, const std::array<double, 2>& p, double t) {
    switch (kind) {
        case CurveKind::disk:
            return {p[0] * std::cos(t), p[0] * std::sin(t)};
        case CurveKind::ellipse:
            return {p[0] * std::cos(t), p[1] * std::sin(t)};
        case CurveKind::kite:
            return {p[0] * (std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65), p[0] * 1.5 * std::sin(t)};
    }
    throw std::invalid_argument("unsupported curve kind");
}

Point2 base_derivative(CurveKind kind, const std::array<double, 2>& p, double t) {
    switch (kind) {
        case CurveKind::disk:
            return {-p[0] * std::sin(t), p[0] * std::cos(t)};
        case CurveKind::ellipse:
            return {-p[0] * std::sin(t), p[1] * std::cos(t)};
        case CurveKind::kite:
            return {p[0] * (-std::sin(t) - 1.3 * std::sin(2.0 * t)), p[0] * 1.5 * std::cos(t)};
    }
    throw std::invalid_argument("unsupported curve kind");
}

Point2 base_second_derivative(CurveKind kind, const std::array<double, 2>& p, double t) {
    switch (kind) {
        case CurveKind::disk:
            return {-p[0] * std::cos(t), -p[0] * std::sin(t)};
        case CurveKind::ellipse:
            return {-p[0] * std::cos(t), -p[1] * std::sin(t)};
        case CurveKind::kite:
            return {p[0] * (-std::cos(t) - 2.6 * std::cos(2.0 * t)), -p[0] * 1.5 * std::sin(t)};
    }
    throw std::invalid_argument("unsupported curve kind");
}

/// Area centroid of the unit-scale base shape via Green's theorem
/// (oint x (x dy - y dx) = 3 * integral of x over the enclosed region).
Point2 unit_base_centroid(CurveKind kind) {
    const std::array<double, 2> p{1.0, 1.0};
    const int n = 4096;
    double area = 0.0, mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        const Point2 g = base_position(kind, p, t);
        const Point2 d = base_derivative(kind, p, t);
        const double cross = g.x * d.y - g.y * d.x;  // x dy - y dx
        area += 0.5 * cross;
        mx += g.x * cross / 3.0;
        my += g.y * cross / 3.0;
    }
    return {mx / area, my / area};
}

Point2 base_centroid(CurveKind kind, const std::array<double, 2>& p) {
    if (kind == CurveKind::disk || kind == CurveKind::ellipse) return {0.0, 0.0};
    static const Point2 unit_kite = unit_base_centroid(CurveKind::kite);
    return p[0] * unit_kite;  // centroid scales linearly with the shape scale
}

Point2 rotate(Point2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double pair_distance(const BoundaryCurve& c, double t, double s) { return distance(c.position(t), c.position(s)); }

}  // namespace

Point2 BoundaryCurve::position(double t) const {
    const Point2 g = base_position(kind, params, t) - base_centroid(kind, params);
    return center + rotate(scale * g, rotation);
}

Point2 BoundaryCurve::derivative(double t) const {
    return rotate(scale * base_derivative(kind, params, t), rotation);
}

Point2 BoundaryCurve::second_derivative(double t) const {
    return rotate(scale * base_second_derivative(kind, params, t), rotation);
}

double BoundaryCurve::diameter() const {
    if (kind == CurveKind::disk) return 2.0 * scale * params[0];
    // Coarse scan over parameter pairs, then alternating golden-section
    // refinement of the smooth 2-variable maximum.
    const int n = 512;
    double best = 0.0, bt = 0.0, bs = 0.0;
    std::vector<Point2> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = position(2.0 * M_PI * i / n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = distance(pts[i], pts[j]);
            if (d > best) {
                best = d;
                bt = 2.0 * M_PI * i / n;
                bs = 2.0 * M_PI * j / n;
            }
        }
    const double h0 = 2.0 * M_PI / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto refine1d = [&](double& u, double other, bool u_is_t) {
        double a = u - h0, b = u + h0;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = u_is_t ? pair_distance(*this, x1, other) : pair_distance(*this, other, x1);
        double f2 = u_is_t ? pair_distance(*this, x2, other) : pair_distance(*this, other, x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + gr * (b - a);
                f2 = u_is_t ? pair_distance(*this, x2, other) : pair_distance(*this, other, x2);
            } else {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - gr * (b - a);
                f1 = u_is_t ? pair_distance(*this, x1, other) : pair_distance(*this, other, x1);
            }
        }
        u = 0.5 * (a + b);
    };
    for (int sweep = 0; sweep < 6; ++sweep) {
        refine1d(bt, bs, true);
        refine1d(bs, bt, false);
    }
    return pair_distance(*this, bt, bs);
}

BoundaryCurve BoundaryCurve::scaled_to(double size) const {
    if (!(size > 0.0)) throw std::invalid_argument("scaled_to: size must be positive");
    BoundaryCurve out = *this;
    out.scale = scale * size / diameter();
    return out;
}

double BoundaryCurve::perimeter() const {
    const int n = 8192;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += derivative(2.0 * M_PI * i / n).norm();
    return s * 2.0 * M_PI / n;
}

BoundaryCurve make_curve(CurveKind kind, Point2 center, std::array<double, 2> params,
                         double scale_to_size, double rotation) {
    if (!(scale_to_size > 0.0)) throw std::invalid_argument("make_curve: scale_to_size must be positive");
    if (!(params[0] > 0.0)) throw std::invalid_argument("make_curve: shape parameter must be positive");
    if (kind == CurveKind::ellipse && !(params[1] > 0.0))
        throw std::invalid_argument("make_curve: ellipse needs two positive semi-axes");
    BoundaryCurve c{kind, center, params, rotation, 1.0};
    return c.scaled_to(scale_to_size);
}

BoundaryMesh discretize(const BoundaryCurve& curve, int M) {
    if (M < 8) throw std::invalid_argument("discretize: need at least 8 nodes");
    BoundaryMesh mesh;
    mesh.curve = curve;
    mesh.params.resize(M);
    mesh.nodes.resize(M);
    mesh.normals.resize(M);
    mesh.jacobians.resize(M);
    mesh.weights.resize(M);
    const double h = 2.0 * M_PI / M;
    for (int i = 0; i < M; ++i) {
        const double t = h * i;
        mesh.params[i] = t;
        mesh.nodes[i] = curve.position(t);
        const Point2 d = curve.derivative(t);
        const double j = d.norm();
        mesh.jacobians[i] = j;
        mesh.weights[i] = j * h;
        // Counterclockwise parametrization: outward normal is (y', -x')/|gamma'|.
        mesh.normals[i] = {d.y / j, -d.x / j};
    }
    return mesh;
}

void SceneConfig::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("scene: k must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("scene: eps must lie in (0, 1)");
    if (!(0.0 < p && p < q)) throw std::invalid_argument("scene: need 0 < p < q");
    if (J < 1 || L < 1 || R < 1) throw std::invalid_argument("scene: J, L, R must be >= 1");
    if (!(noise_delta >= 0.0)) throw std::invalid_argument("scene: noise_delta must be >= 0");
    if (!(aperture > 0.0 && aperture <= 2.0 * M_PI + 1e-12))
        throw std::invalid_argument("scene: aperture must lie in (0, 2*pi]");
    if (!(sensor_radius > 0.0)) throw std::invalid_argument("scene: sensor_radius must be positive");
    if (placement == Placement::perturbed_trapezoid && R != 1)
        throw std::invalid_argument("scene: perturbed_trapezoid placement requires R = 1");
}

std::vector<Point2> sensor_ring(const SceneConfig& scene) {
    scene.validate();
    std::vector<Point2> xs(scene.J);
    for (int j = 0; j < scene.J; ++j)
        xs[j] = polar(scene.sensor_radius, scene.aperture * j / double(scene.J));
    return xs;
}

std::vector<std::vector<Point2>> scatterer_positions(const SceneConfig& scene, const Rng& rng) {
    scene.validate();
    const double radius = scene.scatterer_radius();
    std::vector<std::vector<Point2>> out(scene.L);
    for (int l = 0; l < scene.L; ++l) {
        Rng stream = rng.stream(Rng::kPlacement, std::uint64_t(l));
        out[l].resize(scene.R);
        if (scene.placement == Placement::perturbed_trapezoid) {
            const double beta = stream.uniform(0.0, scene.beta_max);
            out[l][0] = polar(radius, 2.0 * M_PI * (l + beta) / scene.L);
        } else {
            for (int r = 0; r < scene.R; ++r) out[l][r] = polar(radius, stream.uniform(0.0, 2.0 * M_PI));
        }
    }
    return out;
}

namespace {

using nlohmann::json;

const char* kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::disk: return "disk";
        case CurveKind::ellipse: return "ellipse";
        case CurveKind::kite: return "kite";
    }
    return "?";
}

CurveKind kind_from(const std::string& s) {
    if (s == "disk") return CurveKind::disk;
    if (s == "ellipse") return CurveKind::ellipse;
    if (s == "kite") return CurveKind::kite;
    throw std::invalid_argument("scene json: unknown curve kind '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) { ok = true; break; }
        if (!ok) throw std::invalid_argument(std::string("scene json: unknown key '") + it.key() + "' in " + what);
    }
}

}  // namespace

std::string scene_to_json(const SceneConfig& s) {
    json j;
    j["k"] = s.k;
    j["lambda"] = s.lambda();
    j["eps"] = s.eps;
    j["p"] = s.p;
    j["q"] = s.q;
    j["theta_z"] = s.theta_z;
    j["J"] = s.J;
    j["sensor_radius"] = s.sensor_radius;
    j["aperture"] = s.aperture;
    j["L"] = s.L;
    j["R"] = s.R;
    j["placement"] = s.placement == Placement::perturbed_trapezoid ? "perturbed_trapezoid" : "uniform_random";
    j["beta_max"] = s.beta_max;
    j["noise_delta"] = s.noise_delta;
    j["seed"] = s.seed;
    j["obstacles"] = json::array();
    for (const auto& c : s.obstacles) {
        json jc;
        jc["kind"] = kind_name(c.kind);
        jc["center"] = {c.center.x, c.center.y};
        jc["params"] = {c.params[0], c.params[1]};
        jc["rotation"] = c.rotation;
        jc["scale"] = c.scale;
        j["obstacles"].push_back(jc);
    }
    return j.dump(2);
}

SceneConfig scene_from_json(const std::string& text) {
    const json j = json::parse(text);
    check_keys(j, {"k", "lambda", "eps", "p", "q", "theta_z", "J", "sensor_radius", "aperture",
                   "L", "R", "placement", "beta_max", "noise_delta", "seed", "obstacles"},
               "scene");
    SceneConfig s;
    if (j.contains("k")) s.k = j.at("k").get<double>();
    if (j.contains("lambda")) {
        const double lam = j.at("lambda").get<double>();
        if (!j.contains("k")) s.k = 2.0 * M_PI / lam;
        else if (std::abs(lam * s.k - 2.0 * M_PI) > 1e-9)
            throw std::invalid_argument("scene json: lambda inconsistent with k (lambda = 2*pi/k)");
    }
    if (j.contains("eps")) s.eps = j.at("eps").get<double>();
    if (j.contains("p")) s.p = j.at("p").get<double>();
    if (j.contains("q")) s.q = j.at("q").get<double>();
    if (j.contains("theta_z")) s.theta_z = j.at("theta_z").get<double>();
    if (j.contains("J")) s.J = j.at("J").get<int>();
    if (j.contains("sensor_radius")) s.sensor_radius = j.at("sensor_radius").get<double>();
    if (j.contains("aperture")) s.aperture = j.at("aperture").get<double>();
    if (j.contains("L")) s.L = j.at("L").get<int>();
    if (j.contains("R")) s.R = j.at("R").get<int>();
    if (j.contains("placement")) {
        const std::string mode = j.at("placement").get<std::string>();
        if (mode == "perturbed_trapezoid") s.placement = Placement::perturbed_trapezoid;
        else if (mode == "uniform_random") s.placement = Placement::uniform_random;
        else throw std::invalid_argument("scene json: unknown placement '" + mode + "'");
    }
    if (j.contains("beta_max")) s.beta_max = j.at("beta_max").get<double>();
    if (j.contains("noise_delta")) s.noise_delta = j.at("noise_delta").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("obstacles")) {
        s.obstacles.clear();
        for (const auto& jc : j.at("obstacles")) {
            check_keys(jc, {"kind", "center", "params", "rotation", "scale"}, "obstacle");
            BoundaryCurve c;
            c.kind = kind_from(jc.at("kind").get<std::string>());
            c.center = {jc.at("center").at(0).get<double>(), jc.at("center").at(1).get<double>()};
            c.params = {jc.at("params").at(0).get<double>(), jc.at("params").at(1).get<double>()};
            c.rotation = jc.value("rotation", 0.0);
            c.scale = jc.value("scale", 1.0);
            s.obstacles.push_back(c);
        }
    }
    s.validate();
    return s;
}

}  // namespace plsm
