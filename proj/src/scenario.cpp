#include "plsm/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "plsm/correlation.hpp"
#include "plsm/io.hpp"

namespace plsm {

namespace {

namespace fs = std::filesystem;

BoundaryCurve paper_kite(Point2 center) { return make_curve(CurveKind::kite, center, {1.0, 0.0}, 0.5); }
BoundaryCurve paper_ellipse(Point2 center) {
    return make_curve(CurveKind::ellipse, center, {1.5, 1.0}, 0.5);
}

PresetInfo base_preset(std::string name, std::string note) {
    PresetInfo p;
    p.name = std::move(name);
    p.note = std::move(note);
    p.scene = SceneConfig{};  // paper defaults: k=2pi, eps=1e-2, p=1, q=2, theta_z=pi,
                              // J=120, 5-lambda sensors, L=150, trapezoid beta 0.1, noise 5e-3
    p.grid = SamplingGrid{};  // 100x100 on [-6,6]^2, 5-lambda mask
    return p;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;

    PresetInfo elli = base_preset("elli", "full-aperture ellipse");
    elli.scene.obstacles = {paper_ellipse({-2.0, -2.0})};
    out.push_back(elli);

    PresetInfo kite = base_preset("kite", "full-aperture kite");
    kite.scene.obstacles = {paper_kite({2.0, 2.0})};
    out.push_back(kite);

    PresetInfo two = base_preset("kite_two", "two kites a few wavelengths apart");
    two.scene.obstacles = {paper_kite({-2.0, -2.0}), paper_kite({2.0, 2.0})};
    out.push_back(two);

    PresetInfo rand = base_preset("kite_rand", "uniform-random scatterer positions, L raised to 400");
    rand.scene.obstacles = {paper_kite({2.0, 2.0})};
    rand.scene.placement = Placement::uniform_random;
    rand.scene.L = 400;
    out.push_back(rand);

    const std::pair<const char*, double> apertures[] = {
        {"kite_limi_2pi3", 2.0 * M_PI / 3.0}, {"kite_limi_pi", M_PI}, {"kite_limi_4pi3", 4.0 * M_PI / 3.0}};
    for (const auto& [name, ap] : apertures) {
        PresetInfo limi = base_preset(name, "limited-aperture kite");
        limi.scene.obstacles = {paper_kite({2.0, 2.0})};
        limi.scene.aperture = ap;
        out.push_back(limi);
    }

    PresetInfo r5 = base_preset("kite_several_R5", "5 scatterers per acquisition, noise 1e-2");
    r5.scene.obstacles = {paper_kite({2.0, 2.0})};
    r5.scene.placement = Placement::uniform_random;
    r5.scene.R = 5;
    r5.scene.L = 400;
    r5.scene.noise_delta = 1e-2;
    out.push_back(r5);

    PresetInfo r30 = base_preset("kite_several_R30", "30 scatterers per acquisition, noise 5e-2");
    r30.scene.obstacles = {paper_kite({2.0, 2.0})};
    r30.scene.placement = Placement::uniform_random;
    r30.scene.R = 30;
    r30.scene.L = 400;
    r30.scene.noise_delta = 5e-2;
    out.push_back(r30);

    PresetInfo rates = base_preset("rates", "field-amplitude rate fits over eps");
    rates.scene.obstacles = {paper_ellipse({0.0, 0.0})};
    rates.scene.J = 24;
    out.push_back(rates);

    PresetInfo ident = base_preset("identities", "Helmholtz-Kirchhoff residual report");
    ident.scene.obstacles = {paper_ellipse({0.0, 0.0})};
    ident.scene.J = 24;
    out.push_back(ident);

    return out;
}

PresetInfo resolve_preset(const std::string& name) {
    for (PresetInfo& p : list_presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset '" + name + "'");
}

double indicator_contrast(const IndicatorMap& map, std::span<const BoundaryCurve> obstacles) {
    // Dense boundary polygons for the distance test.
    std::vector<std::vector<Point2>> polys;
    for (const auto& c : obstacles) {
        std::vector<Point2> poly(512);
        for (int i = 0; i < 512; ++i) poly[i] = c.position(2.0 * M_PI * i / 512);
        polys.push_back(std::move(poly));
    }
    const double lambda = 1.0;  // scenes are set up in wavelength units

    double inside_sum = 0.0, far_sum = 0.0;
    int inside_n = 0, far_n = 0;
    for (int iy = 0; iy < map.grid.ny; ++iy)
        for (int ix = 0; ix < map.grid.nx; ++ix) {
            const Point2 p = map.grid.node(ix, iy);
            if (p.norm() > map.grid.mask_radius) continue;
            bool inside = false;
            double dist = std::numeric_limits<double>::infinity();
            for (size_t c = 0; c < obstacles.size(); ++c) {
                if (curve_contains(obstacles[c], p, 512)) inside = true;
                for (const Point2& q : polys[c]) dist = std::min(dist, distance(p, q));
            }
            const double v = map.values[map.grid.index(ix, iy)];
            if (inside) {
                inside_sum += v;
                ++inside_n;
            } else if (dist > lambda) {
                far_sum += v;
                ++far_n;
            }
        }
    if (inside_n == 0 || far_n == 0) return 0.0;
    return (inside_sum / inside_n) / (far_sum / far_n);
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

void add_file(RunArtifacts& art, const std::string& name) {
    art.files.emplace_back(name, sha256_file_hex(art.out_dir + "/" + name));
}

void write_manifest(RunArtifacts& art, const std::string& preset_name) {
    nlohmann::json j;
    j["preset"] = preset_name;
    j["ok"] = art.ok;
    j["failed_stage"] = art.failed_stage;
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [name, hash] : art.files) files[name] = hash;
    j["files"] = files;
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [key, value] : art.summary) summary[key] = value;
    j["summary"] = summary;
    write_text(art.out_dir + "/manifest.json", j.dump(2) + "\n");
}

SceneConfig apply_options(SceneConfig scene, const RunOptions& opts) {
    if (opts.seed) scene.seed = *opts.seed;
    if (opts.noise) scene.noise_delta = *opts.noise;
    if (opts.aperture) scene.aperture = *opts.aperture;
    scene.validate();
    return scene;
}

}  // namespace

RunArtifacts run_scenario(const PresetInfo& preset, const std::string& out_dir,
                          const RunOptions& opts) {
    if (preset.name == "rates") {
        return run_rates({0.04, 0.02, 0.01}, out_dir, opts);
    }
    if (preset.name == "identities") {
        return run_identities(out_dir, opts);
    }

    RunArtifacts art;
    art.out_dir = out_dir;
    fs::create_directories(out_dir);

    SceneConfig scene = apply_options(preset.scene, opts);
    SamplingGrid grid = preset.grid;
    if (opts.grid_dims) {
        grid.nx = opts.grid_dims->first;
        grid.ny = opts.grid_dims->second;
    }

    const std::string scene_json = scene_to_json(scene);
    write_text(out_dir + "/scene.json", scene_json);
    add_file(art, "scene.json");
    const std::string scene_hash = sha256_hex(scene_json).substr(0, 16);

    std::string stage = "acquire";
    try {
        const ExteriorSolver obstacle = build_obstacle_solver(scene, opts.mesh_nodes);
        NearFieldMatrix N = acquire_near_field(scene, obstacle);

        stage = "noise";
        N = apply_noise(N, scene.noise_delta, Rng(scene.seed));

        stage = "average";
        N = remove_acquisition_mean(N);

        stage = "correlate";
        const CrossCorrelationMatrix C = scene.R == 1 ? modified_cross_correlation(N)
                                                      : multi_cross_correlation(N, scene.R);
        write_complex_matrix_csv(out_dir + "/C_tilde.csv", C.entries,
                                 "plsm cross-correlation kind=" +
                                     std::string(scene.R == 1 ? "modified" : "multi") +
                                     " scene=" + scene_hash);
        add_file(art, "C_tilde.csv");

        stage = "invert";
        // Operator-level discrepancy from the entrywise noise amplitude; the
        // conversion factor |C|_F / sqrt(J L) is recorded below.
        const double conversion = C.entries.norm() / std::sqrt(double(scene.J) * scene.L);
        const double delta_level =
            (scene.noise_delta > 0.0 ? scene.noise_delta : 1e-12) * conversion;
        const IndicatorMap map = indicator_map(C, grid, delta_level, opts.reciprocal_indicator);
        write_indicator_csv(out_dir + "/indicator.csv", map);
        add_file(art, "indicator.csv");
        write_indicator_pgm(out_dir + "/indicator.pgm", map);
        add_file(art, "indicator.pgm");

        stage = "metrics";
        const ReconstructionMetrics metrics = level_set_metrics(map, scene.obstacles);
        const double contrast = indicator_contrast(map, scene.obstacles);

        art.summary["morozov_delta_level"] = delta_level;
        art.summary["delta_conversion_factor"] = conversion;
        art.summary["best_threshold"] = metrics.best_threshold;
        art.summary["area_error_domain"] = metrics.area_error;
        art.summary["area_error_obstacle"] = metrics.area_error_obstacle;
        art.summary["contrast_inside_over_far"] = contrast;
        art.summary["sigma_eps"] = C.scale.sigma;
        art.summary["ring_area"] = C.scale.ring_area;

        std::ofstream mcsv(out_dir + "/metrics.csv", std::ios::app);
        if (mcsv.tellp() == 0)
            mcsv << "preset,J,L,R,noise,aperture,seed,best_threshold,area_error_domain,"
                    "area_error_obstacle,contrast,delta_level\n";
        mcsv << preset.name << "," << scene.J << "," << scene.L << "," << scene.R << ","
             << scene.noise_delta << "," << scene.aperture << "," << scene.seed << ","
             << metrics.best_threshold << "," << metrics.area_error << ","
             << metrics.area_error_obstacle << "," << contrast << "," << delta_level << "\n";
        mcsv.close();
        add_file(art, "metrics.csv");

        std::string summary = "preset " + preset.name + "\n";
        summary += "  scene hash         " + scene_hash + "\n";
        summary += "  J x L              " + std::to_string(scene.J) + " x " + std::to_string(scene.L) + "\n";
        summary += "  scatterers R       " + std::to_string(scene.R) + "\n";
        summary += "  noise amplitude    " + std::to_string(scene.noise_delta) + "\n";
        summary += "  morozov delta      " + std::to_string(delta_level) + "\n";
        summary += "  best threshold     " + std::to_string(metrics.best_threshold) + "\n";
        summary += "  area error (dom.)  " + std::to_string(metrics.area_error) + "\n";
        summary += "  area error (obst.) " + std::to_string(metrics.area_error_obstacle) + "\n";
        summary += "  contrast in/far    " + std::to_string(contrast) + "\n";
        write_text(out_dir + "/summary.txt", summary);
        add_file(art, "summary.txt");

        art.ok = true;
    } catch (const std::exception& e) {
        art.ok = false;
        art.failed_stage = stage;
        write_text(out_dir + "/summary.txt", "FAILED at stage " + stage + ": " + e.what() + "\n");
        add_file(art, "summary.txt");
    }
    write_manifest(art, preset.name);
    add_file(art, "manifest.json");
    return art;
}

RunArtifacts run_rates(const std::vector<double>& eps_list, const std::string& out_dir,
                       const RunOptions& opts) {
    RunArtifacts art;
    art.out_dir = out_dir;
    fs::create_directories(out_dir);

    PresetInfo preset = resolve_preset("rates");
    const SceneConfig scene = apply_options(preset.scene, opts);

    std::string stage = "rates";
    try {
        std::vector<RateFit> fits;
        for (RateQuantity q : {RateQuantity::us_on_B, RateQuantity::v_tilde_on_B,
                               RateQuantity::avg_v_tilde_on_B, RateQuantity::decomposition_error,
                               RateQuantity::modified_hk_residual}) {
            fits.push_back(rate_probe(q, eps_list, scene, 64));
            art.summary["slope_" + fits.back().quantity] = fits.back().slope;
            art.summary["r2_" + fits.back().quantity] = fits.back().r_squared;
        }
        write_rate_fits_csv(out_dir + "/rates.csv", fits);
        add_file(art, "rates.csv");

        std::string summary;
        for (const RateFit& f : fits)
            summary += f.quantity + ": slope " + std::to_string(f.slope) + " (r2 " +
                       std::to_string(f.r_squared) + ")\n";
        write_text(out_dir + "/summary.txt", summary);
        add_file(art, "summary.txt");
        art.ok = true;
    } catch (const std::exception& e) {
        art.ok = false;
        art.failed_stage = stage;
        write_text(out_dir + "/summary.txt", std::string("FAILED: ") + e.what() + "\n");
        add_file(art, "summary.txt");
    }
    write_manifest(art, "rates");
    add_file(art, "manifest.json");
    return art;
}

RunArtifacts run_identities(const std::string& out_dir, const RunOptions& opts) {
    RunArtifacts art;
    art.out_dir = out_dir;
    fs::create_directories(out_dir);

    PresetInfo preset = resolve_preset("identities");
    const SceneConfig scene = apply_options(preset.scene, opts);

    try {
        const ExteriorSolver obstacle = build_obstacle_solver(scene, opts.mesh_nodes);
        const std::vector<Point2> xs = sensor_ring(scene);
        std::vector<std::pair<Point2, Point2>> pairs;
        for (size_t j = 0; j + 1 < xs.size() && pairs.size() < 4; j += 5)
            pairs.emplace_back(xs[j], xs[j + 1]);

        std::string csv = "identity,eps,residual\n";
        const double std_res = hk_residual(HkKind::standard, scene, obstacle, pairs);
        art.summary["standard_residual"] = std_res;
        csv += "standard," + std::to_string(scene.eps) + "," + std::to_string(std_res) + "\n";
        for (double eps : {0.04, 0.02, 0.01}) {
            SceneConfig s = scene;
            s.eps = eps;
            const double res = hk_residual(HkKind::modified, s, obstacle, pairs);
            art.summary["modified_residual_eps_" + std::to_string(eps)] = res;
            csv += "modified," + std::to_string(eps) + "," + std::to_string(res) + "\n";
        }
        write_text(out_dir + "/identities.csv", csv);
        add_file(art, "identities.csv");
        write_text(out_dir + "/summary.txt", csv);
        add_file(art, "summary.txt");
        art.ok = true;
    } catch (const std::exception& e) {
        art.ok = false;
        art.failed_stage = "identities";
        write_text(out_dir + "/summary.txt", std::string("FAILED: ") + e.what() + "\n");
        add_file(art, "summary.txt");
    }
    write_manifest(art, "identities");
    add_file(art, "manifest.json");
    return art;
}

}  // namespace plsm
