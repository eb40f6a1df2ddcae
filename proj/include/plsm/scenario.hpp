#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plsm/asymptotic.hpp"
#include "plsm/geometry.hpp"
#include "plsm/lsm.hpp"

namespace plsm {

/// A named experiment: a complete scene plus its sampling grid.
struct PresetInfo {
    std::string name;
    SceneConfig scene;
    SamplingGrid grid;
    std::string note;
};

/// All built-in presets (the full-aperture ellipse/kite pair, the two-kite
/// scene, random placement, the limited apertures, the multi-scatterer runs,
/// and the rates / identities reports).
std::vector<PresetInfo> list_presets();
PresetInfo resolve_preset(const std::string& name);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> noise;
    std::optional<std::pair<int, int>> grid_dims;
    std::optional<double> aperture;
    int mesh_nodes = 100;
    bool reciprocal_indicator = true;
};

struct RunArtifacts {
    std::string out_dir;
    std::vector<std::pair<std::string, std::string>> files;  // name -> sha256
    std::map<std::string, double> summary;
    bool ok = false;
    std::string failed_stage;
};

/// Full pipeline: acquire, add noise, remove the acquisition mean, correlate,
/// invert on the grid, measure the reconstruction. Writes scene.json,
/// C_tilde.csv, indicator.csv/.pgm, metrics.csv, summary.txt, manifest.json.
/// A stage failure is recorded in the manifest; partial artifacts remain.
RunArtifacts run_scenario(const PresetInfo& preset, const std::string& out_dir,
                          const RunOptions& opts = {});

/// Rate report: every probed quantity fitted over the eps list; rates.csv.
RunArtifacts run_rates(const std::vector<double>& eps_list, const std::string& out_dir,
                       const RunOptions& opts = {});

/// Helmholtz-Kirchhoff residual report (standard and modified identities).
RunArtifacts run_identities(const std::string& out_dir, const RunOptions& opts = {});

/// Mean indicator inside the obstacles over mean across unmasked nodes at
/// least one wavelength away from every obstacle.
double indicator_contrast(const IndicatorMap& map, std::span<const BoundaryCurve> obstacles);

}  // namespace plsm
