#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>

#include "plsm/asymptotic.hpp"
#include "plsm/lsm.hpp"

namespace plsm {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::string& path);

/// Complex matrix CSV, "re,im" pairs row-major, 17 significant digits so the
/// reload is bit-exact. The header line ("# ...") carries the scene hash.
void write_complex_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m,
                              const std::string& header);
Eigen::MatrixXcd read_complex_matrix_csv(const std::string& path, std::string* header = nullptr);

/// Indicator map as "x,y,value" rows.
void write_indicator_csv(const std::string& path, const IndicatorMap& map);

/// 8-bit PGM (ASCII P2), min-max scaled over the unmasked nodes; top image
/// row is the largest y so the picture is oriented like the plane.
void write_indicator_pgm(const std::string& path, const IndicatorMap& map);

/// One CSV row per fit: quantity, slope, intercept, r2, then eps:norm pairs.
void write_rate_fits_csv(const std::string& path, std::span<const RateFit> fits);

}  // namespace plsm
