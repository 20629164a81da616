#pragma once

#include <string>
#include <vector>

#include "vskf/geometry.hpp"
#include "vskf/inversion.hpp"

namespace vskf {

/// CSV with header `u,v,re,im`, one row per visibility, 17-significant-digit
/// decimals, LF line endings. Units: arcsec^-1 and photon cm^-2 s^-1.
void write_visibility_csv(const std::string& path, const VisibilitySet& data);

/// Reads the CSV format above. Malformed rows and duplicate (u,v) nodes are
/// reported with their line numbers.
VisibilitySet read_visibility_csv(const std::string& path);

/// Writes <base>.txt (side rows of space-separated decimals, row-major) and a
/// <base>.json sidecar {side, pixel_size_arcsec, center_arcsec, units}.
void write_image(const std::string& base, const ImageGrid& image);
ImageGrid read_image(const std::string& base);

/// Writes <base>_re.txt, <base>_im.txt and <base>.json {side, mesh_arcsec_inv, units}.
void write_frequency_grid(const std::string& base, const FrequencyGrid& grid);
FrequencyGrid read_frequency_grid(const std::string& base);

/// Bare matrix in the image text format (rows of space-separated decimals).
void write_matrix_text(const std::string& path, const Eigen::MatrixXd& matrix);

/// 16-bit binary PGM preview, min-max normalized.
void write_pgm(const std::string& path, const ImageGrid& image);

/// CSV with header `k,residual,rel_change`.
void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& log);

}  // namespace vskf
