#pragma once

#include <string>
#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"

namespace tatrec {

/// ||a - b|| / ||b|| over nodes with |x| <= mask_radius. Grids must match.
double rel_l2_error(const Image2D& a, const Image2D& b, double mask_radius);
double rel_l2_error(const Image3D& a, const Image3D& b, double mask_radius);

struct ScalingRow {
    std::size_t n = 0;
    double seconds = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double fitted_exponent = 0.0;  // p in t ~ n^p log n
};

/// Times the named pipeline (currently "recon2d") at the given image sizes.
/// Detector count and record length scale with n so the measured cost tracks
/// the full transform chain; each timing is the median of 3 runs of the
/// reconstruction only (simulation excluded).
ScalingReport scaling_probe(const std::string& pipeline, const std::vector<std::size_t>& sizes);

/// CSV with header n,seconds,fitted_exponent.
std::string scaling_csv(const ScalingReport& report);

}  // namespace tatrec
