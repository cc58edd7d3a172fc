#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"

namespace tatrec {

// Semi-analytic forward simulation of the constant-speed wave equation with
// initial pressure f and zero initial velocity. The 2D field is evaluated
// through the Poisson representation u = d/dt int_0^t r M(y,r)/sqrt(t^2-r^2) dr
// with the substitution r = t sin(psi) removing the endpoint singularity;
// the 3D field uses closed forms per primitive. Entirely independent of the
// spectral inversion path.

struct NoiseSpec {
    double level = 0.0;  // ||noise||_2 / ||signal||_2
    std::uint64_t seed = 0;
};

struct ForwardOptions {
    bool taper = true;        // raised-cosine over the last 5% of the window
    std::size_t quad_points = 24;  // Gauss-Legendre points per smooth piece
    std::function<void(const std::string&)> warn;  // nullptr -> stderr
};

/// Average of the phantom over the circle of radius t centered at `center`.
double circular_mean(const Phantom& phantom, Vec2 center, double t);

/// 2D acoustic field at an arbitrary point outside/inside the support.
double field_2d(const Phantom& phantom, Vec2 point, double t,
                std::size_t quad_points = 24);

/// 3D acoustic field (closed form per primitive).
double field_3d(const Phantom& phantom, Vec3 point, double t);

SeriesData forward_2d(const Phantom& phantom, const DetectorRing& ring,
                      const TimeGrid& time, const ForwardOptions& opts = {});

SeriesData forward_3d(const Phantom& phantom, const DetectorSphere& sphere,
                      const TimeGrid& time, const ForwardOptions& opts = {});

/// One SeriesData per rotation angle, rows indexed by beta.
std::vector<SeriesData> forward_linedet(const Phantom& phantom,
                                        const LineDetectorGeometry& geom,
                                        const TimeGrid& time,
                                        const ForwardOptions& opts = {});

/// Time series at arbitrary 2D points (used for square-boundary data).
Array2<double> point_series_2d(const Phantom& phantom, const std::vector<Vec2>& points,
                               const TimeGrid& time, const ForwardOptions& opts = {});

/// Adds white Gaussian noise scaled so that ||noise||/||signal|| == level,
/// exactly and deterministically (mt19937_64 + Box-Muller, row-major order).
SeriesData add_noise(const SeriesData& data, const NoiseSpec& spec);

}  // namespace tatrec
