#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tatrec/core.hpp"

namespace tatrec {

enum class PrimitiveKind { Disk, Ball, Gaussian };

struct Primitive {
    PrimitiveKind kind = PrimitiveKind::Gaussian;
    Vec3 center{};          // z ignored for 2D phantoms
    double radius = 0.0;    // radius for disk/ball, sigma for gaussian
    double amplitude = 0.0;
};

// Ground-truth initial pressure: a sum of radial analytic primitives.
// Gaussian support is taken as 4 sigma for the containment invariant.
class Phantom {
  public:
    Phantom(int dimension, std::vector<Primitive> primitives);

    int dimension() const { return dimension_; }
    const std::vector<Primitive>& primitives() const { return primitives_; }

    /// Radius of the ball containing every primitive's support.
    double support_radius() const { return support_radius_; }

    double eval(Vec2 x) const;
    double eval(Vec3 x) const;

  private:
    int dimension_;
    std::vector<Primitive> primitives_;
    double support_radius_;
};

struct TimeGrid {
    double dt = 0.0;
    std::size_t nt = 0;

    double t(std::size_t i) const { return dt * static_cast<double>(i); }
    double t_max() const { return dt * static_cast<double>(nt - 1); }

    void validate() const;
};

struct DetectorRing {
    double R = 0.0;
    std::size_t count = 0;

    double angle(std::size_t j) const {
        return kTwoPi * static_cast<double>(j) / static_cast<double>(count);
    }
    Vec2 point(std::size_t j) const {
        const double a = angle(j);
        return {R * std::cos(a), R * std::sin(a)};
    }
};

// Gauss-Legendre nodes in cos(theta) (descending, theta ascending from the
// north pole) crossed with equispaced azimuths. Row index = it*n_phi + ip.
struct DetectorSphere {
    double R = 0.0;
    std::size_t n_theta = 0;
    std::size_t n_phi = 0;
    std::vector<double> mu;      // cos(theta), descending
    std::vector<double> weight;  // quadrature weights for the mu integral

    DetectorSphere() = default;
    DetectorSphere(double R, std::size_t n_theta, std::size_t n_phi);

    double phi(std::size_t q) const {
        return kTwoPi * static_cast<double>(q) / static_cast<double>(n_phi);
    }
    Vec3 point(std::size_t it, std::size_t ip) const;
    std::size_t count() const { return n_theta * n_phi; }
};

// Rotating cylindrical assembly of integrating line detectors. For rotation
// angle alpha the cylinder axis is D(alpha) = (cos a, 0, sin a); detectors
// are lines through A(alpha, beta) = R cos(b) e2 + R sin(b) N(alpha) with
// N(alpha) = (-sin a, 0, cos a), beta equispaced on [0, 2pi).
struct LineDetectorGeometry {
    double R = 0.0;
    std::vector<double> alphas;  // strictly increasing within [0, pi)
    std::size_t n_beta = 0;

    void validate() const;
    double beta(std::size_t j) const {
        return kTwoPi * static_cast<double>(j) / static_cast<double>(n_beta);
    }
    Vec3 axis(double alpha) const { return {std::cos(alpha), 0.0, std::sin(alpha)}; }
    Vec3 normal(double alpha) const { return {-std::sin(alpha), 0.0, std::cos(alpha)}; }
    Vec3 anchor(double alpha, double beta) const;
};

/// Makes n equispaced rotation angles on [0, pi).
std::vector<double> equispaced_alphas(std::size_t n);

enum class GeometryTag : std::uint16_t { Ring = 1, Sphere = 2, LineSlice = 3, SquareBoundary = 4 };

struct SeriesData {
    GeometryTag tag = GeometryTag::Ring;
    double R = 0.0;        // ring/sphere/cylinder radius, or square half-side
    double alpha = 0.0;    // rotation angle for line slices
    TimeGrid time;
    Array2<double> values;  // [detector][time]

    std::size_t detector_count() const { return values.rows(); }
};

struct Image2D {
    std::size_t n = 0;
    double extent = 0.0;  // samples cover [-extent, extent] per axis
    std::vector<double> values;  // values[iy*n + ix]

    double spacing() const { return 2.0 * extent / static_cast<double>(n - 1); }
    double coord(std::size_t i) const { return -extent + spacing() * static_cast<double>(i); }
    double& at(std::size_t ix, std::size_t iy) { return values[iy * n + ix]; }
    double at(std::size_t ix, std::size_t iy) const { return values[iy * n + ix]; }
};

struct Image3D {
    std::size_t n = 0;
    double extent = 0.0;
    std::vector<double> values;  // values[(iz*n + iy)*n + ix]

    double spacing() const { return 2.0 * extent / static_cast<double>(n - 1); }
    double coord(std::size_t i) const { return -extent + spacing() * static_cast<double>(i); }
    double& at(std::size_t ix, std::size_t iy, std::size_t iz) {
        return values[(iz * n + iy) * n + ix];
    }
    double at(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return values[(iz * n + iy) * n + ix];
    }
};

/// Sum of primitive values at x; dimension of x must match the phantom.
double eval_phantom(const Phantom& phantom, Vec2 x);
double eval_phantom(const Phantom& phantom, Vec3 x);

/// X-ray transform of a 3D phantom along direction D(alpha) through the
/// point h1*N(alpha) + h2*e2. Closed form per primitive.
double xray_projection(const Phantom& phantom, double alpha, Vec2 h);

/// Samples the phantom on the image grid (ground truth for comparisons).
Image2D rasterize_2d(const Phantom& phantom, std::size_t n, double extent);
Image3D rasterize_3d(const Phantom& phantom, std::size_t n, double extent);

}  // namespace tatrec
