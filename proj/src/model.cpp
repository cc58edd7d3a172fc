#include "tatrec/model.hpp"

#include <algorithm>
#include <cmath>

#include "tatrec/quadrature.hpp"

namespace tatrec {

namespace {

double primitive_support(const Primitive& p) {
    const double reach = (p.kind == PrimitiveKind::Gaussian) ? 4.0 * p.radius : p.radius;
    return norm(p.center) + reach;
}

double primitive_value(const Primitive& p, double dist) {
    switch (p.kind) {
        case PrimitiveKind::Disk:
        case PrimitiveKind::Ball:
            return dist <= p.radius ? p.amplitude : 0.0;
        case PrimitiveKind::Gaussian:
            return p.amplitude * std::exp(-dist * dist / (2.0 * p.radius * p.radius));
    }
    return 0.0;
}

}  // namespace

Phantom::Phantom(int dimension, std::vector<Primitive> primitives)
    : dimension_(dimension), primitives_(std::move(primitives)) {
    if (dimension_ != 2 && dimension_ != 3)
        throw validation_error("phantom dimension must be 2 or 3");
    support_radius_ = 0.0;
    for (const auto& p : primitives_) {
        if (p.radius <= 0.0)
            throw validation_error("primitive radius/sigma must be positive");
        if (dimension_ == 2 && p.kind == PrimitiveKind::Ball)
            throw validation_error("ball primitive requires a 3D phantom");
        if (dimension_ == 3 && p.kind == PrimitiveKind::Disk)
            throw validation_error("disk primitive requires a 2D phantom");
        if (dimension_ == 2 && p.center.z != 0.0)
            throw validation_error("2D phantom center must have 2 components");
        support_radius_ = std::max(support_radius_, primitive_support(p));
    }
}

double Phantom::eval(Vec2 x) const {
    double acc = 0.0;
    for (const auto& p : primitives_)
        acc += primitive_value(p, std::hypot(x.x - p.center.x, x.y - p.center.y));
    return acc;
}

double Phantom::eval(Vec3 x) const {
    double acc = 0.0;
    for (const auto& p : primitives_) acc += primitive_value(p, norm(x - p.center));
    return acc;
}

void TimeGrid::validate() const {
    if (dt <= 0.0) throw validation_error("time grid dt must be positive");
    if (nt < 2) throw validation_error("time grid needs at least 2 samples");
}

DetectorSphere::DetectorSphere(double R_, std::size_t n_theta_, std::size_t n_phi_)
    : R(R_), n_theta(n_theta_), n_phi(n_phi_) {
    const GaussRule& rule = gauss_legendre(n_theta);
    mu.assign(rule.nodes.rbegin(), rule.nodes.rend());        // descending
    weight.assign(rule.weights.rbegin(), rule.weights.rend());
}

Vec3 DetectorSphere::point(std::size_t it, std::size_t ip) const {
    const double m = mu[it];
    const double s = std::sqrt(std::max(0.0, 1.0 - m * m));
    const double p = phi(ip);
    return {R * s * std::cos(p), R * s * std::sin(p), R * m};
}

void LineDetectorGeometry::validate() const {
    if (R <= 0.0) throw validation_error("line detector radius must be positive");
    if (n_beta < 2) throw validation_error("need at least 2 detectors per ring");
    if (alphas.empty()) throw validation_error("need at least one rotation angle");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (alphas[i] < 0.0 || alphas[i] >= kPi)
            throw validation_error("rotation angles must lie in [0, pi)");
        if (i > 0 && alphas[i] <= alphas[i - 1])
            throw validation_error("rotation angles must be strictly increasing");
    }
}

Vec3 LineDetectorGeometry::anchor(double a, double b) const {
    const Vec3 n = normal(a);
    return {R * std::sin(b) * n.x, R * std::cos(b), R * std::sin(b) * n.z};
}

std::vector<double> equispaced_alphas(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = kPi * static_cast<double>(i) / static_cast<double>(n);
    return out;
}

double eval_phantom(const Phantom& phantom, Vec2 x) {
    if (phantom.dimension() != 2)
        throw validation_error("eval_phantom: point dimension mismatch");
    return phantom.eval(x);
}

double eval_phantom(const Phantom& phantom, Vec3 x) {
    if (phantom.dimension() != 3)
        throw validation_error("eval_phantom: point dimension mismatch");
    return phantom.eval(x);
}

double xray_projection(const Phantom& phantom, double alpha, Vec2 h) {
    if (phantom.dimension() != 3)
        throw validation_error("xray_projection requires a 3D phantom");
    const Vec3 N{-std::sin(alpha), 0.0, std::cos(alpha)};
    const Vec3 D{std::cos(alpha), 0.0, std::sin(alpha)};
    const Vec3 e2{0.0, 1.0, 0.0};
    const Vec3 base = h.x * N + h.y * e2;
    double acc = 0.0;
    for (const auto& p : phantom.primitives()) {
        const Vec3 rel = base - p.center;
        const double along = dot(rel, D);
        const double rho2 = std::max(0.0, dot(rel, rel) - along * along);
        if (p.kind == PrimitiveKind::Gaussian) {
            const double s = p.radius;
            acc += p.amplitude * s * std::sqrt(kTwoPi) * std::exp(-rho2 / (2.0 * s * s));
        } else {
            const double a2 = p.radius * p.radius;
            if (rho2 < a2) acc += 2.0 * p.amplitude * std::sqrt(a2 - rho2);
        }
    }
    return acc;
}

Image2D rasterize_2d(const Phantom& phantom, std::size_t n, double extent) {
    Image2D img{n, extent, std::vector<double>(n * n)};
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix)
            img.at(ix, iy) = phantom.eval(Vec2{img.coord(ix), img.coord(iy)});
    return img;
}

Image3D rasterize_3d(const Phantom& phantom, std::size_t n, double extent) {
    Image3D img{n, extent, std::vector<double>(n * n * n)};
    for (std::size_t iz = 0; iz < n; ++iz)
        for (std::size_t iy = 0; iy < n; ++iy)
            for (std::size_t ix = 0; ix < n; ++ix)
                img.at(ix, iy, iz) =
                    phantom.eval(Vec3{img.coord(ix), img.coord(iy), img.coord(iz)});
    return img;
}

}  // namespace tatrec
