#include "tatrec/forward.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "tatrec/quadrature.hpp"
#include "tatrec/specfun.hpp"
#include "tatrec/threading.hpp"

namespace tatrec {

namespace {

constexpr double kGaussReach = 8.0;  // integration band half-width in sigmas

double gauss_band(const Primitive& p) { return kGaussReach * p.radius; }

// ---------------------------------------------------------------------------
// 2D circular means of radial primitives about a point at distance d.

struct DiskMean {
    double A, a, d;

    double value(double r) const {
        if (r <= 0.0) return d <= a ? A : 0.0;
        if (d < 1e-14) return r <= a ? A : 0.0;
        const double lo = std::abs(d - a), hi = d + a;
        if (r >= hi) return 0.0;
        if (r <= lo) return d < a ? A : 0.0;
        const double q = std::clamp((r * r + d * d - a * a) / (2.0 * r * d), -1.0, 1.0);
        return A * std::acos(q) / kPi;
    }
    double deriv(double r) const {
        if (d < 1e-14 || r <= 0.0) return 0.0;
        const double lo = std::abs(d - a), hi = d + a;
        if (r >= hi || r <= lo) return 0.0;
        const double q = std::clamp((r * r + d * d - a * a) / (2.0 * r * d), -1.0, 1.0);
        const double qp = (r * r - d * d + a * a) / (2.0 * r * r * d);
        const double s = std::sqrt(std::max(1.0 - q * q, 1e-300));
        return -(A / kPi) * qp / s;
    }
};

struct GaussMean {
    double A, sigma, d;

    void eval(double r, double& m, double& mp) const {
        const double s2 = sigma * sigma;
        const double e = std::exp(-(r - d) * (r - d) / (2.0 * s2));
        const double x = r * d / s2;
        const double i0 = specfun::bessel_i0_scaled(x);
        const double i1 = specfun::bessel_i1_scaled(x);
        m = A * e * i0;
        mp = A * e * (-(r / s2) * i0 + (d / s2) * i1);
    }
};

// Integrates fn over [a, b]; sqrt substitutions absorb inverse-square-root
// endpoint singularities of the integrand.
template <class F>
double piece_integral(const F& fn, double a, double b, bool sing_a, bool sing_b,
                      std::size_t nq) {
    if (b <= a) return 0.0;
    if (sing_a && sing_b) {
        const double mid = 0.5 * (a + b);
        return piece_integral(fn, a, mid, true, false, nq) +
               piece_integral(fn, mid, b, false, true, nq);
    }
    if (sing_a || sing_b) {
        const double len = b - a;
        auto sub = [&](double v) {
            const double psi = sing_a ? a + len * v * v : b - len * v * v;
            return fn(psi) * 2.0 * len * v;
        };
        return gauss_integrate(sub, 0.0, 1.0, nq);
    }
    return gauss_integrate(fn, a, b, nq);
}

// 2D field of a single disk primitive via the Poisson/Abel representation,
// with the arc-region endpoints handled by sqrt substitution.
double disk_field_2d(const Primitive& p, double d, double t, std::size_t nq) {
    const double A = p.amplitude, a = p.radius;
    if (t <= 0.0) return d <= a ? A : 0.0;
    if (d < 1e-14) {
        // Centered evaluation point: closed form.
        if (t < a) return A;
        const double root = std::sqrt(std::max(t * t - a * a, 1e-300));
        return A * (1.0 - t / root);
    }
    const double lo = std::abs(d - a), hi = d + a;
    double acc = 0.0;
    if (d < a) {
        const double rc = std::min(lo, t);
        acc += A * (1.0 - std::cos(std::asin(rc / t)));
    }
    if (t > lo) {
        const double r_top = std::min(hi, t);
        const double psi_a = std::asin(std::min(1.0, lo / t));
        const double psi_b = (r_top >= t) ? 0.5 * kPi : std::asin(r_top / t);
        const DiskMean mean{A, a, d};
        auto fn = [&](double psi) {
            const double s = std::sin(psi);
            const double r = t * s;
            return s * mean.value(r) + t * s * s * mean.deriv(r);
        };
        const bool sing_a = lo > 1e-14;
        const bool sing_b = r_top >= hi;
        acc += piece_integral(fn, psi_a, psi_b, sing_a, sing_b, nq);
    }
    return acc;
}

double gauss_field_2d(const Primitive& p, double d, double t, std::size_t nq) {
    const double A = p.amplitude, sigma = p.radius;
    if (t <= 0.0) return A * std::exp(-d * d / (2.0 * sigma * sigma));
    const double band = gauss_band(p);
    const double r_start = std::max(0.0, d - band);
    const double r_end = std::min(d + band, t);
    if (r_end <= r_start) return 0.0;
    const GaussMean mean{A, sigma, d};
    auto fn = [&](double psi) {
        const double s = std::sin(psi);
        double m, mp;
        mean.eval(t * s, m, mp);
        return s * m + t * s * s * mp;
    };
    const int pieces =
        std::clamp(static_cast<int>(std::ceil((r_end - r_start) / (2.0 * sigma))), 1, 16);
    double acc = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double ra = r_start + (r_end - r_start) * i / pieces;
        const double rb = r_start + (r_end - r_start) * (i + 1) / pieces;
        acc += gauss_integrate(fn, std::asin(std::min(1.0, ra / t)),
                               std::asin(std::min(1.0, rb / t)), nq);
    }
    return acc;
}

double primitive_field_2d(const Primitive& p, double d, double t, std::size_t nq) {
    return p.kind == PrimitiveKind::Gaussian ? gauss_field_2d(p, d, t, nq)
                                             : disk_field_2d(p, d, t, nq);
}

// ---------------------------------------------------------------------------
// 3D fields, closed form per primitive.

double ball_field_3d(const Primitive& p, double d, double t) {
    const double A = p.amplitude, a = p.radius;
    if (d < 1e-14) return t < a ? A : 0.0;
    if (d < a && t <= a - d) return A;
    if (std::abs(d - t) <= a) return A * (d - t) / (2.0 * d);
    return 0.0;
}

double gauss_field_3d(const Primitive& p, double d, double t) {
    const double A = p.amplitude, s2 = p.radius * p.radius;
    if (d < 1e-14) return A * (1.0 - t * t / s2) * std::exp(-t * t / (2.0 * s2));
    const double em = std::exp(-(t - d) * (t - d) / (2.0 * s2));
    const double ep = std::exp(-(t + d) * (t + d) / (2.0 * s2));
    return (A / (2.0 * d)) * ((d - t) * em + (d + t) * ep);
}

double primitive_field_3d(const Primitive& p, double d, double t) {
    return p.kind == PrimitiveKind::Gaussian ? gauss_field_3d(p, d, t)
                                             : ball_field_3d(p, d, t);
}

// ---------------------------------------------------------------------------

void apply_taper(Array2<double>& values, const TimeGrid& time, bool enabled) {
    if (!enabled) return;
    const double T = time.t_max();
    const double t0 = 0.95 * T;
    for (std::size_t i = 0; i < time.nt; ++i) {
        const double t = time.t(i);
        if (t <= t0) continue;
        const double w = 0.5 * (1.0 + std::cos(kPi * (t - t0) / (T - t0)));
        for (std::size_t r = 0; r < values.rows(); ++r) values(r, i) *= w;
    }
}

void emit_warning(const ForwardOptions& opts, const std::string& msg) {
    if (opts.warn) opts.warn(msg);
    else std::cerr << "tatrec: warning: " << msg << "\n";
}

// Line integral of the 3D field of one primitive along a line at
// perpendicular distance rho from the primitive center.
double line_field_integral(const Primitive& p, double rho, double t, std::size_t nq) {
    if (t <= 0.0) {
        // X-ray transform of the initial condition.
        if (p.kind == PrimitiveKind::Gaussian)
            return p.amplitude * p.radius * std::sqrt(kTwoPi) *
                   std::exp(-rho * rho / (2.0 * p.radius * p.radius));
        const double a2 = p.radius * p.radius - rho * rho;
        return a2 > 0.0 ? 2.0 * p.amplitude * std::sqrt(a2) : 0.0;
    }
    auto w_of_d = [&](double dd) {
        const double v = dd * dd - rho * rho;
        return v > 0.0 ? std::sqrt(v) : 0.0;
    };
    if (p.kind == PrimitiveKind::Ball) {
        const double A = p.amplitude, a = p.radius;
        double acc = 0.0;
        // Undisturbed core: d <= a - t.
        if (t < a && rho < a - t) acc += 2.0 * A * w_of_d(a - t);
        // N-wave region: max(|t-a|, rho) <= d <= t+a.
        const double d_lo = std::max(std::abs(t - a), rho);
        const double d_hi = t + a;
        if (d_hi > d_lo) {
            const double w_lo = w_of_d(d_lo), w_hi = w_of_d(d_hi);
            if (w_hi > w_lo) {
                auto fn = [&](double w) {
                    const double dd = std::sqrt(rho * rho + w * w);
                    return ball_field_3d(p, dd, t);
                };
                acc += 2.0 * gauss_integrate(fn, w_lo, w_hi, std::max<std::size_t>(nq, 32));
            }
        }
        return acc;
    }
    const double band = gauss_band(p);
    const double d_hi = t + band;
    if (d_hi <= rho) return 0.0;
    const double d_lo = (t < 2.0 * band) ? rho : std::max(rho, t - band);
    auto fn = [&](double w) {
        const double dd = std::sqrt(rho * rho + w * w);
        return gauss_field_3d(p, dd, t);
    };
    const double w_hi = w_of_d(d_hi);
    const double w_lo = w_of_d(d_lo);
    const int pieces = std::clamp(
        static_cast<int>(std::ceil((d_hi - std::max(d_lo, rho)) / (2.0 * p.radius))), 1, 16);
    double acc = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double wa = w_lo + (w_hi - w_lo) * i / pieces;
        const double wb = w_lo + (w_hi - w_lo) * (i + 1) / pieces;
        acc += 2.0 * gauss_integrate(fn, wa, wb, nq);
    }
    return acc;
}

}  // namespace

double circular_mean(const Phantom& phantom, Vec2 center, double t) {
    if (phantom.dimension() != 2)
        throw validation_error("circular_mean requires a 2D phantom");
    if (t < 0.0) throw validation_error("circular_mean: negative radius");
    if (t == 0.0) return phantom.eval(center);
    double acc = 0.0;
    for (const auto& p : phantom.primitives()) {
        const double d = std::hypot(center.x - p.center.x, center.y - p.center.y);
        if (p.kind == PrimitiveKind::Gaussian) {
            double m, mp;
            GaussMean{p.amplitude, p.radius, d}.eval(t, m, mp);
            acc += m;
        } else {
            acc += DiskMean{p.amplitude, p.radius, d}.value(t);
        }
    }
    return acc;
}

double field_2d(const Phantom& phantom, Vec2 point, double t, std::size_t quad_points) {
    if (phantom.dimension() != 2)
        throw validation_error("field_2d requires a 2D phantom");
    double acc = 0.0;
    for (const auto& p : phantom.primitives()) {
        const double d = std::hypot(point.x - p.center.x, point.y - p.center.y);
        acc += primitive_field_2d(p, d, t, quad_points);
    }
    return acc;
}

double field_3d(const Phantom& phantom, Vec3 point, double t) {
    if (phantom.dimension() != 3)
        throw validation_error("field_3d requires a 3D phantom");
    double acc = 0.0;
    for (const auto& p : phantom.primitives())
        acc += primitive_field_3d(p, norm(point - p.center), t);
    return acc;
}

SeriesData forward_2d(const Phantom& phantom, const DetectorRing& ring,
                      const TimeGrid& time, const ForwardOptions& opts) {
    if (phantom.dimension() != 2) throw validation_error("forward_2d: phantom must be 2D");
    time.validate();
    if (ring.R <= phantom.support_radius())
        throw validation_error("forward_2d: phantom support reaches the detector ring");
    if (time.dt > ring.R / 1000.0)
        emit_warning(opts, "forward_2d: time step exceeds R/1000, wavefronts may be undersampled");

    SeriesData out;
    out.tag = GeometryTag::Ring;
    out.R = ring.R;
    out.time = time;
    out.values = Array2<double>(ring.count, time.nt);
    parallel_for(ring.count, [&](std::size_t j) {
        const Vec2 y = ring.point(j);
        double* row = out.values.row(j);
        for (std::size_t i = 0; i < time.nt; ++i)
            row[i] = field_2d(phantom, y, time.t(i), opts.quad_points);
    });
    apply_taper(out.values, time, opts.taper);
    return out;
}

SeriesData forward_3d(const Phantom& phantom, const DetectorSphere& sphere,
                      const TimeGrid& time, const ForwardOptions& opts) {
    if (phantom.dimension() != 3) throw validation_error("forward_3d: phantom must be 3D");
    time.validate();
    if (sphere.R <= phantom.support_radius())
        throw validation_error("forward_3d: phantom support reaches the detector sphere");
    if (time.t_max() < 2.0 * sphere.R)
        throw validation_error("forward_3d: record must cover t in [0, 2R]");

    SeriesData out;
    out.tag = GeometryTag::Sphere;
    out.R = sphere.R;
    out.time = time;
    out.values = Array2<double>(sphere.count(), time.nt);
    parallel_for(sphere.count(), [&](std::size_t row_idx) {
        const Vec3 y = sphere.point(row_idx / sphere.n_phi, row_idx % sphere.n_phi);
        double* row = out.values.row(row_idx);
        for (std::size_t i = 0; i < time.nt; ++i)
            row[i] = field_3d(phantom, y, time.t(i));
    });
    apply_taper(out.values, time, opts.taper);
    return out;
}

Array2<double> point_series_2d(const Phantom& phantom, const std::vector<Vec2>& points,
                               const TimeGrid& time, const ForwardOptions& opts) {
    time.validate();
    Array2<double> out(points.size(), time.nt);
    parallel_for(points.size(), [&](std::size_t j) {
        double* row = out.row(j);
        for (std::size_t i = 0; i < time.nt; ++i)
            row[i] = field_2d(phantom, points[j], time.t(i), opts.quad_points);
    });
    apply_taper(out, time, opts.taper);
    return out;
}

std::vector<SeriesData> forward_linedet(const Phantom& phantom,
                                        const LineDetectorGeometry& geom,
                                        const TimeGrid& time,
                                        const ForwardOptions& opts) {
    if (phantom.dimension() != 3)
        throw validation_error("forward_linedet: phantom must be 3D");
    geom.validate();
    time.validate();
    if (geom.R <= phantom.support_radius())
        throw validation_error("forward_linedet: phantom support reaches the cylinder");

    const std::size_t na = geom.alphas.size(), nb = geom.n_beta;

    std::vector<SeriesData> scan(na);
    for (std::size_t ia = 0; ia < na; ++ia) {
        scan[ia].tag = GeometryTag::LineSlice;
        scan[ia].R = geom.R;
        scan[ia].alpha = geom.alphas[ia];
        scan[ia].time = time;
        scan[ia].values = Array2<double>(nb, time.nt);
    }

    // Distance from each detector line to each primitive center. For radial
    // primitives the measured series depends on (rho, t) only, so one table
    // per primitive covers the whole scan.
    for (const auto& p : phantom.primitives()) {
        Array2<double> rho(na, nb);
        double rho_min = 1e300, rho_max = 0.0;
        for (std::size_t ia = 0; ia < na; ++ia) {
            const double a = geom.alphas[ia];
            const Vec3 D = geom.axis(a);
            for (std::size_t jb = 0; jb < nb; ++jb) {
                const Vec3 rel = geom.anchor(a, geom.beta(jb)) - p.center;
                const double along = dot(rel, D);
                const double v = std::max(0.0, dot(rel, rel) - along * along);
                const double r = std::sqrt(v);
                rho(ia, jb) = r;
                rho_min = std::min(rho_min, r);
                rho_max = std::max(rho_max, r);
            }
        }

        if (rho_max - rho_min < 1e-12) {
            // Axially centered primitive: one series fits all detectors.
            std::vector<double> series(time.nt);
            for (std::size_t i = 0; i < time.nt; ++i)
                series[i] = line_field_integral(p, rho_min, time.t(i), opts.quad_points);
            for (std::size_t ia = 0; ia < na; ++ia)
                for (std::size_t jb = 0; jb < nb; ++jb)
                    for (std::size_t i = 0; i < time.nt; ++i)
                        scan[ia].values(jb, i) += series[i];
            continue;
        }

        const double feature = p.radius;
        const std::size_t n_rho = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil((rho_max - rho_min) * 8.0 / feature)), 64, 1024);
        const double pad = (rho_max - rho_min) * 1e-6;
        const double g_lo = rho_min - pad, g_hi = rho_max + pad;
        const double dg = (g_hi - g_lo) / static_cast<double>(n_rho - 1);

        Array2<double> table(n_rho, time.nt);
        parallel_for(n_rho, [&](std::size_t g) {
            const double r = g_lo + dg * static_cast<double>(g);
            double* row = table.row(g);
            for (std::size_t i = 0; i < time.nt; ++i)
                row[i] = line_field_integral(p, r, time.t(i), opts.quad_points);
        });

        parallel_for(na, [&](std::size_t ia) {
            for (std::size_t jb = 0; jb < nb; ++jb) {
                const double r = rho(ia, jb);
                const double u = (r - g_lo) / dg;
                std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::floor(u));
                i1 = std::clamp<std::ptrdiff_t>(i1, 1, static_cast<std::ptrdiff_t>(n_rho) - 3);
                const double s = u - static_cast<double>(i1);
                // 4-point Lagrange weights at offsets {-1, 0, 1, 2}.
                const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
                const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
                const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
                const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
                const double* t0 = table.row(i1 - 1);
                const double* t1 = table.row(i1);
                const double* t2 = table.row(i1 + 1);
                const double* t3 = table.row(i1 + 2);
                double* row = scan[ia].values.row(jb);
                for (std::size_t i = 0; i < time.nt; ++i)
                    row[i] += w0 * t0[i] + w1 * t1[i] + w2 * t2[i] + w3 * t3[i];
            }
        });
    }

    for (auto& slice : scan) apply_taper(slice.values, time, opts.taper);
    return scan;
}

SeriesData add_noise(const SeriesData& data, const NoiseSpec& spec) {
    if (spec.level < 0.0) throw validation_error("add_noise: negative noise level");
    SeriesData out = data;
    if (spec.level == 0.0) return out;

    double signal2 = 0.0;
    for (double v : data.values.storage()) signal2 += v * v;
    if (signal2 == 0.0)
        throw validation_error("add_noise: zero signal with nonzero noise level");

    std::mt19937_64 rng(spec.seed);
    auto uniform = [&rng]() {
        // 53-bit mantissa in (0, 1].
        return (static_cast<double>(rng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
    };
    std::vector<double> noise(data.values.size());
    for (std::size_t i = 0; i < noise.size(); i += 2) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        noise[i] = m * std::cos(kTwoPi * u2);
        if (i + 1 < noise.size()) noise[i + 1] = m * std::sin(kTwoPi * u2);
    }
    double noise2 = 0.0;
    for (double v : noise) noise2 += v * v;
    const double scale = spec.level * std::sqrt(signal2 / noise2);
    for (std::size_t i = 0; i < noise.size(); ++i)
        out.values.storage()[i] += scale * noise[i];
    return out;
}

}  // namespace tatrec
