#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "tatrec/forward.hpp"
#include "tatrec/metrics.hpp"
#include "tatrec/model.hpp"
#include "tatrec/quadrature.hpp"
#include "tatrec/recon2d.hpp"
#include "tatrec/specfun.hpp"
#include "tatrec/specgrid.hpp"

using namespace tatrec;

namespace {

SeriesData make_series(std::size_t rows, std::size_t nt, double dt, double R) {
    SeriesData d;
    d.tag = GeometryTag::Ring;
    d.R = R;
    d.time = {dt, nt};
    d.values = Array2<double>(rows, nt);
    return d;
}

// Catmull-Rom style sampling of an image at an arbitrary point (test-side
// helper for the rotation-equivariance check).
double bicubic_sample(const Image2D& img, double x, double y) {
    const double h = img.spacing();
    auto axis = [&](double c) { return (c + img.extent) / h; };
    auto weights = [](double s, double w[4]) {
        w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
        w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
        w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
    };
    const double ux = axis(x), uy = axis(y);
    const auto n = static_cast<std::ptrdiff_t>(img.n);
    std::ptrdiff_t ix = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(ux), 1, n - 3);
    std::ptrdiff_t iy = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(uy), 1, n - 3);
    double wx[4], wy[4];
    weights(ux - static_cast<double>(ix), wx);
    weights(uy - static_cast<double>(iy), wy);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a)
            acc += wx[a] * wy[b] * img.at(ix - 1 + a, iy - 1 + b);
    return acc;
}

}  // namespace

TEST_CASE("time_fft: zeros, cosine peak, brute-force DFT oracle") {
    SeriesData zero = make_series(3, 200, 0.01, 1.0);
    const FrequencyGrid grid = FrequencyGrid::for_time_grid(zero.time);
    const auto zspec = time_fft(zero, grid);
    for (const auto& v : zspec.storage()) CHECK(std::abs(v) == 0.0);

    // Windowed cosine peaks at its frequency.
    SeriesData cosdata = make_series(1, 400, 0.01, 1.0);
    const double omega = 31.0;
    for (std::size_t i = 0; i < 400; ++i) {
        const double t = cosdata.time.t(i);
        const double w = 0.5 - 0.5 * std::cos(kTwoPi * i / 399.0);  // Hann window
        cosdata.values(0, i) = w * std::cos(omega * t);
    }
    const FrequencyGrid cgrid = FrequencyGrid::for_time_grid(cosdata.time);
    const auto cspec = time_fft(cosdata, cgrid);
    std::size_t peak = 0;
    for (std::size_t m = 1; m < cgrid.n_lambda; ++m)
        if (std::abs(cspec(0, m)) > std::abs(cspec(0, peak))) peak = m;
    CHECK(std::abs(cgrid.lambda(peak) - omega) <= cgrid.dlambda());

    // Brute-force trapezoid DFT.
    SeriesData rnd = make_series(1, 150, 0.013, 1.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    for (auto& v : rnd.values.storage()) v = uv(rng);
    const FrequencyGrid rgrid = FrequencyGrid::for_time_grid(rnd.time);
    const auto rspec = time_fft(rnd, rgrid);
    for (std::size_t m = 0; m < rgrid.n_lambda; m += 37) {
        const double lam = rgrid.lambda(m);
        cdouble acc{0.0, 0.0};
        for (std::size_t i = 0; i < rnd.time.nt; ++i) {
            const double w = (i == 0 || i + 1 == rnd.time.nt) ? 0.5 : 1.0;
            acc += w * rnd.values(0, i) * std::polar(1.0, lam * rnd.time.t(i));
        }
        acc *= rnd.time.dt;
        CHECK(std::abs(rspec(0, m) - acc) < 1e-10);
    }
}

TEST_CASE("angular_fourier: selectors and direct-summation oracle") {
    const std::size_t count = 24;
    const FrequencyGrid grid{10.0, 4};
    Array2<cdouble> phat(count, grid.n_lambda);

    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t m = 0; m < grid.n_lambda; ++m) phat(j, m) = 2.5;
    auto spec = angular_fourier(phat, grid, 5);
    for (int k = -5; k <= 5; ++k)
        for (std::size_t m = 0; m < grid.n_lambda; ++m) {
            if (k == 0) CHECK(std::abs(spec.at(k, m) - cdouble{2.5, 0.0}) < 1e-13);
            else CHECK(std::abs(spec.at(k, m)) < 1e-13);
        }

    for (std::size_t j = 0; j < count; ++j) {
        const double phi = kTwoPi * j / count;
        for (std::size_t m = 0; m < grid.n_lambda; ++m)
            phat(j, m) = std::polar(1.0, 3.0 * phi);
    }
    spec = angular_fourier(phat, grid, 5);
    CHECK(std::abs(spec.at(3, 1) - cdouble{1.0, 0.0}) < 1e-13);
    CHECK(std::abs(spec.at(-3, 1)) < 1e-13);
    CHECK(std::abs(spec.at(0, 1)) < 1e-13);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    for (auto& v : phat.storage()) v = cdouble{uv(rng), uv(rng)};
    spec = angular_fourier(phat, grid, 11);
    for (int k : {-11, -4, 0, 2, 11}) {
        cdouble acc{0.0, 0.0};
        for (std::size_t j = 0; j < count; ++j)
            acc += phat(j, 2) * std::polar(1.0, -k * kTwoPi * static_cast<double>(j) / count);
        acc /= static_cast<double>(count);
        CHECK(std::abs(spec.at(k, 2) - acc) < 1e-12);
    }

    CHECK_THROWS_AS(angular_fourier(phat, grid, 13), validation_error);
}

TEST_CASE("spectral_filter_2d: linearity and independent re-evaluation") {
    const FrequencyGrid grid{40.0, 33};
    const double R = 1.05;
    const int K = 8;
    const RingFilter filter(R, grid, K);

    HarmonicSpectrum2D spec;
    spec.grid = grid;
    spec.K = K;
    spec.coeffs = Array2<cdouble>(2 * K + 1, grid.n_lambda);
    auto zero_b = spectral_filter_2d(spec, filter);
    for (const auto& v : zero_b.storage()) CHECK(std::abs(v) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    for (auto& v : spec.coeffs.storage()) v = cdouble{uv(rng), uv(rng)};
    const auto b1 = spectral_filter_2d(spec, filter);
    HarmonicSpectrum2D doubled = spec;
    for (auto& v : doubled.coeffs.storage()) v *= 2.0;
    const auto b2 = spectral_filter_2d(doubled, filter);
    for (std::size_t i = 0; i < b1.size(); ++i)
        CHECK(std::abs(b2.storage()[i] - 2.0 * b1.storage()[i]) < 1e-12);

    // Independent oracle: series J and log-series Y seeds, upward recurrence
    // in long double, all inside the test.
    auto oracle_hankel = [](int k, double x) {
        auto jser = [](double nu, double xx) {
            const long double q = static_cast<long double>(xx) / 2.0L;
            long double term = std::pow(q, static_cast<long double>(nu)) /
                               std::tgammal(static_cast<long double>(nu) + 1.0L);
            long double sum = term;
            for (int m = 1; m <= 90; ++m) {
                term *= -q * q / (static_cast<long double>(m) * (nu + m));
                sum += term;
            }
            return sum;
        };
        const long double gamma = 0.5772156649015328606L;
        const long double piL = 3.141592653589793238462643383279502884L;
        const long double q = static_cast<long double>(x) * x / 4.0L;
        long double term = 1.0L, hsum = 0.0L, acc0 = 0.0L;
        for (int m = 1; m <= 90; ++m) {
            term *= -q / (static_cast<long double>(m) * m);
            hsum += 1.0L / m;
            acc0 += -term * hsum;
        }
        const long double logterm = std::log(static_cast<long double>(x) / 2.0L) + gamma;
        const long double j0 = jser(0.0, x), j1 = jser(1.0, x);
        long double y0 = (2.0L / piL) * (logterm * j0 + acc0);
        term = 1.0L;
        long double hm = 0.0L, hm1 = 1.0L, acc1 = 1.0L;
        for (int m = 1; m <= 90; ++m) {
            term *= -q / (static_cast<long double>(m) * (m + 1));
            hm += 1.0L / m;
            hm1 += 1.0L / (m + 1);
            acc1 += term * (hm + hm1);
        }
        long double y1 =
            (2.0L / piL) * (logterm * j1 - 1.0L / static_cast<long double>(x) -
                            (static_cast<long double>(x) / 4.0L) * acc1);
        long double ym = y0, yc = y1;
        for (int kk = 2; kk <= k; ++kk) {
            const long double yn = (2.0L * (kk - 1) / static_cast<long double>(x)) * yc - ym;
            ym = yc;
            yc = yn;
        }
        const long double yk = (k == 0) ? y0 : yc;
        const long double jk = jser(k, x);
        return cdouble{static_cast<double>(jk), static_cast<double>(yk)};
    };

    const cdouble mi{0.0, -1.0};
    for (const auto& [k, m] : {std::pair<int, std::size_t>{0, 3}, {1, 7}, {5, 12}}) {
        const double lam = grid.lambda(m);
        const cdouble expected = 2.0 * std::pow(mi, k) * spec.at(k, m) /
                                 (kPi * lam * oracle_hankel(k, lam * R));
        CHECK(std::abs(b1(k + K, m) - expected) < 1e-12 * std::abs(expected) + 1e-14);
    }
}

TEST_CASE("polar_synthesis: selectors and direct sum") {
    const FrequencyGrid grid{20.0, 5};
    const int K = 6;
    Array2<cdouble> b(2 * K + 1, grid.n_lambda);
    b(K + 0, 1) = 1.0;  // b_0 = 1 at m=1
    auto spec = polar_synthesis(b, grid, K, 32, cdouble{0.0, 0.0});
    for (std::size_t q = 0; q < 32; ++q)
        CHECK(std::abs(spec.values(1, q) - cdouble{1.0, 0.0}) < 1e-13);

    b(K + 0, 1) = 0.0;
    b(K + 1, 2) = 1.0;  // b_1 = 1 at m=2
    spec = polar_synthesis(b, grid, K, 32, cdouble{0.0, 0.0});
    for (std::size_t q = 0; q < 32; ++q)
        CHECK(std::abs(spec.values(2, q) - std::polar(1.0, spec.phi(q))) < 1e-13);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    for (auto& v : b.storage()) v = cdouble{uv(rng), uv(rng)};
    spec = polar_synthesis(b, grid, K, 32, cdouble{0.3, 0.1});
    for (std::size_t q = 0; q < 32; q += 5) {
        cdouble acc{0.0, 0.0};
        for (int k = -K; k <= K; ++k)
            acc += b(k + K, 3) * std::polar(1.0, k * spec.phi(q));
        CHECK(std::abs(spec.values(3, q) - acc) < 1e-12);
    }
    for (std::size_t q = 0; q < 32; ++q)
        CHECK(spec.values(0, q) == cdouble{0.3, 0.1});
}

TEST_CASE("dc_term_2d: zeros, linearity, disk mass identity") {
    const DetectorRing ring{1.05, 128};
    const TimeGrid time{0.008, 600};
    const FrequencyGrid grid = FrequencyGrid::for_time_grid(time);
    const RingFilter filter(ring.R, grid, 0);

    std::vector<cdouble> zeros(grid.n_lambda, cdouble{0.0, 0.0});
    CHECK(std::abs(dc_term_2d(zeros, filter)) == 0.0);

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    std::vector<cdouble> p(grid.n_lambda), q(grid.n_lambda), pq(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m) {
        p[m] = cdouble{uv(rng), uv(rng)};
        q[m] = cdouble{uv(rng), uv(rng)};
        pq[m] = p[m] + q[m];
    }
    CHECK(std::abs(dc_term_2d(pq, filter) - dc_term_2d(p, filter) - dc_term_2d(q, filter)) <
          1e-12);

    // Centered disk of radius a: f^(0) = mass / (2 pi) = a^2 / 2.
    const double a = 0.3;
    const Phantom disk(2, {{PrimitiveKind::Disk, {0.0, 0.0, 0.0}, a, 1.0}});
    const SeriesData data = forward_2d(disk, ring, time);
    const auto phat = time_fft(data, grid);
    const auto harm = angular_fourier(phat, grid, 0);
    std::vector<cdouble> row0(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m) row0[m] = harm.at(0, m);
    const cdouble dc = dc_term_2d(row0, filter);
    CHECK(std::abs(dc - cdouble{a * a / 2.0, 0.0}) < 0.01 * a * a / 2.0);
}

TEST_CASE("reconstruct_2d: zero data, round trip, peak location") {
    const DetectorRing ring{1.05, 128};
    const TimeGrid time{0.008, 600};

    SeriesData zero = make_series(ring.count, time.nt, time.dt, ring.R);
    Recon2dOptions opts;
    opts.n = 64;
    const Image2D zimg = reconstruct_2d(zero, ring, opts);
    for (double v : zimg.values) CHECK(v == 0.0);

    const Phantom blobs(2, {{PrimitiveKind::Gaussian, {0.3, 0.15, 0.0}, 0.08, 1.0},
                            {PrimitiveKind::Gaussian, {-0.2, -0.25, 0.0}, 0.06, 0.7}});
    const SeriesData data = forward_2d(blobs, ring, time);
    opts.n = 128;
    Recon2dDiagnostics diag;
    const Image2D img = reconstruct_2d(data, ring, opts, &diag);
    const Image2D truth = rasterize_2d(blobs, opts.n, ring.R);
    CHECK(rel_l2_error(img, truth, 0.9) < 0.05);
    CHECK(diag.imag_residual < 0.01);

    // Peak lands at the true blob center (orientation check).
    std::size_t best = 0;
    for (std::size_t i = 0; i < img.values.size(); ++i)
        if (img.values[i] > img.values[best]) best = i;
    const double px = img.coord(best % opts.n);
    const double py = img.coord(best / opts.n);
    CHECK(std::abs(px - 0.3) < 3.0 * img.spacing());
    CHECK(std::abs(py - 0.15) < 3.0 * img.spacing());

    SeriesData wrong = data;
    wrong.tag = GeometryTag::Sphere;
    CHECK_THROWS_AS(reconstruct_2d(wrong, ring, opts), validation_error);
}

TEST_CASE("reconstruct_2d is linear end to end") {
    const DetectorRing ring{1.05, 64};
    const TimeGrid time{0.01, 300};
    const Phantom pa(2, {{PrimitiveKind::Gaussian, {0.2, 0.0, 0.0}, 0.09, 1.0}});
    const Phantom pb(2, {{PrimitiveKind::Gaussian, {-0.1, 0.22, 0.0}, 0.07, 0.8}});
    const SeriesData da = forward_2d(pa, ring, time);
    const SeriesData db = forward_2d(pb, ring, time);
    SeriesData mix = da;
    for (std::size_t i = 0; i < mix.values.size(); ++i)
        mix.values.storage()[i] =
            1.7 * da.values.storage()[i] - 0.6 * db.values.storage()[i];

    Recon2dOptions opts;
    opts.n = 64;
    const Image2D ia = reconstruct_2d(da, ring, opts);
    const Image2D ib = reconstruct_2d(db, ring, opts);
    const Image2D imix = reconstruct_2d(mix, ring, opts);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < imix.values.size(); ++i) {
        const double ref = 1.7 * ia.values[i] - 0.6 * ib.values[i];
        num += (imix.values[i] - ref) * (imix.values[i] - ref);
        den += ref * ref;
    }
    CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("reconstruct_2d rotational equivariance by one detector spacing") {
    const DetectorRing ring{1.05, 96};
    const TimeGrid time{0.01, 450};
    const double dphi = kTwoPi / static_cast<double>(ring.count);
    const Phantom base(2, {{PrimitiveKind::Gaussian, {0.28, 0.1, 0.0}, 0.09, 1.0}});
    const double c = std::cos(dphi), s = std::sin(dphi);
    const Phantom rot(2, {{PrimitiveKind::Gaussian,
                           {0.28 * c - 0.1 * s, 0.28 * s + 0.1 * c, 0.0},
                           0.09,
                           1.0}});

    Recon2dOptions opts;
    opts.n = 128;
    const Image2D img = reconstruct_2d(forward_2d(base, ring, time), ring, opts);
    const Image2D rimg = reconstruct_2d(forward_2d(rot, ring, time), ring, opts);

    // Compare rimg against img rotated by dphi (bicubic resampling).
    double num = 0.0, den = 0.0;
    for (std::size_t iy = 0; iy < opts.n; ++iy) {
        const double y = rimg.coord(iy);
        for (std::size_t ix = 0; ix < opts.n; ++ix) {
            const double x = rimg.coord(ix);
            if (x * x + y * y > 0.85 * 0.85) continue;
            const double xs = c * x + s * y;   // rotate back by dphi
            const double ys = -s * x + c * y;
            const double ref = bicubic_sample(img, xs, ys);
            num += (rimg.at(ix, iy) - ref) * (rimg.at(ix, iy) - ref);
            den += ref * ref;
        }
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("Hankel transform pair recovers a radial profile") {
    const double R = 1.05;
    const double sigma = 0.15;
    auto f0 = [&](double r) { return std::exp(-r * r / (2.0 * sigma * sigma)); };

    const double lambda_max = 80.0;
    const std::size_t nl = 801;
    FrequencyGrid grid{lambda_max, nl};
    // Forward: P^_0(lambda) = (pi/2) lambda H_0(lambda R) int f0 J_0 r dr.
    std::vector<cdouble> phat0(nl, cdouble{0.0, 0.0});
    for (std::size_t m = 1; m < nl; ++m) {
        const double lam = grid.lambda(m);
        auto fn = [&](double r) { return f0(r) * specfun::bessel_j(0, lam * r) * r; };
        const double hankel = gauss_integrate(fn, 0.0, 0.9, 400);
        phat0[m] = 0.5 * kPi * lam * specfun::hankel1(0, lam * R).value * hankel;
    }
    // Inverse: f0(r) = (2/pi) int P^_0 / H_0(lambda R) J_0(lambda r) dlambda.
    double num = 0.0, den = 0.0;
    for (double r = 0.0; r <= 0.9; r += 0.025) {
        cdouble acc{0.0, 0.0};
        for (std::size_t m = 1; m < nl; ++m) {
            const double lam = grid.lambda(m);
            const double w = (m + 1 == nl) ? 0.5 : 1.0;
            acc += w * phat0[m] / specfun::hankel1(0, lam * R).value *
                   specfun::bessel_j(0, lam * r);
        }
        const double rec = (2.0 / kPi) * (acc * grid.dlambda()).real();
        num += (rec - f0(r)) * (rec - f0(r));
        den += f0(r) * f0(r);
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("noise stability: bounded response, no blow-up under refinement") {
    const DetectorRing ring{1.05, 64};
    const TimeGrid time{0.01, 300};
    SeriesData noise = make_series(ring.count, time.nt, time.dt, ring.R);
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double norm2 = 0.0;
    for (auto& v : noise.values.storage()) {
        v = gauss(rng);
        norm2 += v * v;
    }
    for (auto& v : noise.values.storage()) v /= std::sqrt(norm2);

    auto image_norm = [&](std::size_t n) {
        Recon2dOptions opts;
        opts.n = n;
        const Image2D img = reconstruct_2d(noise, ring, opts);
        double acc = 0.0;
        for (double v : img.values) acc += v * v;
        // Grid-independent L2 norm via the cell area.
        return std::sqrt(acc) * img.spacing();
    };
    const double n128 = image_norm(128);
    const double n256 = image_norm(256);
    // Regression bound for the unit-noise response of this configuration.
    CHECK(n128 < 0.5);
    CHECK(n256 < 1.10 * n128);
}

TEST_CASE("polar_to_cartesian: constants, node exactness, refinement, symmetry") {
    auto make_polar = [](std::size_t nl, std::size_t nphi, double lmax, auto&& fn) {
        PolarSpectrum spec;
        spec.grid = FrequencyGrid{lmax, nl};
        spec.n_phi = nphi;
        spec.values = Array2<cdouble>(nl, nphi);
        spec.dc = fn(0.0, 0.0);
        for (std::size_t q = 0; q < nphi; ++q) spec.values(0, q) = spec.dc;
        for (std::size_t m = 1; m < nl; ++m)
            for (std::size_t q = 0; q < nphi; ++q)
                spec.values(m, q) = fn(spec.grid.lambda(m), spec.phi(q));
        return spec;
    };

    // Constant spectrum reproduces exactly inside the sampled disk.
    const auto ones = make_polar(61, 64, 30.0, [](double, double) {
        return cdouble{1.0, 0.0};
    });
    const auto cart = specgrid::polar_to_cartesian(ones, 33, 1.0);
    const double dxi = specgrid::cartesian_dxi(33, 1.0);
    for (std::size_t py = 0; py < 33; ++py)
        for (std::size_t px = 0; px < 33; ++px) {
            const double xx = (static_cast<double>(px) - 16.0) * dxi;
            const double yy = (static_cast<double>(py) - 16.0) * dxi;
            if (std::hypot(xx, yy) <= 30.0)
                CHECK(std::abs(cart(py, px) - cdouble{1.0, 0.0}) < 1e-12);
            else
                CHECK(std::abs(cart(py, px)) == 0.0);
        }

    // A node that coincides with a polar sample is exact.
    auto smooth = [](double lam, double phi) {
        return std::exp(-lam * lam / 20.0) * std::polar(1.0, 0.3 * lam * std::cos(phi));
    };
    {
        // Choose the Cartesian grid so that (dxi, 0) aligns with a polar node.
        const std::size_t n = 17;
        const double extent = 1.0;
        const double dxi = specgrid::cartesian_dxi(n, extent);
        const std::size_t nl = 41;
        const double lmax = 8.0 * dxi;  // dlambda = lmax/40 = dxi/5
        const auto spec = make_polar(nl, 64, lmax, smooth);
        const auto out = specgrid::polar_to_cartesian(spec, n, extent);
        // Node (px, py) = (off+1, off): lambda = dxi = 5*dlambda, phi = 0.
        CHECK(std::abs(out(8, 9) - smooth(dxi, 0.0)) < 1e-12);
    }

    // Radial refinement study on a smooth spectrum: error drops >= 3.5x.
    auto max_err = [&](std::size_t nl) {
        const auto spec = make_polar(nl, 256, 30.0, smooth);
        const auto out = specgrid::polar_to_cartesian(spec, 41, 1.0);
        const double d = specgrid::cartesian_dxi(41, 1.0);
        double worst = 0.0;
        for (std::size_t py = 0; py < 41; ++py)
            for (std::size_t px = 0; px < 41; ++px) {
                const double xx = (static_cast<double>(px) - 20.0) * d;
                const double yy = (static_cast<double>(py) - 20.0) * d;
                const double lam = std::hypot(xx, yy);
                if (lam > 30.0 || lam == 0.0) continue;
                double phi = std::atan2(yy, xx);
                if (phi < 0.0) phi += kTwoPi;
                worst = std::max(worst, std::abs(out(py, px) - smooth(lam, phi)));
            }
        return worst;
    };
    const double coarse = max_err(76);
    const double fine = max_err(151);
    CHECK(coarse / fine >= 3.5);

    // Hermitian input pairs stay Hermitian.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    PolarSpectrum herm;
    herm.grid = FrequencyGrid{12.0, 25};
    herm.n_phi = 32;
    herm.values = Array2<cdouble>(25, 32);
    herm.dc = cdouble{uv(rng), 0.0};
    for (std::size_t q = 0; q < 32; ++q) herm.values(0, q) = herm.dc;
    for (std::size_t m = 1; m < 25; ++m)
        for (std::size_t q = 0; q < 16; ++q) {
            const cdouble v{uv(rng), uv(rng)};
            herm.values(m, q) = v;
            herm.values(m, q + 16) = std::conj(v);
        }
    const auto hout = specgrid::polar_to_cartesian(herm, 21, 1.0);
    for (std::size_t py = 0; py < 21; ++py)
        for (std::size_t px = 0; px < 21; ++px) {
            const std::size_t cy = 20 - py, cx = 20 - px;
            CHECK(std::abs(hout(py, px) - std::conj(hout(cy, cx))) < 1e-12);
        }

    // Linearity is exact by construction; spot-check it.
    const auto sa = make_polar(31, 64, 10.0, smooth);
    auto sb = sa;
    for (auto& v : sb.values.storage()) v *= cdouble{0.0, 2.0};
    sb.dc *= cdouble{0.0, 2.0};
    const auto ca = specgrid::polar_to_cartesian(sa, 15, 1.0);
    const auto cb = specgrid::polar_to_cartesian(sb, 15, 1.0);
    for (std::size_t i = 0; i < ca.size(); ++i)
        CHECK(std::abs(cb.storage()[i] - cdouble{0.0, 2.0} * ca.storage()[i]) < 1e-14);
}

TEST_CASE("rel_l2_error: trivial values and direct-summation oracle") {
    Image2D a{9, 1.0, std::vector<double>(81)};
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uv(0.5, 1.5);
    for (auto& v : a.values) v = uv(rng);
    CHECK(rel_l2_error(a, a, 0.9) == 0.0);

    Image2D twice = a;
    for (auto& v : twice.values) v *= 2.0;
    CHECK(rel_l2_error(twice, a, 2.0) == doctest::Approx(1.0).epsilon(1e-13));

    Image2D b = a;
    for (auto& v : b.values) v = uv(rng);
    double num = 0.0, den = 0.0;
    for (std::size_t iy = 0; iy < 9; ++iy)
        for (std::size_t ix = 0; ix < 9; ++ix) {
            const double x = a.coord(ix), y = a.coord(iy);
            if (x * x + y * y > 0.49) continue;
            num += (a.at(ix, iy) - b.at(ix, iy)) * (a.at(ix, iy) - b.at(ix, iy));
            den += b.at(ix, iy) * b.at(ix, iy);
        }
    CHECK(rel_l2_error(a, b, 0.7) == doctest::Approx(std::sqrt(num / den)).epsilon(1e-14));

    Image2D other{7, 1.0, std::vector<double>(49, 1.0)};
    CHECK_THROWS_AS(rel_l2_error(a, other, 0.9), validation_error);
}

TEST_CASE("scaling_probe: single row and CSV shape") {
    const ScalingReport r = scaling_probe("recon2d", {48});
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].n == 48);
    CHECK(r.rows[0].seconds > 0.0);
    const std::string csv = scaling_csv(r);
    CHECK(csv.rfind("n,seconds,fitted_exponent\n", 0) == 0);
    CHECK_THROWS_AS(scaling_probe("warp-drive", {16, 32}), validation_error);
    CHECK_THROWS_AS(scaling_probe("recon2d", {32, 16}), validation_error);
}
