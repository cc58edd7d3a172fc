#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "tatrec/forward.hpp"
#include "tatrec/metrics.hpp"
#include "tatrec/model.hpp"
#include "tatrec/quadrature.hpp"
#include "tatrec/recon3d.hpp"
#include "tatrec/specfun.hpp"

using namespace tatrec;

namespace {

// Samples Y_s^p (or a coefficient mix) on the sphere grid for one lambda row.
std::vector<cdouble> sample_harmonic(const DetectorSphere& sphere, int s, int p) {
    std::vector<cdouble> out(sphere.count());
    for (std::size_t it = 0; it < sphere.n_theta; ++it) {
        const double theta = std::acos(sphere.mu[it]);
        for (std::size_t ip = 0; ip < sphere.n_phi; ++ip)
            out[it * sphere.n_phi + ip] =
                specfun::sph_harm(s, p, theta, sphere.phi(ip));
    }
    return out;
}

}  // namespace

TEST_CASE("sph_analysis: orthonormal selectors and constants") {
    const DetectorSphere sphere(1.05, 13, 28);
    const int S = 12;
    const specfun::LegendreTable table(S, sphere.mu);

    std::vector<cdouble> coeffs(static_cast<std::size_t>(S + 1) * (S + 1));
    const auto y21 = sample_harmonic(sphere, 2, 1);
    sph_analysis_row(sphere, table, S, y21.data(), coeffs.data());
    for (int s = 0; s <= S; ++s)
        for (int p = -s; p <= s; ++p) {
            const cdouble c = coeffs[SphericalHarmonicSpectrum::pack(s, p)];
            if (s == 2 && p == 1) CHECK(std::abs(c - cdouble{1.0, 0.0}) < 1e-10);
            else CHECK(std::abs(c) < 1e-10);
        }

    std::vector<cdouble> ones(sphere.count(), cdouble{1.0, 0.0});
    sph_analysis_row(sphere, table, S, ones.data(), coeffs.data());
    CHECK(std::abs(coeffs[SphericalHarmonicSpectrum::pack(0, 0)] -
                   cdouble{std::sqrt(4.0 * kPi), 0.0}) < 1e-12);
}

TEST_CASE("sph analysis/synthesis round trip on band-limited input") {
    const DetectorSphere sphere(1.05, 13, 28);
    const int S = 12;
    const specfun::LegendreTable table(S, sphere.mu);
    const FrequencyGrid grid{10.0, 2};

    // Random band-limited coefficients -> synthesis -> analysis.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    Array2<cdouble> b(grid.n_lambda, static_cast<std::size_t>(S + 1) * (S + 1));
    for (int s = 0; s <= S; ++s)
        for (int p = -s; p <= s; ++p)
            b(1, SphericalHarmonicSpectrum::pack(s, p)) = cdouble{uv(rng), uv(rng)};

    const SphericalSpectrum F = sph_synthesis(b, grid, sphere, table, S, cdouble{0.0, 0.0});
    // Interior rows start at theta row 1 (row 0 is the north pole).
    std::vector<cdouble> grid_vals(sphere.count());
    for (std::size_t it = 0; it < sphere.n_theta; ++it)
        for (std::size_t ip = 0; ip < sphere.n_phi; ++ip)
            grid_vals[it * sphere.n_phi + ip] = F.values(1, (it + 1) * sphere.n_phi + ip);

    std::vector<cdouble> back(static_cast<std::size_t>(S + 1) * (S + 1));
    sph_analysis_row(sphere, table, S, grid_vals.data(), back.data());
    for (std::size_t c = 0; c < back.size(); ++c)
        CHECK(std::abs(back[c] - b(1, c)) < 1e-10);

    // Pole rows agree with the p = 0 Legendre sum evaluated at mu = +-1.
    std::vector<double> pole;
    specfun::legendre_column(S, 1.0, pole);
    cdouble north{0.0, 0.0};
    for (int s = 0; s <= S; ++s)
        north += b(1, SphericalHarmonicSpectrum::pack(s, 0)) *
                 pole[static_cast<std::size_t>(s) * (s + 1) / 2];
    CHECK(std::abs(F.values(1, 0) - north) < 1e-12);
}

TEST_CASE("spectral_filter_3d: zeros, homogeneity, independent re-evaluation") {
    const FrequencyGrid grid{30.0, 16};
    const int S = 6;
    const double R = 1.05;
    SphericalHarmonicSpectrum spec;
    spec.grid = grid;
    spec.S = S;
    spec.coeffs = Array2<cdouble>(grid.n_lambda, static_cast<std::size_t>(S + 1) * (S + 1));

    auto zero_b = spectral_filter_3d(spec, R);
    for (const auto& v : zero_b.storage()) CHECK(std::abs(v) == 0.0);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    for (auto& v : spec.coeffs.storage()) v = cdouble{uv(rng), uv(rng)};
    const auto b = spectral_filter_3d(spec, R);
    SphericalHarmonicSpectrum scaled = spec;
    for (auto& v : scaled.coeffs.storage()) v *= -3.0;
    const auto bs = spectral_filter_3d(scaled, R);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(std::abs(bs.storage()[i] + 3.0 * b.storage()[i]) < 1e-12);

    // Oracle: h_s by upward recurrence from the closed forms, in the test.
    for (const auto& [s, m] : {std::pair<int, std::size_t>{0, 4}, {2, 9}, {5, 15}}) {
        const double x = grid.lambda(m) * R;
        cdouble hm = cdouble{0.0, -1.0} * std::polar(1.0, x) / x;
        cdouble hc = hm * (1.0 / x - cdouble{0.0, 1.0});
        cdouble hs = (s == 0) ? hm : hc;
        for (int k = 2; k <= s; ++k) {
            const cdouble hn = ((2.0 * k - 1.0) / x) * hc - hm;
            hm = hc;
            hc = hn;
            hs = hc;
        }
        const cdouble ipow = std::pow(cdouble{0.0, 1.0}, s);
        const double lam = grid.lambda(m);
        const cdouble expected = std::sqrt(2.0 / kPi) * ipow *
                                 spec.coeffs(m, SphericalHarmonicSpectrum::pack(s, 1)) /
                                 (lam * lam * hs);
        CHECK(std::abs(b(m, SphericalHarmonicSpectrum::pack(s, 1)) - expected) <
              1e-12 * std::abs(expected) + 1e-14);
    }
}

TEST_CASE("dc_term_3d: zeros, linearity, ball mass identity") {
    const DetectorSphere sphere(1.05, 17, 36);
    const TimeGrid time{0.01, 241};
    const FrequencyGrid grid = FrequencyGrid::for_time_grid(time);

    std::vector<cdouble> zeros(grid.n_lambda, cdouble{0.0, 0.0});
    CHECK(std::abs(dc_term_3d(zeros, sphere.R, grid)) == 0.0);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    std::vector<cdouble> p(grid.n_lambda), q(grid.n_lambda), pq(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m) {
        p[m] = cdouble{uv(rng), uv(rng)};
        q[m] = cdouble{uv(rng), uv(rng)};
        pq[m] = p[m] + q[m];
    }
    CHECK(std::abs(dc_term_3d(pq, sphere.R, grid) - dc_term_3d(p, sphere.R, grid) -
                   dc_term_3d(q, sphere.R, grid)) < 1e-12);

    // Centered unit ball of radius a: F(0) = (4 pi a^3 / 3) / (2 pi)^{3/2}.
    const double a = 0.3;
    const Phantom ball(3, {{PrimitiveKind::Ball, {0.0, 0.0, 0.0}, a, 1.0}});
    const SeriesData data = forward_3d(ball, sphere, time);
    const int S = 4;
    const specfun::LegendreTable table(S, sphere.mu);
    const auto phat = time_fft(data, grid);
    const auto harm = sph_analysis(phat, sphere, table, grid, S);
    std::vector<cdouble> row00(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m)
        row00[m] = harm.coeffs(m, SphericalHarmonicSpectrum::pack(0, 0));
    const cdouble F0 = dc_term_3d(row00, sphere.R, grid);
    const double target = (4.0 * kPi * a * a * a / 3.0) / std::pow(kTwoPi, 1.5);
    CHECK(std::abs(F0 - cdouble{target, 0.0}) < 0.01 * target);
}

TEST_CASE("spherical Hankel transform pair recovers radial profiles") {
    const double R = 1.05, sigma = 0.15;
    const double lambda_max = 80.0;
    const std::size_t nl = 801;
    FrequencyGrid grid{lambda_max, nl};

    for (int s : {0, 2}) {
        auto fs = [&](double r) {
            const double base = std::exp(-r * r / (2.0 * sigma * sigma));
            return s == 0 ? base : r * r * base;
        };
        std::vector<cdouble> phat(nl, cdouble{0.0, 0.0});
        for (std::size_t m = 1; m < nl; ++m) {
            const double lam = grid.lambda(m);
            auto fn = [&](double r) {
                return fs(r) * specfun::spherical_j(s, lam * r) * r * r;
            };
            const double tr = gauss_integrate(fn, 0.0, 0.9, 400);
            phat[m] = lam * lam * specfun::spherical_h1(s, lam * R).value * tr;
        }
        double num = 0.0, den = 0.0;
        for (double r = 0.05; r <= 0.9; r += 0.025) {
            cdouble acc{0.0, 0.0};
            for (std::size_t m = 1; m < nl; ++m) {
                const double lam = grid.lambda(m);
                const double w = (m + 1 == nl) ? 0.5 : 1.0;
                acc += w * phat[m] / specfun::spherical_h1(s, lam * R).value *
                       specfun::spherical_j(s, lam * r);
            }
            const double rec = (2.0 / kPi) * (acc * grid.dlambda()).real();
            num += (rec - fs(r)) * (rec - fs(r));
            den += fs(r) * fs(r);
        }
        CHECK(std::sqrt(num / den) < 1e-3);
    }
}

TEST_CASE("reconstruct_3d: zero data and gaussian round trip") {
    const DetectorSphere sphere(1.05, 25, 52);
    const TimeGrid time{0.02, 121};

    SeriesData zero;
    zero.tag = GeometryTag::Sphere;
    zero.R = sphere.R;
    zero.time = time;
    zero.values = Array2<double>(sphere.count(), time.nt);
    Recon3dOptions opts;
    opts.n = 16;
    const Image3D zimg = reconstruct_3d(zero, sphere, opts);
    for (double v : zimg.values) CHECK(v == 0.0);

    const Phantom blob(3, {{PrimitiveKind::Gaussian, {0.25, 0.0, 0.1}, 0.15, 1.0}});
    const SeriesData data = forward_3d(blob, sphere, time);
    opts.n = 32;
    opts.S = 24;
    Recon3dDiagnostics diag;
    const Image3D img = reconstruct_3d(data, sphere, opts, &diag);
    const Image3D truth = rasterize_3d(blob, opts.n, sphere.R);
    CHECK(rel_l2_error(img, truth, 0.9) < 0.08);
    CHECK(diag.imag_residual < 0.02);

    // Peak near the true center.
    std::size_t best = 0;
    for (std::size_t i = 0; i < img.values.size(); ++i)
        if (img.values[i] > img.values[best]) best = i;
    const std::size_t n = opts.n;
    CHECK(std::abs(img.coord(best % n) - 0.25) < 3.0 * img.spacing());
    CHECK(std::abs(img.coord((best / n) % n) - 0.0) < 3.0 * img.spacing());
    CHECK(std::abs(img.coord(best / (n * n)) - 0.1) < 3.0 * img.spacing());
}

TEST_CASE("reconstruct_3d: centered phantom is spherically symmetric") {
    const DetectorSphere sphere(1.05, 17, 36);
    const TimeGrid time{0.02, 121};
    const Phantom blob(3, {{PrimitiveKind::Gaussian, {0.0, 0.0, 0.0}, 0.2, 1.0}});
    const SeriesData data = forward_3d(blob, sphere, time);
    Recon3dOptions opts;
    opts.n = 33;  // odd so the center and both axes are grid-exact
    opts.S = 16;
    const Image3D img = reconstruct_3d(data, sphere, opts);

    double peak = 0.0;
    for (double v : img.values) peak = std::max(peak, std::abs(v));

    // Octahedral orbit agreement on exact grid points.
    const std::size_t n = opts.n;
    std::mt19937_64 rng(37);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t ix = rng() % n, iy = rng() % n, iz = rng() % n;
        // Mirror through the center: coord(i) -> coord(n-1-i).
        const double v = img.at(ix, iy, iz);
        worst = std::max(worst, std::abs(v - img.at(n - 1 - ix, iy, iz)));
        worst = std::max(worst, std::abs(v - img.at(iy, ix, iz)));
        worst = std::max(worst, std::abs(v - img.at(ix, iz, iy)));
    }
    CHECK(worst < 1e-3 * peak);

    // Diagonal profile matches the axis profile at equal radii.
    const std::size_t mid = n / 2;
    auto axis_value = [&](double r) {
        // Cubic interpolation of the +x axis profile.
        const double u = (r + img.extent) / img.spacing();
        const auto i1 = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(u), 1,
                                                   static_cast<std::ptrdiff_t>(n) - 3);
        const double sfrac = u - static_cast<double>(i1);
        const double w0 = -sfrac * (sfrac - 1.0) * (sfrac - 2.0) / 6.0;
        const double w1 = (sfrac + 1.0) * (sfrac - 1.0) * (sfrac - 2.0) / 2.0;
        const double w2 = -(sfrac + 1.0) * sfrac * (sfrac - 2.0) / 2.0;
        const double w3 = (sfrac + 1.0) * sfrac * (sfrac - 1.0) / 6.0;
        return w0 * img.at(i1 - 1, mid, mid) + w1 * img.at(i1, mid, mid) +
               w2 * img.at(i1 + 1, mid, mid) + w3 * img.at(i1 + 2, mid, mid);
    };
    double aniso = 0.0;
    for (std::size_t i = mid; i < n - 2; ++i) {
        const double r = std::sqrt(3.0) * img.coord(i);
        if (r > 0.8 * img.extent) break;
        aniso = std::max(aniso, std::abs(img.at(i, i, i) - axis_value(r)));
    }
    CHECK(aniso < 1e-3 * peak);
}
