#include "tatrec/recon3d.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "tatrec/fft.hpp"
#include "tatrec/specgrid.hpp"
#include "tatrec/threading.hpp"

namespace tatrec {

namespace {

double neg_order_sign(int p) { return (p < 0 && (-p) % 2 == 1) ? -1.0 : 1.0; }

}  // namespace

void sph_analysis_row(const DetectorSphere& sphere, const specfun::LegendreTable& table,
                      int S, const cdouble* grid_values, cdouble* coeffs) {
    const std::size_t nth = sphere.n_theta, nph = sphere.n_phi;
    // Azimuthal Fourier integral, (2 pi / n_phi) * FFT per theta row.
    std::vector<cdouble> az(nth * nph);
    std::copy(grid_values, grid_values + nth * nph, az.begin());
    fft_rows(az.data(), nth, nph, -1);
    const double az_scale = kTwoPi / static_cast<double>(nph);

    for (int p = -S; p <= S; ++p) {
        const std::size_t bin = static_cast<std::size_t>(
            (p + static_cast<int>(nph)) % static_cast<int>(nph));
        const double sign = neg_order_sign(p);
        const int ap = std::abs(p);
        for (int s = ap; s <= S; ++s) {
            const double* leg = table.row(s, ap);
            cdouble acc{0.0, 0.0};
            for (std::size_t it = 0; it < nth; ++it)
                acc += sphere.weight[it] * leg[it] * az[it * nph + bin];
            coeffs[SphericalHarmonicSpectrum::pack(s, p)] = sign * az_scale * acc;
        }
    }
}

SphericalHarmonicSpectrum sph_analysis(const Array2<cdouble>& phat,
                                       const DetectorSphere& sphere,
                                       const specfun::LegendreTable& table,
                                       const FrequencyGrid& grid, int S) {
    if (static_cast<std::size_t>(S) + 1 > sphere.n_theta)
        throw validation_error("sph_analysis: S exceeds the polar sampling");
    if (static_cast<std::size_t>(2 * S + 1) > sphere.n_phi)
        throw validation_error("sph_analysis: S exceeds the azimuthal sampling");
    if (phat.rows() != sphere.count())
        throw validation_error("sph_analysis: row count does not match the sphere grid");

    SphericalHarmonicSpectrum spec;
    spec.grid = grid;
    spec.S = S;
    const std::size_t n_coeff = static_cast<std::size_t>(S + 1) * (S + 1);
    spec.coeffs = Array2<cdouble>(grid.n_lambda, n_coeff);

    // Gather per lambda: rows of phat are detectors, columns lambda.
    parallel_for(grid.n_lambda, [&](std::size_t m) {
        std::vector<cdouble> values(sphere.count());
        for (std::size_t r = 0; r < sphere.count(); ++r) values[r] = phat(r, m);
        sph_analysis_row(sphere, table, S, values.data(), spec.coeffs.row(m));
    });
    return spec;
}

Array2<cdouble> spectral_filter_3d(const SphericalHarmonicSpectrum& spec, double R) {
    const int S = spec.S;
    const FrequencyGrid& grid = spec.grid;
    Array2<cdouble> b(grid.n_lambda, spec.coeffs.cols());
    const double norm = std::sqrt(2.0 / kPi);
    const cdouble ipow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    parallel_for(grid.n_lambda - 1, [&](std::size_t idx) {
        const std::size_t m = idx + 1;
        const double lam = grid.lambda(m);
        std::vector<cdouble> h;
        std::vector<std::uint8_t> ovf;
        specfun::spherical_h1_array(S, lam * R, h, ovf);
        for (int s = 0; s <= S; ++s) {
            cdouble factor{0.0, 0.0};
            if (!ovf[s]) factor = norm * ipow[s % 4] / (lam * lam * h[s]);
            for (int p = -s; p <= s; ++p) {
                const std::size_t c = SphericalHarmonicSpectrum::pack(s, p);
                b(m, c) = factor * spec.coeffs(m, c);
            }
        }
    });
    return b;
}

SphericalSpectrum sph_synthesis(const Array2<cdouble>& b, const FrequencyGrid& grid,
                                const DetectorSphere& sphere,
                                const specfun::LegendreTable& table, int S, cdouble dc) {
    SphericalSpectrum spec;
    spec.grid = grid;
    spec.n_theta = sphere.n_theta;
    spec.n_phi = sphere.n_phi;
    spec.mu = sphere.mu;
    const std::size_t nth = sphere.n_theta, nph = sphere.n_phi;
    spec.dc = dc;
    spec.values = Array2<cdouble>(grid.n_lambda, (nth + 2) * nph);
    for (std::size_t i = 0; i < (nth + 2) * nph; ++i) spec.values(0, i) = dc;

    // Legendre values at the poles: only p = 0 survives.
    std::vector<double> pole_n, pole_s;
    specfun::legendre_column(S, 1.0, pole_n);
    specfun::legendre_column(S, -1.0, pole_s);
    auto idx00 = [](int s) { return static_cast<std::size_t>(s) * (s + 1) / 2; };

    parallel_for(grid.n_lambda - 1, [&](std::size_t idxm) {
        const std::size_t m = idxm + 1;
        const cdouble* bm = b.row(m);
        cdouble* out = spec.values.row(m);

        std::vector<cdouble> ring(nph);
        for (std::size_t it = 0; it < nth; ++it) {
            std::fill(ring.begin(), ring.end(), cdouble{0.0, 0.0});
            for (int p = -S; p <= S; ++p) {
                const double sign = neg_order_sign(p);
                const int ap = std::abs(p);
                cdouble acc{0.0, 0.0};
                for (int s = ap; s <= S; ++s)
                    acc += bm[SphericalHarmonicSpectrum::pack(s, p)] * table.at(s, ap, it);
                const std::size_t bin = static_cast<std::size_t>(
                    (p + static_cast<int>(nph)) % static_cast<int>(nph));
                ring[bin] = sign * acc;
            }
            fft_inplace(ring.data(), nph, +1);
            std::copy(ring.begin(), ring.end(), out + (it + 1) * nph);
        }

        cdouble north{0.0, 0.0}, south{0.0, 0.0};
        for (int s = 0; s <= S; ++s) {
            north += bm[SphericalHarmonicSpectrum::pack(s, 0)] * pole_n[idx00(s)];
            south += bm[SphericalHarmonicSpectrum::pack(s, 0)] * pole_s[idx00(s)];
        }
        for (std::size_t q = 0; q < nph; ++q) {
            out[q] = north;
            out[(nth + 1) * nph + q] = south;
        }
    });
    return spec;
}

cdouble dc_term_3d(const std::vector<cdouble>& phat00, double R, const FrequencyGrid& grid) {
    if (phat00.size() != grid.n_lambda)
        throw validation_error("dc_term_3d: row length does not match the lambda grid");
    // F(0) = sqrt(2) R / pi^2 * int P^_{0,0}(lambda) / (lambda^2 h_0(lambda R))
    //        * (sin(lambda R)/(lambda R) - cos(lambda R)) dlambda,
    // using 1/(lambda^2 h_0(lambda R)) = i R e^{-i lambda R} / lambda.
    const cdouble pref = cdouble{0.0, 1.0} * std::sqrt(2.0) * R * R / (kPi * kPi);
    cdouble acc{0.0, 0.0};
    for (std::size_t m = 1; m < grid.n_lambda; ++m) {
        const double lam = grid.lambda(m);
        const double x = lam * R;
        const cdouble g = pref * (phat00[m] / lam) * std::polar(1.0, -x) *
                          (std::sin(x) / x - std::cos(x));
        acc += (m + 1 == grid.n_lambda) ? 0.5 * g : g;
    }
    return acc * grid.dlambda();
}

int default_max_degree(const DetectorSphere& sphere, const FrequencyGrid& grid, double R) {
    const int by_sampling = static_cast<int>(sphere.n_theta) - 1;
    const int by_decay =
        static_cast<int>(std::ceil(2.718281828459045 * grid.lambda_max * R / 2.0));
    const int by_azimuth = static_cast<int>((sphere.n_phi - 1) / 2);
    return std::min(by_sampling, std::min(by_decay, by_azimuth));
}

Image3D reconstruct_3d(const SeriesData& data, const DetectorSphere& sphere,
                       const Recon3dOptions& opts, Recon3dDiagnostics* diag) {
    if (data.tag != GeometryTag::Sphere)
        throw validation_error("reconstruct_3d: series geometry is not a detector sphere");
    if (data.detector_count() != sphere.count())
        throw validation_error("reconstruct_3d: detector count mismatch");
    if (data.time.t_max() < 2.0 * sphere.R)
        throw validation_error("reconstruct_3d: record shorter than the Huygens window 2R");

    const double extent = opts.extent > 0.0 ? opts.extent : sphere.R;
    const FrequencyGrid grid = FrequencyGrid::for_time_grid(data.time);
    const int S = opts.S > 0 ? opts.S : default_max_degree(sphere, grid, sphere.R);

    const specfun::LegendreTable table(S, sphere.mu);
    const Array2<cdouble> phat = time_fft(data, grid);
    const SphericalHarmonicSpectrum harm = sph_analysis(phat, sphere, table, grid, S);
    const Array2<cdouble> b = spectral_filter_3d(harm, sphere.R);
    std::vector<cdouble> row00(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m)
        row00[m] = harm.coeffs(m, SphericalHarmonicSpectrum::pack(0, 0));
    const cdouble dc = dc_term_3d(row00, sphere.R, grid);
    const SphericalSpectrum F = sph_synthesis(b, grid, sphere, table, S, dc);

    std::vector<cdouble> cart = specgrid::spherical_to_cartesian(F, opts.n, extent);

    // f(x) = (2 pi)^{-3/2} int F(Lambda) e^{-i x.Lambda} dLambda.
    const double dxi = specgrid::cartesian_dxi(opts.n, extent);
    const double prefactor = dxi * dxi * dxi / std::pow(kTwoPi, 1.5);
    double resid = 0.0;
    Image3D img = specgrid::fourier_image_3d(cart, opts.n, extent, -1, prefactor, &resid);
    if (diag) diag->imag_residual = resid;
    return img;
}

}  // namespace tatrec
