#include "tatrec/recon2d.hpp"

#include <algorithm>
#include <cmath>

#include "tatrec/fft.hpp"
#include "tatrec/specfun.hpp"
#include "tatrec/specgrid.hpp"
#include "tatrec/threading.hpp"

namespace tatrec {

FrequencyGrid FrequencyGrid::for_time_grid(const TimeGrid& time) {
    time.validate();
    const std::size_t padded = next_pow2(2 * time.nt);
    FrequencyGrid grid;
    grid.lambda_max = kPi / time.dt;
    grid.n_lambda = padded / 2 + 1;
    return grid;
}

std::size_t FrequencyGrid::padded_length(const TimeGrid& time) const {
    return static_cast<std::size_t>(std::llround(kTwoPi / (dlambda() * time.dt)));
}

Array2<cdouble> time_fft(const SeriesData& data, const FrequencyGrid& grid) {
    const std::size_t padded = grid.padded_length(data.time);
    if (padded < data.time.nt)
        throw validation_error("time_fft: frequency grid finer than the record allows");
    const std::size_t rows = data.detector_count();
    const std::size_t nt = data.time.nt;
    const double dt = data.time.dt;

    Array2<cdouble> out(rows, grid.n_lambda);
    Array2<cdouble> work(rows, padded);
    parallel_for(rows, [&](std::size_t r) {
        const double* src = data.values.row(r);
        cdouble* buf = work.row(r);
        for (std::size_t i = 0; i < nt; ++i) buf[i] = src[i];
    });
    fft_rows(work.data(), rows, padded, +1);
    // Trapezoid correction: halve the first and last record samples.
    parallel_for(rows, [&](std::size_t r) {
        const double* src = data.values.row(r);
        const double t_last = data.time.t(nt - 1);
        for (std::size_t m = 0; m < grid.n_lambda; ++m) {
            const double lam = grid.lambda(m);
            cdouble v = work(r, m);
            v -= 0.5 * src[0];
            v -= 0.5 * src[nt - 1] * std::polar(1.0, lam * t_last);
            out(r, m) = dt * v;
        }
    });
    return out;
}

HarmonicSpectrum2D angular_fourier(const Array2<cdouble>& phat,
                                   const FrequencyGrid& grid, int K) {
    const std::size_t count = phat.rows();
    const std::size_t nl = phat.cols();
    if (K < 0 || static_cast<std::size_t>(2 * K) > count)
        throw validation_error("angular_fourier: requested order aliases the detector grid");

    // Transpose so each lambda is a contiguous ring of detector samples.
    Array2<cdouble> work(nl, count);
    parallel_for(nl, [&](std::size_t m) {
        for (std::size_t j = 0; j < count; ++j) work(m, j) = phat(j, m);
    });
    fft_rows(work.data(), nl, count, -1);

    HarmonicSpectrum2D spec;
    spec.grid = grid;
    spec.K = K;
    spec.coeffs = Array2<cdouble>(2 * K + 1, nl);
    const double scale = 1.0 / static_cast<double>(count);
    for (int k = -K; k <= K; ++k) {
        const std::size_t bin = static_cast<std::size_t>((k % static_cast<int>(count) +
                                 static_cast<int>(count)) % static_cast<int>(count));
        for (std::size_t m = 0; m < nl; ++m)
            spec.coeffs(k + K, m) = scale * work(m, bin);
    }
    return spec;
}

RingFilter::RingFilter(double R, const FrequencyGrid& grid, int K)
    : R_(R), K_(K), grid_(grid) {
    factors_ = Array2<cdouble>(grid.n_lambda, K + 1);
    dc_kernel_.assign(grid.n_lambda, 0.0);
    // (-i)^k cycle.
    const cdouble phase[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    parallel_for(grid.n_lambda - 1, [&](std::size_t idx) {
        const std::size_t m = idx + 1;
        const double lam = grid_.lambda(m);
        const double x = lam * R_;
        std::vector<cdouble> h;
        std::vector<std::uint8_t> ovf;
        specfun::hankel1_array(K_, x, h, ovf);
        for (int k = 0; k <= K_; ++k) {
            if (ovf[k]) {
                factors_(m, k) = 0.0;
            } else {
                factors_(m, k) = 2.0 * phase[k % 4] / (kPi * lam * h[k]);
            }
        }
        dc_kernel_[m] = R_ * specfun::bessel_j(1, x);
    });
}

Array2<cdouble> spectral_filter_2d(const HarmonicSpectrum2D& spec, const RingFilter& filter) {
    const int K = spec.K;
    if (filter.K() < K)
        throw validation_error("spectral_filter_2d: filter truncation below spectrum order");
    const std::size_t nl = spec.grid.n_lambda;
    Array2<cdouble> b(2 * K + 1, nl);
    parallel_for(nl - 1, [&](std::size_t idx) {
        const std::size_t m = idx + 1;
        for (int k = -K; k <= K; ++k)
            b(k + K, m) = filter.factor(k, m) * spec.coeffs(k + K, m);
    });
    return b;
}

PolarSpectrum polar_synthesis(const Array2<cdouble>& b, const FrequencyGrid& grid,
                              int K, std::size_t n_phi, cdouble dc) {
    if (n_phi < static_cast<std::size_t>(2 * K + 1))
        throw validation_error("polar_synthesis: angular grid too coarse for order K");
    PolarSpectrum spec;
    spec.grid = grid;
    spec.n_phi = n_phi;
    spec.dc = dc;
    spec.values = Array2<cdouble>(grid.n_lambda, n_phi);
    for (std::size_t q = 0; q < n_phi; ++q) spec.values(0, q) = dc;
    parallel_for(grid.n_lambda - 1, [&](std::size_t idx) {
        const std::size_t m = idx + 1;
        cdouble* row = spec.values.row(m);
        for (int k = -K; k <= K; ++k) {
            const std::size_t bin =
                static_cast<std::size_t>((k + static_cast<int>(n_phi)) %
                                         static_cast<int>(n_phi));
            row[bin] = b(k + K, m);
        }
    });
    fft_rows(spec.values.row(1), grid.n_lambda - 1, n_phi, +1);
    return spec;
}

cdouble dc_term_2d(const std::vector<cdouble>& phat0, const RingFilter& filter) {
    const FrequencyGrid& grid = filter.grid();
    if (phat0.size() != grid.n_lambda)
        throw validation_error("dc_term_2d: row length does not match the lambda grid");
    cdouble acc{0.0, 0.0};
    for (std::size_t m = 1; m < grid.n_lambda; ++m) {
        const cdouble g = filter.factor(0, m) * phat0[m] * filter.dc_kernel(m);
        acc += (m + 1 == grid.n_lambda) ? 0.5 * g : g;
    }
    return acc * grid.dlambda();
}

int default_angular_order(std::size_t detector_count, const FrequencyGrid& grid, double R) {
    const int by_sampling = static_cast<int>((detector_count - 1) / 2);
    const int by_decay =
        static_cast<int>(std::ceil(2.718281828459045 * grid.lambda_max * R / 2.0));
    return std::min(by_sampling, by_decay);
}

namespace {

std::size_t default_n_phi(int K) {
    return next_pow2(std::max<std::size_t>(2 * static_cast<std::size_t>(K) + 2, 256));
}

}  // namespace

PolarSpectrum ring_polar_spectrum(const SeriesData& data, double R,
                                  const Recon2dOptions& opts, const RingFilter* filter) {
    const FrequencyGrid grid = FrequencyGrid::for_time_grid(data.time);
    const int K = opts.K > 0 ? opts.K : default_angular_order(data.detector_count(), grid, R);
    const std::size_t n_phi = opts.n_phi > 0 ? opts.n_phi : default_n_phi(K);

    std::optional<RingFilter> local_filter;
    if (!filter) local_filter.emplace(R, grid, K);
    const RingFilter& flt = filter ? *filter : *local_filter;

    const Array2<cdouble> phat = time_fft(data, grid);
    const HarmonicSpectrum2D harm = angular_fourier(phat, grid, K);
    const Array2<cdouble> b = spectral_filter_2d(harm, flt);
    std::vector<cdouble> row0(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m) row0[m] = harm.at(0, m);
    const cdouble dc = dc_term_2d(row0, flt);
    return polar_synthesis(b, grid, K, n_phi, dc);
}

Image2D inverse_fourier_2d(const Array2<cdouble>& cart, std::size_t n, double extent,
                           double* imag_residual) {
    const double dxi = specgrid::cartesian_dxi(n, extent);
    const std::size_t off = n / 2;
    Array2<cdouble> work(n, n);
    for (std::size_t py = 0; py < n; ++py) {
        const double xi_y = (static_cast<double>(py) - static_cast<double>(off)) * dxi;
        const std::size_t qy = (py + n - off) % n;
        for (std::size_t px = 0; px < n; ++px) {
            const double xi_x = (static_cast<double>(px) - static_cast<double>(off)) * dxi;
            const std::size_t qx = (px + n - off) % n;
            work(qy, qx) = cart(py, px) * std::polar(1.0, -extent * (xi_x + xi_y));
        }
    }
    fft_2d(work.data(), n, n, +1);

    Image2D img{n, extent, std::vector<double>(n * n)};
    const double scale = dxi * dxi / kTwoPi;
    double re2 = 0.0, im2 = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
        const cdouble v = scale * work.storage()[i];
        img.values[i] = v.real();
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
    }
    if (imag_residual) *imag_residual = re2 > 0.0 ? std::sqrt(im2 / re2) : 0.0;
    return img;
}

Image2D reconstruct_2d(const SeriesData& data, const DetectorRing& ring,
                       const Recon2dOptions& opts, Recon2dDiagnostics* diag) {
    if (data.tag != GeometryTag::Ring)
        throw validation_error("reconstruct_2d: series geometry is not a detector ring");
    if (data.detector_count() != ring.count)
        throw validation_error("reconstruct_2d: detector count mismatch");
    const double extent = opts.extent > 0.0 ? opts.extent : ring.R;
    const PolarSpectrum spec = ring_polar_spectrum(data, ring.R, opts);
    const Array2<cdouble> cart = specgrid::polar_to_cartesian(spec, opts.n, extent);
    double resid = 0.0;
    Image2D img = inverse_fourier_2d(cart, opts.n, extent, &resid);
    if (diag) diag->imag_residual = resid;
    return img;
}

}  // namespace tatrec
