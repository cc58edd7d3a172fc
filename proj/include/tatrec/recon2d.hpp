#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"

namespace tatrec {

// Fast spectral inversion for the circular acquisition geometry:
//   1. temporal Fourier transform P(y,t) -> P^(y,lambda) on an equispaced
//      lambda grid (zero-padded FFT, e^{+i t lambda} convention),
//   2. angular Fourier series P^_k(lambda) over the detector ring,
//   3. filtering b_k = 2 (-i)^k P^_k / (pi lambda H_k^(1)(lambda R)),
//   4. Fourier synthesis of the polar spectrum f^(lambda, phi),
//   5. zero-frequency value from the dc integral identity,
//   6. polar-to-Cartesian regridding, 7. inverse 2D FFT.
// Total cost O(n^2 log n).

struct FrequencyGrid {
    double lambda_max = 0.0;
    std::size_t n_lambda = 0;

    double dlambda() const {
        return lambda_max / static_cast<double>(n_lambda - 1);
    }
    double lambda(std::size_t m) const { return dlambda() * static_cast<double>(m); }

    /// Grid implied by a time record: pad to the next power of two at least
    /// twice the record, lambda_max = pi/dt (temporal Nyquist).
    static FrequencyGrid for_time_grid(const TimeGrid& time);
    /// Padded FFT length consistent with dlambda: 2 pi / (dlambda * dt).
    std::size_t padded_length(const TimeGrid& time) const;
};

struct HarmonicSpectrum2D {
    FrequencyGrid grid;
    int K = 0;                 // coefficients for k in [-K, K]
    Array2<cdouble> coeffs;    // [k + K][lambda index]

    cdouble at(int k, std::size_t m) const {
        return coeffs(static_cast<std::size_t>(k + K), m);
    }
};

struct PolarSpectrum {
    FrequencyGrid grid;
    std::size_t n_phi = 0;
    Array2<cdouble> values;  // [lambda index][phi index]; row 0 holds dc
    cdouble dc{0.0, 0.0};

    double phi(std::size_t q) const {
        return kTwoPi * static_cast<double>(q) / static_cast<double>(n_phi);
    }
};

// Precomputed ring filter: c_k(lambda) = 2 (-i)^k / (pi lambda H_k^(1)(lambda R))
// with signed-order Hankel functions (H_{-k} = (-1)^k H_k); the phase and the
// Hankel sign cancel, so the factor depends on |k| only. Overflowed
// denominators yield 0. Shared between recon2d and the per-alpha slices of
// the line-detector pipeline.
class RingFilter {
  public:
    RingFilter(double R, const FrequencyGrid& grid, int K);

    double R() const { return R_; }
    int K() const { return K_; }
    const FrequencyGrid& grid() const { return grid_; }

    /// Filter factor for signed order k at lambda index m >= 1.
    cdouble factor(int k, std::size_t m) const {
        return factors_(m, static_cast<std::size_t>(std::abs(k)));
    }

    /// dc kernel R*J_1(lambda R) multiplying b_0 in the dc integral.
    double dc_kernel(std::size_t m) const { return dc_kernel_[m]; }

  private:
    double R_;
    int K_;
    FrequencyGrid grid_;
    Array2<cdouble> factors_;  // [lambda][|k|], 0 for lambda=0 row
    std::vector<double> dc_kernel_;
};

struct Recon2dOptions {
    std::size_t n = 256;            // image size per axis
    double extent = 0.0;            // 0 -> use ring radius
    int K = 0;                      // 0 -> min(floor((count-1)/2), ceil(e*lmax*R/2))
    std::size_t n_phi = 0;          // 0 -> pow2 >= max(2K+1, 256)
};

struct Recon2dDiagnostics {
    double imag_residual = 0.0;  // ||Im image|| / ||Re image||
};

/// Step 1. Trapezoid-consistent discrete transform, e^{+i t lambda} kernel.
Array2<cdouble> time_fft(const SeriesData& data, const FrequencyGrid& grid);

/// Step 2. Discrete angular Fourier coefficients, 1/count normalization.
HarmonicSpectrum2D angular_fourier(const Array2<cdouble>& phat,
                                   const FrequencyGrid& grid, int K);

/// Step 3. b_k(lambda) = filter * P^_k(lambda); row lambda=0 left zero.
Array2<cdouble> spectral_filter_2d(const HarmonicSpectrum2D& spec, const RingFilter& filter);

/// Step 4+5. Polar synthesis via FFT over phi plus the dc term.
PolarSpectrum polar_synthesis(const Array2<cdouble>& b, const FrequencyGrid& grid,
                              int K, std::size_t n_phi, cdouble dc);

/// Step 5. Trapezoid rule of the dc integral identity; the lambda=0 node
/// contributes zero.
cdouble dc_term_2d(const std::vector<cdouble>& phat0, const RingFilter& filter);

/// Steps 1-5 packaged: polar spectrum of the initial pressure from ring data.
PolarSpectrum ring_polar_spectrum(const SeriesData& data, double R,
                                  const Recon2dOptions& opts, const RingFilter* filter = nullptr);

/// Full pipeline; real part of the inverse transform. Warns through the
/// diagnostics when the imaginary residual exceeds 1% of the real part.
Image2D reconstruct_2d(const SeriesData& data, const DetectorRing& ring,
                       const Recon2dOptions& opts, Recon2dDiagnostics* diag = nullptr);

/// Inverse 2D Fourier transform of a Cartesian spectrum (layout produced by
/// specgrid::polar_to_cartesian), returning the real image and the imaginary
/// residual ratio.
Image2D inverse_fourier_2d(const Array2<cdouble>& cart, std::size_t n, double extent,
                           double* imag_residual = nullptr);

int default_angular_order(std::size_t detector_count, const FrequencyGrid& grid, double R);

}  // namespace tatrec
