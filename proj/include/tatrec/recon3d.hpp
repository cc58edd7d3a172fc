#pragma once

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"
#include "tatrec/recon3d_types.hpp"
#include "tatrec/specfun.hpp"

namespace tatrec {

// Spherical-geometry inversion: temporal FFT, spherical-harmonic analysis
// per lambda (azimuthal FFT + Gauss-Legendre quadrature against normalized
// Legendre functions), spectral filter
//   b_{s,p} = sqrt(2/pi) i^s P^_{s,p} / (lambda^2 h_s^(1)(lambda R)),
// harmonic synthesis of F(Lambda), dc identity for F(0), regridding and
// inverse 3D FFT. The Legendre transform is the direct O(S^2) one; analysis
// and synthesis are the only pieces an accelerated transform would replace.

struct Recon3dOptions {
    std::size_t n = 64;    // image size per axis
    double extent = 0.0;   // 0 -> sphere radius
    int S = 0;             // 0 -> min(n_theta - 1, ceil(e*lmax*R/2))
};

struct Recon3dDiagnostics {
    double imag_residual = 0.0;
};

/// Step 2: coefficients from values on the sphere grid at one lambda row.
/// grid_values is [n_theta][n_phi] flattened; exact for band-limited input.
void sph_analysis_row(const DetectorSphere& sphere, const specfun::LegendreTable& table,
                      int S, const cdouble* grid_values, cdouble* coeffs);

SphericalHarmonicSpectrum sph_analysis(const Array2<cdouble>& phat,
                                       const DetectorSphere& sphere,
                                       const specfun::LegendreTable& table,
                                       const FrequencyGrid& grid, int S);

/// Step 3: filtered coefficients; overflowed spherical Hankel -> 0.
Array2<cdouble> spectral_filter_3d(const SphericalHarmonicSpectrum& spec, double R);

/// Step 4: F on the spherical grid (with pole rows) from coefficients.
SphericalSpectrum sph_synthesis(const Array2<cdouble>& b, const FrequencyGrid& grid,
                                const DetectorSphere& sphere,
                                const specfun::LegendreTable& table, int S, cdouble dc);

/// Step 5: trapezoid rule of the dc identity for F(0); the integrand
/// vanishes at lambda = 0.
cdouble dc_term_3d(const std::vector<cdouble>& phat00, double R, const FrequencyGrid& grid);

Image3D reconstruct_3d(const SeriesData& data, const DetectorSphere& sphere,
                       const Recon3dOptions& opts, Recon3dDiagnostics* diag = nullptr);

int default_max_degree(const DetectorSphere& sphere, const FrequencyGrid& grid, double R);

}  // namespace tatrec
