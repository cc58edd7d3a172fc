#pragma once

#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"
#include "tatrec/recon2d.hpp"

namespace tatrec {

// Rotating line-detector inversion: each rotation angle alpha yields a 2D
// circular problem for the X-ray projection M_alpha of f; its polar spectrum
// is, by the slice-projection theorem, the 3D transform of f restricted to
// the plane spanned by N(alpha) and e2. The planes share the vertical
// frequency axis; interpolation is cubic in lambda, linear in the in-plane
// angle, then linear across alpha (period pi with reflected in-plane angle).

struct RotatingPlaneSpectrum {
    std::vector<double> alphas;
    std::vector<PolarSpectrum> planes;
};

struct ReconLinedetOptions {
    std::size_t n = 128;   // image size per axis
    double extent = 0.0;   // 0 -> cylinder radius
    int K = 0;
    std::size_t n_phi = 0;
};

/// Steps 1-5 of the 2D algorithm applied to one alpha slice. Detector rows
/// are indexed by beta; the detector at beta sits at in-plane polar angle
/// pi/2 - beta, which shows up as the coefficient map
/// P^_k(in-plane) = (-i)^k C_{-k}(beta-frame).
PolarSpectrum line_slice_spectrum(const SeriesData& slice, double R,
                                  const ReconLinedetOptions& opts,
                                  const RingFilter* filter = nullptr);

RotatingPlaneSpectrum per_alpha_spectra(const std::vector<SeriesData>& scan,
                                        const LineDetectorGeometry& geom,
                                        const ReconLinedetOptions& opts = {});

/// Interpolates the rotating-plane samples onto the Cartesian frequency grid
/// of an n-point image (same layout as specgrid). Nodes beyond lambda_max
/// are zero; the vertical axis is averaged over all planes.
std::vector<cdouble> assemble_3d_spectrum(const RotatingPlaneSpectrum& spectra,
                                          std::size_t n, double extent);

/// Full pipeline. Streams plane spectra through the assembly two at a time,
/// so memory stays at O(n_lambda * n_phi) plus the output grid.
Image3D reconstruct_linedet(const std::vector<SeriesData>& scan,
                            const LineDetectorGeometry& geom,
                            const ReconLinedetOptions& opts,
                            Recon2dDiagnostics* diag = nullptr);

}  // namespace tatrec
