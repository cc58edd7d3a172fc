#pragma once

#include "tatrec/core.hpp"
#include "tatrec/recon2d.hpp"
#include "tatrec/recon3d_types.hpp"

namespace tatrec {
namespace specgrid {

// Spectral regridding: cubic 4-point Lagrange interpolation in the radial
// frequency, linear (2D) / bilinear (3D) in the angles. Nodes beyond
// lambda_max are zero-filled; the exact zero node receives the dc value.
//
// Cartesian layout: index p in [0, n) maps to frequency (p - n/2) * dxi with
// dxi = 2*pi / (n * dx) and dx the image spacing 2*extent/(n-1); element
// order matches the image array (x fastest).

Array2<cdouble> polar_to_cartesian(const PolarSpectrum& spec, std::size_t n, double extent);

std::vector<cdouble> spherical_to_cartesian(const SphericalSpectrum& spec, std::size_t n,
                                            double extent);

/// Frequency step of the Cartesian spectral grid for an n-point image of
/// half-width extent (vertex-centered samples).
double cartesian_dxi(std::size_t n, double extent);

/// Cubic interpolation along the lambda axis of a PolarSpectrum at fixed
/// angular index column; helper shared by the 2D/3D regridders.
cdouble radial_cubic(const Array2<cdouble>& rows, std::size_t n_lambda, double u,
                     std::size_t col);

/// Cubic-in-lambda x linear-in-phi sample of a polar spectrum at (lam, phi);
/// lam <= lambda_max assumed, the dc row covers lam < dlambda.
cdouble sample_polar(const PolarSpectrum& spec, double lam, double phi);

/// Discrete inverse transform of a Cartesian spectrum to an n^3 image with
/// kernel e^{sign * i * x.Lambda} and the given measure prefactor.
Image3D fourier_image_3d(const std::vector<cdouble>& cart, std::size_t n, double extent,
                         int sign, double prefactor, double* imag_residual);

}  // namespace specgrid
}  // namespace tatrec
