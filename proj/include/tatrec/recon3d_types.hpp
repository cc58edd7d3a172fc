#pragma once

#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/recon2d.hpp"

namespace tatrec {

// Spherical-harmonic coefficients P^_{s,p}(lambda), 0 <= s <= S, |p| <= s.
// Packed per lambda: index(s,p) = s^2 + (p + s), i.e. (S+1)^2 per row.
struct SphericalHarmonicSpectrum {
    FrequencyGrid grid;
    int S = 0;
    Array2<cdouble> coeffs;  // [lambda index][packed (s,p)]

    static std::size_t pack(int s, int p) {
        return static_cast<std::size_t>(s) * s + static_cast<std::size_t>(p + s);
    }
    cdouble at(std::size_t m, int s, int p) const { return coeffs(m, pack(s, p)); }
};

// F(Lambda) sampled on the spherical grid, with explicit pole rows so the
// angular interpolation never extrapolates. Row layout per lambda:
// theta index it in [0, n_theta+2) with it=0 the north pole (mu=+1),
// it=n_theta+1 the south pole; azimuth index ip in [0, n_phi).
struct SphericalSpectrum {
    FrequencyGrid grid;
    std::size_t n_theta = 0;  // interior Gauss-Legendre rows
    std::size_t n_phi = 0;
    std::vector<double> mu;   // interior nodes, descending from +1
    Array2<cdouble> values;   // [lambda index][it * n_phi + ip]
    cdouble dc{0.0, 0.0};

    double phi(std::size_t q) const {
        return kTwoPi * static_cast<double>(q) / static_cast<double>(n_phi);
    }
};

}  // namespace tatrec
