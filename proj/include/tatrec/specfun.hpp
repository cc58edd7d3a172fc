#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tatrec/core.hpp"

namespace tatrec {
namespace specfun {

// Cylindrical and spherical Bessel/Hankel evaluation used by every
// reconstruction pipeline, plus orthonormal spherical harmonics.
//
// For orders far above the argument the Weber function Y (and hence H^(1))
// grows super-exponentially and eventually exceeds the double range. Such
// values are reported with overflowed = true; the spectral filters treat an
// overflowed denominator as a vanishing coefficient, which is the correct
// limit since the paired J/j factor underflows first.

struct Hankel1 {
    cdouble value{0.0, 0.0};
    bool overflowed = false;
};

/// J_order(x) for order >= 0, x >= 0. Absolute accuracy ~1e-13 for
/// x <= 1e3, order <= 1e3 (Miller downward recurrence, normalized).
double bessel_j(int order, double x);

/// Fills out[0..kmax] with J_0(x) .. J_kmax(x).
void bessel_j_array(int kmax, double x, std::vector<double>& out);

/// H_order^(1)(x) = J_order(x) + i Y_order(x), x > 0.
Hankel1 hankel1(int order, double x);

/// Fills values[0..kmax]; overflow[k] marks saturated entries.
void hankel1_array(int kmax, double x, std::vector<cdouble>& values,
                   std::vector<std::uint8_t>& overflow);

/// Spherical Bessel j_order(x), x >= 0; j_0(0) = 1, j_s(0) = 0 for s >= 1.
double spherical_j(int order, double x);
void spherical_j_array(int smax, double x, std::vector<double>& out);

/// Spherical Hankel h_order^(1)(x), x > 0; h_0^(1)(x) = -i e^{ix}/x.
Hankel1 spherical_h1(int order, double x);
void spherical_h1_array(int smax, double x, std::vector<cdouble>& values,
                        std::vector<std::uint8_t>& overflow);

/// Orthonormal complex spherical harmonic Y_degree^order(theta, phi),
/// Condon-Shortley phase included; Y_s^{-p} = (-1)^p conj(Y_s^p).
cdouble sph_harm(int degree, int order, double theta, double phi);

/// Normalized associated Legendre values, P\bar_s^p(mu) for 0<=p<=s<=max_degree,
/// tabulated at a fixed set of mu = cos(theta) nodes. Row layout is packed
/// triangular: index(s,p) = s(s+1)/2 + p. Immutable after construction.
class LegendreTable {
  public:
    LegendreTable(int max_degree, std::vector<double> mu_nodes);

    int max_degree() const { return max_degree_; }
    const std::vector<double>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }

    double at(int s, int p, std::size_t node) const {
        return values_(static_cast<std::size_t>(s) * (s + 1) / 2 + p, node);
    }
    const double* row(int s, int p) const {
        return values_.row(static_cast<std::size_t>(s) * (s + 1) / 2 + p);
    }

    const Array2<double>& values() const { return values_; }

  private:
    int max_degree_;
    std::vector<double> nodes_;
    Array2<double> values_;
};

/// Evaluates the column of normalized Legendre values at a single mu;
/// out is packed triangular as in LegendreTable.
void legendre_column(int max_degree, double mu, std::vector<double>& out);

/// Scaled modified Bessel functions e^{-x} I_0(x), e^{-x} I_1(x), x >= 0.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// Harmonic-series truncation order for argument lambda*R: orders above
/// ~e*x/2 contribute factors that decay super-exponentially.
inline int truncation_order(double x) {
    return static_cast<int>(std::ceil(2.718281828459045 * x / 2.0)) + 20;
}

}  // namespace specfun
}  // namespace tatrec
