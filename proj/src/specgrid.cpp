#include "tatrec/specgrid.hpp"

#include <algorithm>
#include <cmath>

#include "tatrec/fft.hpp"
#include "tatrec/threading.hpp"

namespace tatrec {
namespace specgrid {

double cartesian_dxi(std::size_t n, double extent) {
    const double dx = 2.0 * extent / static_cast<double>(n - 1);
    return kTwoPi / (static_cast<double>(n) * dx);
}

namespace {

struct CubicWeights {
    std::size_t base;  // stencil rows base-1 .. base+2
    double w[4];
};

// 4-point Lagrange stencil on the uniform lambda grid, clamped at both ends
// (one-sided near lambda = 0 and lambda_max). u is lambda / dlambda.
CubicWeights radial_weights(double u, std::size_t n_lambda) {
    std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::floor(u));
    i1 = std::clamp<std::ptrdiff_t>(i1, 1, static_cast<std::ptrdiff_t>(n_lambda) - 3);
    const double s = u - static_cast<double>(i1);
    CubicWeights cw;
    cw.base = static_cast<std::size_t>(i1);
    cw.w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
    cw.w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    cw.w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
    cw.w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
    return cw;
}

}  // namespace

cdouble radial_cubic(const Array2<cdouble>& rows, std::size_t n_lambda, double u,
                     std::size_t col) {
    const CubicWeights cw = radial_weights(u, n_lambda);
    cdouble acc{0.0, 0.0};
    for (int i = 0; i < 4; ++i) acc += cw.w[i] * rows(cw.base - 1 + i, col);
    return acc;
}

Array2<cdouble> polar_to_cartesian(const PolarSpectrum& spec, std::size_t n, double extent) {
    if (n < 2) throw validation_error("polar_to_cartesian: image grid too small");
    const double dxi = cartesian_dxi(n, extent);
    const double dl = spec.grid.dlambda();
    const double dphi = kTwoPi / static_cast<double>(spec.n_phi);
    const std::size_t off = n / 2;

    Array2<cdouble> out(n, n);
    parallel_for(n, [&](std::size_t py) {
        const double xi_y = (static_cast<double>(py) - static_cast<double>(off)) * dxi;
        for (std::size_t px = 0; px < n; ++px) {
            const double xi_x = (static_cast<double>(px) - static_cast<double>(off)) * dxi;
            const double lam = std::hypot(xi_x, xi_y);
            if (lam > spec.grid.lambda_max) continue;  // band limit: zero fill
            if (lam == 0.0) {
                out(py, px) = spec.dc;
                continue;
            }
            double phi = std::atan2(xi_y, xi_x);
            if (phi < 0.0) phi += kTwoPi;
            const double pu = phi / dphi;
            std::size_t q0 = static_cast<std::size_t>(pu);
            if (q0 >= spec.n_phi) q0 = spec.n_phi - 1;
            const std::size_t q1 = (q0 + 1) % spec.n_phi;
            const double wq = pu - static_cast<double>(q0);

            const CubicWeights cw = radial_weights(lam / dl, spec.grid.n_lambda);
            cdouble acc{0.0, 0.0};
            for (int i = 0; i < 4; ++i) {
                const cdouble* row = spec.values.row(cw.base - 1 + i);
                acc += cw.w[i] * ((1.0 - wq) * row[q0] + wq * row[q1]);
            }
            out(py, px) = acc;
        }
    });
    return out;
}

cdouble sample_polar(const PolarSpectrum& spec, double lam, double phi) {
    if (lam == 0.0) return spec.dc;
    const double dphi = kTwoPi / static_cast<double>(spec.n_phi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi -= kTwoPi;
    const double pu = phi / dphi;
    std::size_t q0 = static_cast<std::size_t>(pu);
    if (q0 >= spec.n_phi) q0 = spec.n_phi - 1;
    const std::size_t q1 = (q0 + 1) % spec.n_phi;
    const double wq = pu - static_cast<double>(q0);
    const CubicWeights cw = radial_weights(lam / spec.grid.dlambda(), spec.grid.n_lambda);
    cdouble acc{0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
        const cdouble* row = spec.values.row(cw.base - 1 + i);
        acc += cw.w[i] * ((1.0 - wq) * row[q0] + wq * row[q1]);
    }
    return acc;
}

Image3D fourier_image_3d(const std::vector<cdouble>& cart, std::size_t n, double extent,
                         int sign, double prefactor, double* imag_residual) {
    const double dxi = cartesian_dxi(n, extent);
    const std::size_t off = n / 2;
    std::vector<cdouble> work(n * n * n);
    std::vector<cdouble> axis_phase(n);
    std::vector<std::size_t> axis_bin(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double xi = (static_cast<double>(p) - static_cast<double>(off)) * dxi;
        axis_phase[p] = std::polar(1.0, -static_cast<double>(sign) * extent * xi);
        axis_bin[p] = (p + n - off) % n;
    }
    parallel_for(n, [&](std::size_t pz) {
        for (std::size_t py = 0; py < n; ++py)
            for (std::size_t px = 0; px < n; ++px)
                work[(axis_bin[pz] * n + axis_bin[py]) * n + axis_bin[px]] =
                    cart[(pz * n + py) * n + px] * axis_phase[pz] * axis_phase[py] *
                    axis_phase[px];
    });
    fft_3d(work.data(), n, n, n, sign);

    Image3D img{n, extent, std::vector<double>(n * n * n)};
    double re2 = 0.0, im2 = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        const cdouble v = prefactor * work[i];
        img.values[i] = v.real();
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
    }
    if (imag_residual) *imag_residual = re2 > 0.0 ? std::sqrt(im2 / re2) : 0.0;
    return img;
}

std::vector<cdouble> spherical_to_cartesian(const SphericalSpectrum& spec, std::size_t n,
                                            double extent) {
    if (n < 2) throw validation_error("spherical_to_cartesian: image grid too small");
    const double dxi = cartesian_dxi(n, extent);
    const double dl = spec.grid.dlambda();
    const double dphi = kTwoPi / static_cast<double>(spec.n_phi);
    const std::size_t off = n / 2;
    const std::size_t n_rows = spec.n_theta + 2;

    // Polar angles of the stored rows: poles plus interior Gauss nodes.
    std::vector<double> theta(n_rows);
    theta[0] = 0.0;
    for (std::size_t i = 0; i < spec.n_theta; ++i) theta[i + 1] = std::acos(spec.mu[i]);
    theta[n_rows - 1] = kPi;

    std::vector<cdouble> out(n * n * n, cdouble{0.0, 0.0});
    parallel_for(n, [&](std::size_t pz) {
        const double xi_z = (static_cast<double>(pz) - static_cast<double>(off)) * dxi;
        for (std::size_t py = 0; py < n; ++py) {
            const double xi_y = (static_cast<double>(py) - static_cast<double>(off)) * dxi;
            for (std::size_t px = 0; px < n; ++px) {
                const double xi_x =
                    (static_cast<double>(px) - static_cast<double>(off)) * dxi;
                const std::size_t idx = (pz * n + py) * n + px;
                const double lam = std::sqrt(xi_x * xi_x + xi_y * xi_y + xi_z * xi_z);
                if (lam > spec.grid.lambda_max) continue;
                if (lam == 0.0) {
                    out[idx] = spec.dc;
                    continue;
                }
                const double th = std::acos(std::clamp(xi_z / lam, -1.0, 1.0));
                double phi = std::atan2(xi_y, xi_x);
                if (phi < 0.0) phi += kTwoPi;

                // theta bracket (rows ascending in theta).
                std::size_t it = 0;
                {
                    std::size_t lo = 0, hi = n_rows - 1;
                    while (hi - lo > 1) {
                        const std::size_t mid = (lo + hi) / 2;
                        if (theta[mid] <= th) lo = mid;
                        else hi = mid;
                    }
                    it = lo;
                }
                const double span = theta[it + 1] - theta[it];
                const double wt = span > 0.0 ? (th - theta[it]) / span : 0.0;

                const double pu = phi / dphi;
                std::size_t q0 = static_cast<std::size_t>(pu);
                if (q0 >= spec.n_phi) q0 = spec.n_phi - 1;
                const std::size_t q1 = (q0 + 1) % spec.n_phi;
                const double wq = pu - static_cast<double>(q0);

                const CubicWeights cw = radial_weights(lam / dl, spec.grid.n_lambda);
                cdouble acc{0.0, 0.0};
                for (int i = 0; i < 4; ++i) {
                    const cdouble* row = spec.values.row(cw.base - 1 + i);
                    const cdouble v00 = row[it * spec.n_phi + q0];
                    const cdouble v01 = row[it * spec.n_phi + q1];
                    const cdouble v10 = row[(it + 1) * spec.n_phi + q0];
                    const cdouble v11 = row[(it + 1) * spec.n_phi + q1];
                    const cdouble v0 = (1.0 - wq) * v00 + wq * v01;
                    const cdouble v1 = (1.0 - wq) * v10 + wq * v11;
                    acc += cw.w[i] * ((1.0 - wt) * v0 + wt * v1);
                }
                out[idx] = acc;
            }
        }
    });
    return out;
}

}  // namespace specgrid
}  // namespace tatrec
