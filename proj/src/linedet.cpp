#include "tatrec/linedet.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "tatrec/specgrid.hpp"
#include "tatrec/threading.hpp"

namespace tatrec {

namespace {

// In-plane polar angle of a Cartesian frequency node relative to the plane
// through alpha*: mu1 along N(alpha), mu2 along e2 (the y axis).
struct NodeFrame {
    double alpha_star;  // in [0, pi)
    double rho;         // horizontal frequency magnitude
    bool negate;        // horizontal part along -N(alpha*)
};

NodeFrame node_frame(double xi_x, double xi_z) {
    const double rho = std::hypot(xi_x, xi_z);
    // Horizontal direction (xi_x, xi_z) = rho * (-sin a, cos a).
    double a = std::atan2(-xi_x, xi_z);
    if (a < 0.0) a += kTwoPi;
    if (a < kPi) return {a, rho, false};
    return {a - kPi, rho, true};
}

struct Bracket {
    std::size_t lo;     // plane index
    std::size_t hi;     // plane index (wraps to 0 with reflection)
    bool wrap;
    double w;           // weight of hi
};

Bracket alpha_bracket(const std::vector<double>& alphas, double a) {
    const std::size_t na = alphas.size();
    if (na == 1) return {0, 0, false, 0.0};
    std::size_t lo = 0, hi = na;  // invariant alphas[lo] <= a < alphas[hi] (alphas[na] = pi)
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (alphas[mid] <= a) lo = mid;
        else hi = mid;
    }
    if (lo + 1 == na) {
        const double span = kPi - alphas[na - 1] + alphas[0];
        return {na - 1, 0, true, (a - alphas[na - 1]) / span};
    }
    const double span = alphas[lo + 1] - alphas[lo];
    return {lo, lo + 1, false, (a - alphas[lo]) / span};
}

cdouble sample_with_reflection(const PolarSpectrum& plane, double lam, double phi,
                               bool reflect) {
    return specgrid::sample_polar(plane, lam, reflect ? kPi - phi : phi);
}

}  // namespace

PolarSpectrum line_slice_spectrum(const SeriesData& slice, double R,
                                  const ReconLinedetOptions& opts,
                                  const RingFilter* filter) {
    if (slice.tag != GeometryTag::LineSlice)
        throw validation_error("line_slice_spectrum: series is not a line-detector slice");
    const FrequencyGrid grid = FrequencyGrid::for_time_grid(slice.time);
    const int K = opts.K > 0 ? opts.K
                             : default_angular_order(slice.detector_count(), grid, R);
    const std::size_t n_phi =
        opts.n_phi > 0 ? opts.n_phi
                       : next_pow2(std::max<std::size_t>(2 * static_cast<std::size_t>(K) + 2, 256));

    std::optional<RingFilter> local;
    if (!filter) local.emplace(R, grid, K);
    const RingFilter& flt = filter ? *filter : *local;

    const Array2<cdouble> phat = time_fft(slice, grid);
    const HarmonicSpectrum2D beta_frame = angular_fourier(phat, grid, K);

    // Detector at beta sits at ring angle pi/2 - beta: flip the coefficient
    // index and apply the (-i)^k quarter-turn phase.
    HarmonicSpectrum2D harm;
    harm.grid = grid;
    harm.K = K;
    harm.coeffs = Array2<cdouble>(2 * K + 1, grid.n_lambda);
    const cdouble phase[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    for (int k = -K; k <= K; ++k) {
        const cdouble ph = phase[((k % 4) + 4) % 4];
        for (std::size_t m = 0; m < grid.n_lambda; ++m)
            harm.coeffs(k + K, m) = ph * beta_frame.at(-k, m);
    }

    const Array2<cdouble> b = spectral_filter_2d(harm, flt);
    std::vector<cdouble> row0(grid.n_lambda);
    for (std::size_t m = 0; m < grid.n_lambda; ++m) row0[m] = harm.at(0, m);
    const cdouble dc = dc_term_2d(row0, flt);
    return polar_synthesis(b, grid, K, n_phi, dc);
}

RotatingPlaneSpectrum per_alpha_spectra(const std::vector<SeriesData>& scan,
                                        const LineDetectorGeometry& geom,
                                        const ReconLinedetOptions& opts) {
    geom.validate();
    if (scan.size() != geom.alphas.size())
        throw validation_error("per_alpha_spectra: slice count does not match geometry");
    RotatingPlaneSpectrum out;
    out.alphas = geom.alphas;
    out.planes.resize(scan.size());

    std::optional<RingFilter> filter;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const SeriesData& slice = scan[i];
        if (slice.detector_count() != geom.n_beta)
            throw validation_error("per_alpha_spectra: detector count mismatch at alpha index " +
                                   std::to_string(i));
        if (std::abs(slice.alpha - geom.alphas[i]) > 1e-12)
            throw validation_error("per_alpha_spectra: slice angle mismatch at alpha index " +
                                   std::to_string(i));
        if (!filter) {
            const FrequencyGrid grid = FrequencyGrid::for_time_grid(slice.time);
            const int K = opts.K > 0 ? opts.K
                                     : default_angular_order(geom.n_beta, grid, geom.R);
            filter.emplace(geom.R, grid, K);
        }
        out.planes[i] = line_slice_spectrum(slice, geom.R, opts, &*filter);
    }
    return out;
}

std::vector<cdouble> assemble_3d_spectrum(const RotatingPlaneSpectrum& spectra,
                                          std::size_t n, double extent) {
    if (spectra.planes.size() < 2)
        throw validation_error("assemble_3d_spectrum: need at least 2 planes");
    const std::size_t na = spectra.planes.size();
    const double dxi = specgrid::cartesian_dxi(n, extent);
    const double lambda_max = spectra.planes[0].grid.lambda_max;
    const std::size_t off = n / 2;

    cdouble dc_mean{0.0, 0.0};
    for (const auto& p : spectra.planes) dc_mean += p.dc;
    dc_mean /= static_cast<double>(na);

    std::vector<cdouble> out(n * n * n, cdouble{0.0, 0.0});
    parallel_for(n, [&](std::size_t pz) {
        const double xi_z = (static_cast<double>(pz) - static_cast<double>(off)) * dxi;
        for (std::size_t px = 0; px < n; ++px) {
            const double xi_x = (static_cast<double>(px) - static_cast<double>(off)) * dxi;
            const NodeFrame frame = node_frame(xi_x, xi_z);
            const bool on_axis = frame.rho < 1e-300;
            const Bracket br = on_axis ? Bracket{0, 0, false, 0.0}
                                       : alpha_bracket(spectra.alphas, frame.alpha_star);
            for (std::size_t py = 0; py < n; ++py) {
                const double xi_y =
                    (static_cast<double>(py) - static_cast<double>(off)) * dxi;
                const std::size_t idx = (pz * n + py) * n + px;
                const double lam =
                    std::sqrt(frame.rho * frame.rho + xi_y * xi_y);
                if (lam > lambda_max) continue;
                if (lam == 0.0) {
                    out[idx] = dc_mean;
                    continue;
                }
                if (on_axis) {
                    // Shared vertical axis: average over every plane.
                    const double phi = xi_y > 0.0 ? 0.5 * kPi : 1.5 * kPi;
                    cdouble acc{0.0, 0.0};
                    for (const auto& plane : spectra.planes)
                        acc += specgrid::sample_polar(plane, lam, phi);
                    out[idx] = acc / static_cast<double>(na);
                    continue;
                }
                const double mu1 = frame.negate ? -frame.rho : frame.rho;
                double phi = std::atan2(xi_y, mu1);
                if (phi < 0.0) phi += kTwoPi;
                const cdouble v_lo =
                    specgrid::sample_polar(spectra.planes[br.lo], lam, phi);
                const cdouble v_hi = sample_with_reflection(
                    spectra.planes[br.hi], lam, phi, br.wrap);
                out[idx] = (1.0 - br.w) * v_lo + br.w * v_hi;
            }
        }
    });
    return out;
}

Image3D reconstruct_linedet(const std::vector<SeriesData>& scan,
                            const LineDetectorGeometry& geom,
                            const ReconLinedetOptions& opts,
                            Recon2dDiagnostics* diag) {
    geom.validate();
    if (scan.size() != geom.alphas.size())
        throw validation_error("reconstruct_linedet: slice count does not match geometry");
    if (scan.size() < 2)
        throw validation_error("reconstruct_linedet: need at least 2 rotation angles");
    const std::size_t na = scan.size();
    const std::size_t n = opts.n;
    const double extent = opts.extent > 0.0 ? opts.extent : geom.R;
    const double dxi = specgrid::cartesian_dxi(n, extent);
    const std::size_t off = n / 2;

    const FrequencyGrid grid = FrequencyGrid::for_time_grid(scan[0].time);
    const int K = opts.K > 0 ? opts.K : default_angular_order(geom.n_beta, grid, geom.R);
    const RingFilter filter(geom.R, grid, K);

    // Group (px, pz) columns by bracketing alpha interval.
    struct Column {
        std::size_t px, pz;
        double mu1;
        double w;
        bool wrap;
    };
    std::vector<std::vector<Column>> groups(na);
    std::optional<std::pair<std::size_t, std::size_t>> axis_col;
    for (std::size_t pz = 0; pz < n; ++pz) {
        const double xi_z = (static_cast<double>(pz) - static_cast<double>(off)) * dxi;
        for (std::size_t px = 0; px < n; ++px) {
            const double xi_x = (static_cast<double>(px) - static_cast<double>(off)) * dxi;
            const NodeFrame frame = node_frame(xi_x, xi_z);
            if (frame.rho < 1e-300) {
                axis_col = {px, pz};
                continue;
            }
            const Bracket br = alpha_bracket(geom.alphas, frame.alpha_star);
            groups[br.lo].push_back(
                {px, pz, frame.negate ? -frame.rho : frame.rho, br.w, br.wrap});
        }
    }

    std::vector<cdouble> cart(n * n * n, cdouble{0.0, 0.0});
    std::vector<cdouble> axis_acc(n, cdouble{0.0, 0.0});
    cdouble dc_acc{0.0, 0.0};

    auto make_plane = [&](std::size_t ia) {
        return line_slice_spectrum(scan[ia], geom.R, opts, &filter);
    };

    PolarSpectrum plane_first = make_plane(0);
    PolarSpectrum plane_lo = plane_first;
    std::optional<PolarSpectrum> plane_hi;

    for (std::size_t ia = 0; ia < na; ++ia) {
        if (ia > 0) {
            plane_lo = std::move(*plane_hi);
            plane_hi.reset();
        }
        const bool wrap_interval = (ia + 1 == na);
        const PolarSpectrum* hi_ptr;
        if (wrap_interval) {
            hi_ptr = &plane_first;
        } else {
            plane_hi = make_plane(ia + 1);
            hi_ptr = &*plane_hi;
        }

        // Accumulate the shared-axis and dc averages from plane_lo.
        dc_acc += plane_lo.dc;
        for (std::size_t py = 0; py < n; ++py) {
            const double xi_y = (static_cast<double>(py) - static_cast<double>(off)) * dxi;
            const double lam = std::abs(xi_y);
            if (lam == 0.0 || lam > grid.lambda_max) continue;
            const double phi = xi_y > 0.0 ? 0.5 * kPi : 1.5 * kPi;
            axis_acc[py] += specgrid::sample_polar(plane_lo, lam, phi);
        }

        const auto& cols = groups[ia];
        const PolarSpectrum& lo = plane_lo;
        const PolarSpectrum& hi = *hi_ptr;
        parallel_for(cols.size(), [&](std::size_t ci) {
            const Column& col = cols[ci];
            for (std::size_t py = 0; py < n; ++py) {
                const double xi_y =
                    (static_cast<double>(py) - static_cast<double>(off)) * dxi;
                const double lam = std::sqrt(col.mu1 * col.mu1 + xi_y * xi_y);
                if (lam > grid.lambda_max || lam == 0.0) continue;
                double phi = std::atan2(xi_y, col.mu1);
                if (phi < 0.0) phi += kTwoPi;
                const cdouble v_lo = specgrid::sample_polar(lo, lam, phi);
                const cdouble v_hi = sample_with_reflection(hi, lam, phi, col.wrap);
                cart[(col.pz * n + py) * n + col.px] =
                    (1.0 - col.w) * v_lo + col.w * v_hi;
            }
        });
    }

    if (axis_col) {
        const auto [px, pz] = *axis_col;
        for (std::size_t py = 0; py < n; ++py) {
            const std::size_t idx = (pz * n + py) * n + px;
            if (py == off) cart[idx] = dc_acc / static_cast<double>(na);
            else cart[idx] = axis_acc[py] / static_cast<double>(na);
        }
    }

    // f(x) = (2 pi)^{-2} int f^_2D-interp(Lambda) e^{+i x.Lambda} dLambda.
    const double prefactor = dxi * dxi * dxi / (kTwoPi * kTwoPi);
    double resid = 0.0;
    Image3D img = specgrid::fourier_image_3d(cart, n, extent, +1, prefactor, &resid);
    if (diag) diag->imag_residual = resid;
    return img;
}

}  // namespace tatrec
