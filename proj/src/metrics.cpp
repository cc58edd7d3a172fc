#include "tatrec/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "tatrec/forward.hpp"
#include "tatrec/recon2d.hpp"

namespace tatrec {

namespace {

void check_grids(std::size_t na, std::size_t nb, double ea, double eb) {
    if (na != nb || std::abs(ea - eb) > 1e-12 * std::max(1.0, std::abs(eb)))
        throw validation_error("rel_l2_error: image grids do not match");
}

}  // namespace

double rel_l2_error(const Image2D& a, const Image2D& b, double mask_radius) {
    check_grids(a.n, b.n, a.extent, b.extent);
    double num = 0.0, den = 0.0;
    for (std::size_t iy = 0; iy < b.n; ++iy) {
        const double y = b.coord(iy);
        for (std::size_t ix = 0; ix < b.n; ++ix) {
            const double x = b.coord(ix);
            if (x * x + y * y > mask_radius * mask_radius) continue;
            const double d = a.at(ix, iy) - b.at(ix, iy);
            num += d * d;
            den += b.at(ix, iy) * b.at(ix, iy);
        }
    }
    if (den == 0.0) throw validation_error("rel_l2_error: zero reference image");
    return std::sqrt(num / den);
}

double rel_l2_error(const Image3D& a, const Image3D& b, double mask_radius) {
    check_grids(a.n, b.n, a.extent, b.extent);
    double num = 0.0, den = 0.0;
    for (std::size_t iz = 0; iz < b.n; ++iz) {
        const double z = b.coord(iz);
        for (std::size_t iy = 0; iy < b.n; ++iy) {
            const double y = b.coord(iy);
            for (std::size_t ix = 0; ix < b.n; ++ix) {
                const double x = b.coord(ix);
                if (x * x + y * y + z * z > mask_radius * mask_radius) continue;
                const double d = a.at(ix, iy, iz) - b.at(ix, iy, iz);
                num += d * d;
                den += b.at(ix, iy, iz) * b.at(ix, iy, iz);
            }
        }
    }
    if (den == 0.0) throw validation_error("rel_l2_error: zero reference image");
    return std::sqrt(num / den);
}

ScalingReport scaling_probe(const std::string& pipeline,
                            const std::vector<std::size_t>& sizes) {
    if (pipeline != "recon2d")
        throw validation_error("scaling_probe: unknown pipeline '" + pipeline + "'");
    if (sizes.empty()) throw validation_error("scaling_probe: empty size list");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw validation_error("scaling_probe: sizes must be ascending");

    const Phantom phantom(2, {{PrimitiveKind::Gaussian, {0.25, 0.1, 0.0}, 0.08, 1.0}});

    ScalingReport report;
    for (std::size_t n : sizes) {
        // Geometry scaled with n so every stage participates in the cost.
        DetectorRing ring{1.05, n};
        TimeGrid time{5.0 / static_cast<double>(2 * n - 1), 2 * n};
        const SeriesData data = forward_2d(phantom, ring, time);
        Recon2dOptions opts;
        opts.n = n;

        std::vector<double> runs;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const Image2D img = reconstruct_2d(data, ring, opts);
            const auto t1 = std::chrono::steady_clock::now();
            (void)img;
            runs.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        std::sort(runs.begin(), runs.end());
        report.rows.push_back({n, runs[1]});
    }

    // Least squares fit of log t = c + p log n + log log n.
    if (report.rows.size() >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double m = static_cast<double>(report.rows.size());
        for (const auto& row : report.rows) {
            const double x = std::log(static_cast<double>(row.n));
            const double y = std::log(row.seconds) - std::log(x);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        report.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return report;
}

std::string scaling_csv(const ScalingReport& report) {
    std::ostringstream os;
    os << "n,seconds,fitted_exponent\n";
    os.precision(6);
    for (const auto& row : report.rows)
        os << row.n << "," << row.seconds << "," << report.fitted_exponent << "\n";
    return os.str();
}

}  // namespace tatrec
