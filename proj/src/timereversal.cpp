#include "tatrec/timereversal.hpp"

#include <algorithm>
#include <cmath>

#include "tatrec/forward.hpp"
#include "tatrec/threading.hpp"

namespace tatrec {

std::vector<Vec2> square_boundary_points(double L, std::size_t n) {
    std::vector<Vec2> pts;
    pts.reserve(4 * n - 4);
    const double h = 2.0 * L / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i != 0 && i != n - 1 && j != 0 && j != n - 1) continue;
            pts.push_back({-L + h * static_cast<double>(i), -L + h * static_cast<double>(j)});
        }
    }
    return pts;
}

SquareBoundaryData forward_square_boundary(const Phantom& phantom, double L,
                                           std::size_t n, const TimeGrid& time) {
    if (phantom.dimension() != 2)
        throw validation_error("forward_square_boundary: phantom must be 2D");
    if (n < 3) throw validation_error("forward_square_boundary: grid too small");
    if (phantom.support_radius() >= L)
        throw validation_error("forward_square_boundary: support reaches the square");
    SquareBoundaryData out;
    out.L = L;
    out.n = n;
    out.time = time;
    out.values = point_series_2d(phantom, square_boundary_points(L, n), time);
    return out;
}

void leapfrog_step(const std::vector<double>& prev, const std::vector<double>& cur,
                   std::vector<double>& next, std::size_t n, double r2) {
    parallel_for(n - 2, [&](std::size_t row) {
        const std::size_t j = row + 1;
        const double* c = cur.data() + j * n;
        const double* cu = cur.data() + (j + 1) * n;
        const double* cd = cur.data() + (j - 1) * n;
        const double* p = prev.data() + j * n;
        double* out = next.data() + j * n;
        for (std::size_t i = 1; i + 1 < n; ++i)
            out[i] = 2.0 * c[i] - p[i] + r2 * (c[i + 1] + c[i - 1] + cu[i] + cd[i] - 4.0 * c[i]);
    });
}

double leapfrog_energy(const std::vector<double>& prev, const std::vector<double>& cur,
                       std::size_t n, double dx, double dt) {
    double kinetic = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
        const double v = (cur[i] - prev[i]) / dt;
        kinetic += v * v;
    }
    double form = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            form += (cur[j * n + i + 1] - cur[j * n + i]) * (prev[j * n + i + 1] - prev[j * n + i]);
        }
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            form += (cur[(j + 1) * n + i] - cur[j * n + i]) * (prev[(j + 1) * n + i] - prev[j * n + i]);
        }
    }
    return 0.5 * kinetic * dx * dx + 0.5 * form;
}

namespace {

// Boundary values at an intermediate time by linear interpolation of the
// recorded series.
void fill_boundary(std::vector<double>& field, const SquareBoundaryData& bdata,
                   const std::vector<std::size_t>& node_index, double t) {
    const double dt = bdata.time.dt;
    const std::size_t nt = bdata.time.nt;
    double u = t / dt;
    u = std::clamp(u, 0.0, static_cast<double>(nt - 1));
    const std::size_t i0 = std::min(static_cast<std::size_t>(u), nt - 2);
    const double w = u - static_cast<double>(i0);
    for (std::size_t b = 0; b < node_index.size(); ++b) {
        const double* row = bdata.values.row(b);
        field[node_index[b]] = (1.0 - w) * row[i0] + w * row[i0 + 1];
    }
}

}  // namespace

Image2D time_reverse_2d(const SquareBoundaryData& bdata) {
    const std::size_t n = bdata.n;
    if (n < 3) throw validation_error("time_reverse_2d: grid too small");
    if (bdata.values.rows() != bdata.boundary_count())
        throw validation_error("time_reverse_2d: boundary row count mismatch");
    bdata.time.validate();

    const double h = 2.0 * bdata.L / static_cast<double>(n - 1);
    const double dt_data = bdata.time.dt;
    const double dt_cfl = 0.98 * h / std::sqrt(2.0);
    const std::size_t refine =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt_data / dt_cfl)));
    const double dt = dt_data / static_cast<double>(refine);
    const double r2 = (dt / h) * (dt / h);
    const std::size_t steps = (bdata.time.nt - 1) * refine;

    std::vector<std::size_t> node_index;
    node_index.reserve(4 * n - 4);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            if (i == 0 || i == n - 1 || j == 0 || j == n - 1) node_index.push_back(j * n + i);

    const double T = bdata.time.t_max();
    std::vector<double> above(n * n, 0.0);  // u at t + dt
    std::vector<double> cur(n * n, 0.0);    // u at t
    std::vector<double> below(n * n, 0.0);  // u at t - dt
    fill_boundary(above, bdata, node_index, T);
    fill_boundary(cur, bdata, node_index, T - dt);

    for (std::size_t m = steps - 1; m >= 1; --m) {
        // Backward leapfrog: u^{m-1} = 2 u^m - u^{m+1} + r2 Lap u^m.
        leapfrog_step(above, cur, below, n, r2);
        fill_boundary(below, bdata, node_index, static_cast<double>(m - 1) * dt);
        std::swap(above, cur);
        std::swap(cur, below);
    }

    Image2D img{n, bdata.L, std::move(cur)};
    return img;
}

}  // namespace tatrec
