#pragma once

#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"

namespace tatrec {

// Baseline reconstruction: solve the wave equation backward in time on a
// square with the explicit leapfrog scheme, enforcing the measured pressure
// as Dirichlet data on the boundary nodes. Second order in space and time;
// used for accuracy/speed comparison against the spectral method.

struct SquareBoundaryData {
    double L = 0.0;        // square is [-L, L]^2
    std::size_t n = 0;     // interior grid is n x n including boundary nodes
    TimeGrid time;
    Array2<double> values;  // [boundary node][time], row-major node order

    std::size_t boundary_count() const { return 4 * n - 4; }
};

/// Boundary-node coordinates in the canonical order (row-major scan of the
/// n x n grid keeping only boundary nodes).
std::vector<Vec2> square_boundary_points(double L, std::size_t n);

SquareBoundaryData forward_square_boundary(const Phantom& phantom, double L,
                                           std::size_t n, const TimeGrid& time);

/// Interior field at t = 0. If the data time step violates the CFL bound
/// dt <= dx/sqrt(2), the series is linearly resampled to the finest
/// admissible step (integer refinement).
Image2D time_reverse_2d(const SquareBoundaryData& bdata);

/// One interior leapfrog step: next = 2 cur - prev + r2 * Lap_h(cur), where
/// r2 = (c dt / dx)^2; boundary rows are left untouched.
void leapfrog_step(const std::vector<double>& prev, const std::vector<double>& cur,
                   std::vector<double>& next, std::size_t n, double r2);

/// Conserved discrete energy of the leapfrog scheme with zero Dirichlet
/// data: 0.5 ||(cur - prev)/dt||^2 + 0.5 a_h(cur, prev), with a_h the
/// discrete Dirichlet form. Constant along exact leapfrog trajectories.
double leapfrog_energy(const std::vector<double>& prev, const std::vector<double>& cur,
                       std::size_t n, double dx, double dt);

}  // namespace tatrec
