#pragma once

#include <complex>
#include <map>
#include <vector>

#include "eit/geometry.hpp"

namespace eit {

// Concentric disk inclusion in the unit disk; closed-form validation fixture
// for the forward solver.
struct DiskPhantom {
    double rho = 0.5; // inclusion radius, in (0,1)
    double k = 2.0;   // inclusion conductivity, > 0 and != 1

    void validate() const;
};

// Fourier multiplier of the boundary voltage gap between conductivity k and
// background 1 for Neumann mode e^{i n theta} on the unit circle:
//   m_n = 2 mu rho^{2n} / (n (1 - mu rho^{2n})),  mu = (1-k)/(1+k).
// Derivation: radial ansatz a r^n + b r^{-n} outside, c r^n inside, trace and
// flux continuity at r = rho, unit Neumann amplitude at r = 1.
double gap_multiplier(int n, const DiskPhantom& phantom);

// Sum_n g_n m_|n| (e^{i n thetaP} - e^{i n thetaQ}) for Fourier data
// { n != 0 -> g_n }.
std::complex<double> oracle_lambda_diff(const DiskPhantom& phantom,
                                        const std::map<int, std::complex<double>>& g_coefficients,
                                        double theta_p, double theta_q);

// Independent confirmation of gap_multiplier: radial two-point boundary value
// solve of ((r gamma f')' = gamma n^2 f / r) by finite differences, run once
// with the inclusion and once with gamma = 1; returns f_k(1) - f_1(1).
double gap_multiplier_radial_fd(int n, const DiskPhantom& phantom, int grid_points = 10000);

// Regular-polygon realization of the phantom for the FEM pipeline.
InclusionSet disk_phantom_inclusion(const DiskPhantom& phantom, int vertex_count);

struct OracleComparisonRow {
    int mode = 0;
    double theta_p = 0.0;
    double theta_q = 0.0;
    std::complex<double> fem{};
    std::complex<double> oracle{};
    double rel_error = 0.0;
};

struct OracleComparisonParams {
    double h_target = 0.02;
    int boundary_resolution = 512;
    int inclusion_vertices = 128;
    std::vector<int> modes = {1, 2, 3, 4};
    double cg_rel_tol = 1e-12;
};

// Per mode n: FEM lambda_diff for boundary data cos(n theta) between P at
// angle 0 and Q at angle pi/n (snapped to boundary nodes) against the oracle
// prediction at the snapped angles.  Antipodal Q would annihilate the even
// modes, hence the per-mode placement.
std::vector<OracleComparisonRow> compare_fem_oracle(const OracleComparisonParams& params,
                                                    const DiskPhantom& phantom);

} // namespace eit
