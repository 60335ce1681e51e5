#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "eit/probe.hpp"

namespace eit {

// Singular part of the boundary-dipole solution:
// V(P,Q;x) = -(1/pi)(log|P-x| - log|Q-x|).
double v_singular(Vec2 p, Vec2 q, Vec2 x);
Vec2 grad_v_singular(Vec2 p, Vec2 q, Vec2 x);

// Normal trace of V on the boundary,
// Psi(y) = -(1/pi)((y-P)/|y-P|^2 - (y-Q)/|y-Q|^2) . nu(y),
// evaluated at edge midpoints (P, Q are mesh nodes, so midpoints stay clear of
// the singularities).
BoundaryData psi_trace(Vec2 p, Vec2 q, const Mesh& m);

// Finite-energy corrector: conductivity solve with volume load
// -(gamma-1) grad V (supported on the inclusions) and Neumann data -Psi,
// gauged to zero boundary mean.
ScalarField solve_corrector(const Mesh& m, const InclusionSet& incl, int p_node, int q_node,
                            const SolveOptions& opts = {});
ScalarField solve_corrector(const LinearSystem& sys_gamma, const InclusionSet& incl, int p_node,
                            int q_node, const SolveOptions& opts = {});

// Composite dipole field V + corrector with nodal and edge-midpoint evaluation.
struct DipoleField {
    const Mesh* mesh = nullptr;
    int p_node = -1, q_node = -1;
    Vec2 p, q;
    ScalarField corrector;

    double value_at_node(int node) const;      // throws at the poles P, Q
    double value_at_edge_midpoint(int a, int b) const;
};

DipoleField build_dipole(const Mesh& m, const InclusionSet& incl, int p_node, int q_node,
                         const SolveOptions& opts = {});
DipoleField build_dipole(const LinearSystem& sys_gamma, const InclusionSet& incl, int p_node,
                         int q_node, const SolveOptions& opts = {});

struct TestFunction {
    std::string name;
    std::function<double(Vec2)> value;
    std::function<Vec2(Vec2)> gradient;
};

std::vector<TestFunction> standard_test_functions();

// Residual of the weak dipole identity
//   integral gamma grad D . grad phi dx  vs  phi(P) - phi(Q),
// relative to max(1, |phi(P)-phi(Q)|).  grad V is analytic at quadrature
// points; triangles within 3 h of a pole are subdivided twice (16 subcells).
double verify_weak_form(const Mesh& m, const InclusionSet& incl, const DipoleField& dip,
                        const TestFunction& phi);

// Dipole-path value of the measurement gap:
//   sum_j (k_j - 1) contour integral over the inclusion boundary of
//   D(P,Q;.) times the scaled probe normal derivative (normals point into the
//   inclusion).
std::complex<double> rep_formula_rhs(const Mesh& m, const InclusionSet& incl,
                                     const DipoleField& dip, const ProbeParams& params,
                                     bool flip_normals = false);

// Volume form of the same functional on one inclusion component:
//   -(k_j - 1) integral over D_j of grad(scaled v) . grad D dx.
std::complex<double> rep_formula_volume(const Mesh& m, const InclusionSet& incl,
                                        const DipoleField& dip, const ProbeParams& params,
                                        int component);
std::complex<double> rep_formula_boundary_component(const Mesh& m, const InclusionSet& incl,
                                                    const DipoleField& dip,
                                                    const ProbeParams& params, int component);

struct RepresentationProbeResult {
    double tau = 0.0;
    double t = 0.0;
    std::complex<double> forward{};
    std::complex<double> dipole{};
    double rel_discrepancy = 0.0;
    bool failed = false;
    std::string error;
};

struct RepresentationReport {
    std::vector<RepresentationProbeResult> probes;
    double max_rel = 0.0;
    double median_rel = 0.0;
};

// Forward path (lambda_diff of the probe trace) against the dipole path for
// each probe; max and median relative discrepancy.
RepresentationReport verify_representation(const Mesh& m, const InclusionSet& incl, int p_node,
                                           int q_node, const std::vector<ProbeParams>& probes,
                                           const SolveOptions& opts = {}, int jobs = 1,
                                           bool flip_normals = false);

} // namespace eit
