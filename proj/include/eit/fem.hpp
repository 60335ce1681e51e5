#pragma once

#include <complex>
#include <string>
#include <vector>

#include "eit/mesh.hpp"

namespace eit {

// Piecewise-constant conductivity: 1 on the background, k_j on inclusion j.
struct ConductivityMap {
    double background = 1.0;
    std::vector<double> inclusion_values;

    static ConductivityMap from_inclusions(const InclusionSet& incl);
    static ConductivityMap homogeneous(size_t component_count);
    double value(int region) const {
        return region < 0 ? background : inclusion_values[(size_t)region];
    }
};

// Piecewise-constant complex Neumann data, one value per boundary edge
// (current density at the edge midpoint).
struct BoundaryData {
    std::vector<std::complex<double>> edge_values;

    // quadrature mean: sum of value * edge length
    std::complex<double> weighted_sum(const Mesh& m) const;
};

struct ScalarField {
    std::vector<double> values; // nodal
};

struct ComplexField {
    std::vector<std::complex<double>> values;
};

struct SolveOptions {
    double rel_tol = 1e-12;
    double mean_rel_tol = 1e-2; // zero-mean tolerance for the Neumann load
    int max_iter_factor = 50;   // iteration cap = factor * sqrt(ndof)
};

struct SolveReport {
    int iterations = 0;
    double rel_residual = 0.0;
};

// Assembled stiffness matrix sum_T gamma_T grad phi_i . grad phi_j (CSR),
// kernel = constants, plus the boundary mass weights used for the zero-mean
// gauge.
struct LinearSystem {
    const Mesh* mesh = nullptr;
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> cols;
    std::vector<double> vals;
    std::vector<double> diag;
    std::vector<double> boundary_mass; // integral of phi_i over the boundary
    double boundary_length = 0.0;

    void mul(const double* x, double* y) const;
};

LinearSystem assemble(const Mesh& m, const ConductivityMap& c);

// rhs_i = integral of g phi_i over the boundary, midpoint rule per edge
std::vector<double> neumann_rhs(const Mesh& m, const std::vector<double>& edge_values);

// Diagonal-preconditioned CG on the singular consistent system, residual
// projected onto the zero-mean complement each iteration; result shifted to
// zero boundary mean.  Throws when the load is incompatible beyond
// mean_rel_tol or the iteration cap is reached.
std::vector<double> solve_gauged(const LinearSystem& sys, std::vector<double> rhs,
                                 const SolveOptions& opts = {}, SolveReport* report = nullptr);

// Alternative gauge used by invariant tests: pin node 0 to zero and solve the
// reduced positive-definite system.
std::vector<double> solve_pinned(const LinearSystem& sys, std::vector<double> rhs,
                                 const SolveOptions& opts = {}, SolveReport* report = nullptr);

// Complex Neumann solve = two real solves.
ComplexField solve_neumann(const LinearSystem& sys, const BoundaryData& g,
                           const SolveOptions& opts = {}, SolveReport* report = nullptr);

double boundary_mean(const Mesh& m, const std::vector<double>& nodal);

// u(P) - u(Q); throws for interior nodes, returns 0 for P == Q.
std::complex<double> lambda_pq(const Mesh& m, const ComplexField& u, int p, int q);
double lambda_pq(const Mesh& m, const ScalarField& u, int p, int q);

// Solves with the given conductivity and with gamma = 1 on the same mesh and
// returns the difference of the point-value gaps.
std::complex<double> lambda_diff(const LinearSystem& sys_gamma, const LinearSystem& sys_one,
                                 const BoundaryData& g, int p, int q,
                                 const SolveOptions& opts = {});
std::complex<double> lambda_diff(const Mesh& m, const InclusionSet& incl, const BoundaryData& g,
                                 int p, int q, const SolveOptions& opts = {});

void export_field_csv(const Mesh& m, const ScalarField& f, const std::string& path,
                      const std::string& header_comment = "");

} // namespace eit
