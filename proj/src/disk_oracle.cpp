#include "eit/disk_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "eit/fem.hpp"

namespace eit {

void DiskPhantom::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("disk phantom: rho must be in (0,1)");
    if (!(k > 0.0) || k == 1.0)
        throw std::invalid_argument("disk phantom: k must be positive and != 1");
}

double gap_multiplier(int n, const DiskPhantom& phantom) {
    phantom.validate();
    if (n < 1) throw std::invalid_argument("gap_multiplier: n >= 1 required (constant mode excluded)");
    double mu = (1.0 - phantom.k) / (1.0 + phantom.k);
    double r2n = std::pow(phantom.rho, 2 * n);
    return 2.0 * mu * r2n / (n * (1.0 - mu * r2n));
}

std::complex<double> oracle_lambda_diff(const DiskPhantom& phantom,
                                        const std::map<int, std::complex<double>>& g_coefficients,
                                        double theta_p, double theta_q) {
    std::complex<double> acc = 0.0;
    for (const auto& [n, gn] : g_coefficients) {
        if (n == 0) throw std::invalid_argument("oracle_lambda_diff: n = 0 coefficient not allowed");
        double m = gap_multiplier(std::abs(n), phantom);
        std::complex<double> ep{std::cos(n * theta_p), std::sin(n * theta_p)};
        std::complex<double> eq{std::cos(n * theta_q), std::sin(n * theta_q)};
        acc += gn * m * (ep - eq);
    }
    return acc;
}

// Conservative radial finite differences for f'' type operator
// (r gamma f')' = gamma n^2 f / r on (0,1], f(0)=0, f'(1)=1; the gap of the
// boundary values between the k-run and the homogeneous run confirms the
// closed-form multiplier.
double gap_multiplier_radial_fd(int n, const DiskPhantom& phantom, int grid_points) {
    phantom.validate();
    if (n < 1) throw std::invalid_argument("gap_multiplier_radial_fd: n >= 1 required");
    const int N = grid_points;
    const double dr = 1.0 / N;

    auto solve = [&](double k_inside) {
        // unknowns f_1..f_N at r_j = j dr; f_0 = 0
        std::vector<double> lower(N + 1, 0.0), diag(N + 1, 0.0), upper(N + 1, 0.0), rhs(N + 1, 0.0);
        auto gamma_at = [&](double r) { return r < phantom.rho ? k_inside : 1.0; };
        for (int j = 1; j < N; ++j) {
            double rj = j * dr;
            double rp = (j + 0.5) * dr, rm = (j - 0.5) * dr;
            double cp = rp * gamma_at(rp) / dr, cm = rm * gamma_at(rm) / dr;
            lower[j] = cm;
            upper[j] = cp;
            diag[j] = -(cp + cm) - gamma_at(rj) * n * n * dr / rj;
        }
        // boundary row: flux balance on the half cell at r = 1 with
        // prescribed flux r gamma f' = 1 * 1 * 1
        {
            int j = N;
            double rm = (j - 0.5) * dr;
            double cm = rm * gamma_at(rm) / dr;
            lower[j] = cm;
            diag[j] = -cm - 1.0 * n * n * (dr / 2.0) / 1.0;
            rhs[j] = -1.0;
        }
        // Thomas algorithm
        for (int j = 2; j <= N; ++j) {
            double w = lower[j] / diag[j - 1];
            diag[j] -= w * upper[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        std::vector<double> f(N + 1, 0.0);
        f[N] = rhs[N] / diag[N];
        for (int j = N - 1; j >= 1; --j) f[j] = (rhs[j] - upper[j] * f[j + 1]) / diag[j];
        return f[N];
    };

    return solve(phantom.k) - solve(1.0);
}

InclusionSet disk_phantom_inclusion(const DiskPhantom& phantom, int vertex_count) {
    phantom.validate();
    if (vertex_count < 8) throw std::invalid_argument("disk phantom polygon needs >= 8 vertices");
    Polygon poly;
    poly.vertices.resize((size_t)vertex_count);
    for (int i = 0; i < vertex_count; ++i) {
        double t = 2.0 * M_PI * i / vertex_count;
        poly.vertices[(size_t)i] = {phantom.rho * std::cos(t), phantom.rho * std::sin(t)};
    }
    InclusionSet incl;
    incl.components.push_back({poly, phantom.k});
    return incl;
}

std::vector<OracleComparisonRow> compare_fem_oracle(const OracleComparisonParams& params,
                                                    const DiskPhantom& phantom) {
    DomainSpec dom;
    dom.radius = 1.0;
    dom.boundary_resolution = params.boundary_resolution;
    InclusionSet incl = disk_phantom_inclusion(phantom, params.inclusion_vertices);

    Mesh m = generate_mesh(dom, incl, params.h_target);
    LinearSystem sys_gamma = assemble(m, ConductivityMap::from_inclusions(incl));
    LinearSystem sys_one = assemble(m, ConductivityMap::homogeneous(incl.components.size()));
    SolveOptions opts;
    opts.rel_tol = params.cg_rel_tol;

    std::vector<OracleComparisonRow> rows;
    for (int n : params.modes) {
        if (n < 1) throw std::invalid_argument("compare_fem_oracle: modes must be >= 1");
        int p_node = snap_boundary_point(m, {std::cos(0.0), std::sin(0.0)});
        int q_node = snap_boundary_point(m, {std::cos(M_PI / n), std::sin(M_PI / n)});
        Vec2 pp = m.nodes[(size_t)p_node], qq = m.nodes[(size_t)q_node];
        double theta_p = std::atan2(pp.y, pp.x);
        double theta_q = std::atan2(qq.y, qq.x);

        BoundaryData g;
        g.edge_values.resize(m.boundary_edges.size());
        for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
            Vec2 y = m.edge_midpoint(m.boundary_edges[i].a, m.boundary_edges[i].b);
            g.edge_values[i] = std::cos(n * std::atan2(y.y, y.x));
        }

        OracleComparisonRow row;
        row.mode = n;
        row.theta_p = theta_p;
        row.theta_q = theta_q;
        row.fem = lambda_diff(sys_gamma, sys_one, g, p_node, q_node, opts);
        std::map<int, std::complex<double>> coeffs{{n, 0.5}, {-n, 0.5}};
        row.oracle = oracle_lambda_diff(phantom, coeffs, theta_p, theta_q);
        row.rel_error = std::abs(row.fem - row.oracle) / std::abs(row.oracle);
        rows.push_back(row);
    }
    return rows;
}

} // namespace eit
