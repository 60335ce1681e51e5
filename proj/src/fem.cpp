#include "eit/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace eit {

ConductivityMap ConductivityMap::from_inclusions(const InclusionSet& incl) {
    ConductivityMap c;
    for (const auto& comp : incl.components) c.inclusion_values.push_back(comp.conductivity);
    return c;
}

ConductivityMap ConductivityMap::homogeneous(size_t component_count) {
    ConductivityMap c;
    c.inclusion_values.assign(component_count, 1.0);
    return c;
}

std::complex<double> BoundaryData::weighted_sum(const Mesh& m) const {
    std::complex<double> s = 0.0;
    for (size_t i = 0; i < m.boundary_edges.size(); ++i)
        s += edge_values[i] * m.edge_length(m.boundary_edges[i].a, m.boundary_edges[i].b);
    return s;
}

void LinearSystem::mul(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[(size_t)i]; k < row_ptr[(size_t)i + 1]; ++k)
            s += vals[(size_t)k] * x[cols[(size_t)k]];
        y[i] = s;
    }
}

LinearSystem assemble(const Mesh& m, const ConductivityMap& c) {
    const int n = (int)m.nodes.size();
    std::vector<std::map<int, double>> rows((size_t)n);

    for (const auto& t : m.triangles) {
        Vec2 p[3] = {m.nodes[(size_t)t.v[0]], m.nodes[(size_t)t.v[1]], m.nodes[(size_t)t.v[2]]};
        double area2 = cross(p[1] - p[0], p[2] - p[0]);
        if (area2 <= 0.0) throw std::runtime_error("assemble: degenerate triangle");
        double area = 0.5 * area2;
        double gamma = c.value(t.region);
        Vec2 grad[3];
        for (int i = 0; i < 3; ++i) {
            Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
            grad[i] = {-e.y / area2, e.x / area2};
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                rows[(size_t)t.v[i]][t.v[j]] += gamma * area * dot(grad[i], grad[j]);
    }

    LinearSystem sys;
    sys.mesh = &m;
    sys.n = n;
    sys.row_ptr.reserve((size_t)n + 1);
    sys.row_ptr.push_back(0);
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, v] : rows[(size_t)i]) {
            sys.cols.push_back(j);
            sys.vals.push_back(v);
        }
        sys.row_ptr.push_back((int)sys.cols.size());
    }
    sys.diag.assign((size_t)n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = sys.row_ptr[(size_t)i]; k < sys.row_ptr[(size_t)i + 1]; ++k)
            if (sys.cols[(size_t)k] == i) sys.diag[(size_t)i] = sys.vals[(size_t)k];

    sys.boundary_mass.assign((size_t)n, 0.0);
    for (const auto& e : m.boundary_edges) {
        double len = m.edge_length(e.a, e.b);
        sys.boundary_mass[(size_t)e.a] += 0.5 * len;
        sys.boundary_mass[(size_t)e.b] += 0.5 * len;
        sys.boundary_length += len;
    }
    return sys;
}

std::vector<double> neumann_rhs(const Mesh& m, const std::vector<double>& edge_values) {
    if (edge_values.size() != m.boundary_edges.size())
        throw std::invalid_argument("neumann_rhs: one value per boundary edge expected");
    std::vector<double> rhs(m.nodes.size(), 0.0);
    for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
        const auto& e = m.boundary_edges[i];
        double len = m.edge_length(e.a, e.b);
        rhs[(size_t)e.a] += 0.5 * len * edge_values[i];
        rhs[(size_t)e.b] += 0.5 * len * edge_values[i];
    }
    return rhs;
}

namespace {

double dot_v(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_v(const std::vector<double>& a) { return std::sqrt(dot_v(a, a)); }

void check_compatibility(const std::vector<double>& rhs, double mean_rel_tol) {
    double sum = 0.0, abs_sum = 0.0;
    for (double v : rhs) {
        sum += v;
        abs_sum += std::abs(v);
    }
    if (abs_sum > 0.0 && std::abs(sum) > mean_rel_tol * abs_sum)
        throw std::runtime_error("solve: Neumann load is not zero-mean within tolerance (|sum|/sum|.| = " +
                                 std::to_string(std::abs(sum) / abs_sum) + ")");
}

} // namespace

std::vector<double> solve_gauged(const LinearSystem& sys, std::vector<double> rhs,
                                 const SolveOptions& opts, SolveReport* report) {
    const int n = sys.n;
    if ((int)rhs.size() != n) throw std::invalid_argument("solve: rhs size mismatch");
    check_compatibility(rhs, opts.mean_rel_tol);

    // project the load onto the range of the singular operator
    double mean = 0.0;
    for (double v : rhs) mean += v;
    mean /= n;
    for (double& v : rhs) v -= mean;

    std::vector<double> x((size_t)n, 0.0), r = rhs, z((size_t)n), p((size_t)n), ap((size_t)n);
    double bnorm = norm_v(rhs);
    int max_iter = (int)(opts.max_iter_factor * std::sqrt((double)n)) + 16;
    int it = 0;
    double rel = 0.0;

    if (bnorm > 0.0) {
        for (int i = 0; i < n; ++i) z[(size_t)i] = r[(size_t)i] / sys.diag[(size_t)i];
        p = z;
        double rz = dot_v(r, z);
        for (it = 1; it <= max_iter; ++it) {
            sys.mul(p.data(), ap.data());
            double pap = dot_v(p, ap);
            if (pap <= 0.0) throw std::runtime_error("solve: CG breakdown (non-positive curvature)");
            double alpha = rz / pap;
            for (int i = 0; i < n; ++i) {
                x[(size_t)i] += alpha * p[(size_t)i];
                r[(size_t)i] -= alpha * ap[(size_t)i];
            }
            // keep the residual orthogonal to the constant kernel
            double rmean = 0.0;
            for (double v : r) rmean += v;
            rmean /= n;
            for (double& v : r) v -= rmean;

            rel = norm_v(r) / bnorm;
            if (rel <= opts.rel_tol) break;
            for (int i = 0; i < n; ++i) z[(size_t)i] = r[(size_t)i] / sys.diag[(size_t)i];
            double rz_new = dot_v(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[(size_t)i] = z[(size_t)i] + beta * p[(size_t)i];
        }
        if (rel > opts.rel_tol) {
            std::ostringstream os;
            os << "solve: CG did not converge (" << max_iter << " iterations, relative residual "
               << rel << ")";
            throw std::runtime_error(os.str());
        }
    }

    // gauge: zero boundary mean
    double bm = 0.0;
    for (int i = 0; i < n; ++i) bm += sys.boundary_mass[(size_t)i] * x[(size_t)i];
    bm /= sys.boundary_length;
    for (double& v : x) v -= bm;

    if (report) {
        report->iterations = it;
        report->rel_residual = rel;
    }
    return x;
}

std::vector<double> solve_pinned(const LinearSystem& sys, std::vector<double> rhs,
                                 const SolveOptions& opts, SolveReport* report) {
    const int n = sys.n;
    if ((int)rhs.size() != n) throw std::invalid_argument("solve: rhs size mismatch");
    check_compatibility(rhs, opts.mean_rel_tol);

    // eliminate node 0: solve the SPD system on the remaining unknowns
    std::vector<double> x((size_t)n, 0.0), r((size_t)n), z((size_t)n), p((size_t)n), ap((size_t)n);
    auto mul_reduced = [&](const std::vector<double>& in, std::vector<double>& out) {
        sys.mul(in.data(), out.data());
        out[0] = 0.0;
    };
    r = rhs;
    r[0] = 0.0;
    double bnorm = norm_v(r);
    int max_iter = (int)(opts.max_iter_factor * std::sqrt((double)n)) + 16;
    int it = 0;
    double rel = 0.0;
    if (bnorm > 0.0) {
        for (int i = 1; i < n; ++i) z[(size_t)i] = r[(size_t)i] / sys.diag[(size_t)i];
        p = z;
        double rz = dot_v(r, z);
        for (it = 1; it <= max_iter; ++it) {
            mul_reduced(p, ap);
            double pap = dot_v(p, ap);
            if (pap <= 0.0) throw std::runtime_error("solve: CG breakdown (pinned system)");
            double alpha = rz / pap;
            for (int i = 1; i < n; ++i) {
                x[(size_t)i] += alpha * p[(size_t)i];
                r[(size_t)i] -= alpha * ap[(size_t)i];
            }
            rel = norm_v(r) / bnorm;
            if (rel <= opts.rel_tol) break;
            for (int i = 1; i < n; ++i) z[(size_t)i] = r[(size_t)i] / sys.diag[(size_t)i];
            double rz_new = dot_v(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 1; i < n; ++i) p[(size_t)i] = z[(size_t)i] + beta * p[(size_t)i];
        }
        if (rel > opts.rel_tol)
            throw std::runtime_error("solve: pinned CG did not converge");
    }
    if (report) {
        report->iterations = it;
        report->rel_residual = rel;
    }
    return x;
}

ComplexField solve_neumann(const LinearSystem& sys, const BoundaryData& g,
                           const SolveOptions& opts, SolveReport* report) {
    const Mesh& m = *sys.mesh;
    std::vector<double> re(m.boundary_edges.size()), im(m.boundary_edges.size());
    for (size_t i = 0; i < g.edge_values.size(); ++i) {
        re[i] = g.edge_values[i].real();
        im[i] = g.edge_values[i].imag();
    }
    SolveReport rr, ri;
    std::vector<double> ure = solve_gauged(sys, neumann_rhs(m, re), opts, &rr);
    std::vector<double> uim = solve_gauged(sys, neumann_rhs(m, im), opts, &ri);
    ComplexField u;
    u.values.resize(ure.size());
    for (size_t i = 0; i < ure.size(); ++i) u.values[i] = {ure[i], uim[i]};
    if (report) {
        report->iterations = rr.iterations + ri.iterations;
        report->rel_residual = std::max(rr.rel_residual, ri.rel_residual);
    }
    return u;
}

double boundary_mean(const Mesh& m, const std::vector<double>& nodal) {
    double s = 0.0, len = 0.0;
    for (const auto& e : m.boundary_edges) {
        double l = m.edge_length(e.a, e.b);
        s += 0.5 * l * (nodal[(size_t)e.a] + nodal[(size_t)e.b]);
        len += l;
    }
    return s / len;
}

namespace {
void require_boundary_node(const Mesh& m, int idx, const char* who) {
    if (idx < 0 || idx >= (int)m.nodes.size())
        throw std::invalid_argument(std::string(who) + ": node index out of range");
    for (const auto& e : m.boundary_edges)
        if (e.a == idx || e.b == idx) return;
    throw std::invalid_argument(std::string(who) + ": not a boundary node");
}
} // namespace

std::complex<double> lambda_pq(const Mesh& m, const ComplexField& u, int p, int q) {
    require_boundary_node(m, p, "lambda_pq");
    require_boundary_node(m, q, "lambda_pq");
    if (p == q) return 0.0;
    return u.values[(size_t)p] - u.values[(size_t)q];
}

double lambda_pq(const Mesh& m, const ScalarField& u, int p, int q) {
    require_boundary_node(m, p, "lambda_pq");
    require_boundary_node(m, q, "lambda_pq");
    if (p == q) return 0.0;
    return u.values[(size_t)p] - u.values[(size_t)q];
}

std::complex<double> lambda_diff(const LinearSystem& sys_gamma, const LinearSystem& sys_one,
                                 const BoundaryData& g, int p, int q, const SolveOptions& opts) {
    ComplexField u_gamma = solve_neumann(sys_gamma, g, opts);
    ComplexField u_one = solve_neumann(sys_one, g, opts);
    const Mesh& m = *sys_gamma.mesh;
    return lambda_pq(m, u_gamma, p, q) - lambda_pq(m, u_one, p, q);
}

std::complex<double> lambda_diff(const Mesh& m, const InclusionSet& incl, const BoundaryData& g,
                                 int p, int q, const SolveOptions& opts) {
    LinearSystem sys_gamma = assemble(m, ConductivityMap::from_inclusions(incl));
    LinearSystem sys_one = assemble(m, ConductivityMap::homogeneous(incl.components.size()));
    return lambda_diff(sys_gamma, sys_one, g, p, q, opts);
}

void export_field_csv(const Mesh& m, const ScalarField& f, const std::string& path,
                      const std::string& header_comment) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open field CSV for writing: " + path);
    if (!header_comment.empty()) os << "# " << header_comment << "\n";
    os << "node,x,y,value\n";
    char buf[128];
    for (size_t i = 0; i < m.nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.16e,%.16e,%.16e\n", i, m.nodes[i].x, m.nodes[i].y,
                      f.values[i]);
        os << buf;
    }
}

} // namespace eit
