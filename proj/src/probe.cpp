#include "eit/probe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eit/parallel.hpp"

namespace eit {

IndicatorSample IndicatorSample::rescaled_to(double t_new) const {
    IndicatorSample s = *this;
    s.t = t_new;
    s.value = value * std::exp(tau * (t - t_new));
    return s;
}

BoundaryData scaled_probe_trace(const Mesh& m, const ProbeParams& p) {
    if (!(p.tau > 0.0)) throw std::invalid_argument("probe tau must be positive");
    BoundaryData g;
    g.edge_values.resize(m.boundary_edges.size());
    const Vec2 w = p.direction.omega;
    const Vec2 wp = p.direction.omega_perp;
    for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
        const auto& e = m.boundary_edges[i];
        Vec2 y = m.edge_midpoint(e.a, e.b);
        double growth = p.tau * (dot(y, w) - p.t);
        if (growth > 700.0)
            throw std::runtime_error("scaled_probe_trace: exponent overflow, rescale t or tau");
        std::complex<double> normal_factor{dot(w, e.normal), dot(wp, e.normal)};
        std::complex<double> phase{std::cos(p.tau * dot(y, wp)), std::sin(p.tau * dot(y, wp))};
        g.edge_values[i] = p.tau * normal_factor * std::exp(growth) * phase;
    }
    return g;
}

IndicatorSample indicator(const LinearSystem& sys_gamma, const LinearSystem& sys_one, int p_node,
                          int q_node, const ProbeParams& params, const SolveOptions& opts) {
    IndicatorSample s;
    s.tau = params.tau;
    s.t = params.t;
    BoundaryData g = scaled_probe_trace(*sys_gamma.mesh, params);
    s.value = lambda_diff(sys_gamma, sys_one, g, p_node, q_node, opts);
    return s;
}

IndicatorSample indicator(const Mesh& m, const InclusionSet& incl, int p_node, int q_node,
                          const ProbeParams& params, const SolveOptions& opts) {
    LinearSystem sys_gamma = assemble(m, ConductivityMap::from_inclusions(incl));
    LinearSystem sys_one = assemble(m, ConductivityMap::homogeneous(incl.components.size()));
    return indicator(sys_gamma, sys_one, p_node, q_node, params, opts);
}

std::vector<IndicatorSample> indicator_sweep(const LinearSystem& sys_gamma,
                                             const LinearSystem& sys_one, int p_node, int q_node,
                                             const Direction& d, double t,
                                             const std::vector<double>& tau_grid, int jobs,
                                             const SolveOptions& opts) {
    for (size_t i = 1; i < tau_grid.size(); ++i)
        if (!(tau_grid[i] > tau_grid[i - 1]))
            throw std::invalid_argument("indicator_sweep: tau grid must be increasing");
    std::vector<IndicatorSample> out(tau_grid.size());
    parallel_for(tau_grid.size(), jobs, [&](size_t i) {
        ProbeParams p{d, tau_grid[i], t};
        try {
            out[i] = indicator(sys_gamma, sys_one, p_node, q_node, p, opts);
        } catch (const std::exception& ex) {
            out[i].tau = tau_grid[i];
            out[i].t = t;
            out[i].failed = true;
            out[i].error = ex.what();
        }
    });
    size_t failures = 0;
    for (const auto& s : out)
        if (s.failed) ++failures;
    if (failures * 5 > out.size()) {
        std::ostringstream os;
        os << "indicator_sweep: " << failures << " of " << out.size() << " samples failed";
        for (const auto& s : out)
            if (s.failed) os << "\n  tau=" << s.tau << ": " << s.error;
        throw std::runtime_error(os.str());
    }
    return out;
}

std::vector<IndicatorSample> indicator_sweep(const Mesh& m, const InclusionSet& incl, int p_node,
                                             int q_node, const Direction& d, double t,
                                             const std::vector<double>& tau_grid, int jobs,
                                             const SolveOptions& opts) {
    LinearSystem sys_gamma = assemble(m, ConductivityMap::from_inclusions(incl));
    LinearSystem sys_one = assemble(m, ConductivityMap::homogeneous(incl.components.size()));
    return indicator_sweep(sys_gamma, sys_one, p_node, q_node, d, t, tau_grid, jobs, opts);
}

namespace {

struct Fit3 {
    double intercept = 0.0;
    double slope = 0.0;
    double mu = 0.0;        // coefficient of -log(tau)
    double r_squared = 0.0;
    bool valid = false;
};

// least squares for y = c + s tau - mu log(tau) with mu >= 0 (the decay
// exponent is positive; a negative fit would chase the exponential blowup of
// the discretization error at large tau).  When the unconstrained optimum has
// mu < 0, the constrained optimum sits on the boundary mu = 0 (plain line).
// Solved on centered regressors; invalid when the window cannot separate tau
// from log(tau).
Fit3 fit_log_model(const std::vector<double>& tau, const std::vector<double>& y) {
    size_t n = tau.size();
    Fit3 f;
    if (n < 4) return f;
    std::vector<double> u(n), v(n);
    for (size_t i = 0; i < n; ++i) {
        u[i] = tau[i];
        v[i] = std::log(tau[i]);
    }
    double um = 0, vm = 0, ym = 0;
    for (size_t i = 0; i < n; ++i) {
        um += u[i];
        vm += v[i];
        ym += y[i];
    }
    um /= n;
    vm /= n;
    ym /= n;
    double suu = 0, svv = 0, suv = 0, suy = 0, svy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        double du = u[i] - um, dv = v[i] - vm, dy = y[i] - ym;
        suu += du * du;
        svv += dv * dv;
        suv += du * dv;
        suy += du * dy;
        svy += dv * dy;
        syy += dy * dy;
    }
    double det = suu * svv - suv * suv;
    if (!(det > 1e-10 * suu * svv)) return f; // collinear regressors
    double a = (suy * svv - svy * suv) / det;  // coefficient of tau
    double b = (svy * suu - suy * suv) / det;  // coefficient of log(tau)
    if (-b < 0.0) {
        b = 0.0;
        a = suy / suu;
    }
    double ss_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double r = (y[i] - ym) - a * (u[i] - um) - b * (v[i] - vm);
        ss_res += r * r;
    }
    f.slope = a;
    f.mu = -b;
    f.intercept = ym - a * um - b * vm;
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.valid = true;
    return f;
}

} // namespace

SupportEntry estimate_support_slope(const std::vector<IndicatorSample>& samples, double t,
                                    const SlopeFitOptions& opts) {
    std::vector<double> tau, logv;
    double max_abs = 0.0;
    for (const auto& s : samples) {
        if (s.failed) continue;
        if (std::abs(s.t - t) > 1e-12)
            throw std::invalid_argument("estimate_support_slope: samples not at a common t");
        max_abs = std::max(max_abs, std::abs(s.value));
    }
    if (max_abs < opts.noise_floor)
        throw std::runtime_error("estimate_support_slope: signal below noise floor");
    for (const auto& s : samples) {
        if (s.failed) continue;
        double a = std::abs(s.value);
        if (a < opts.noise_floor) continue; // drop dead samples, keep the usable range
        tau.push_back(s.tau);
        logv.push_back(std::log(a));
    }
    if ((int)tau.size() < opts.min_window)
        throw std::runtime_error("estimate_support_slope: fewer than min_window usable samples");

    // window search: adjusted R^2 so short windows must earn their keep
    double best_score = -std::numeric_limits<double>::infinity();
    Fit3 best;
    size_t best_begin = 0, best_len = 0;
    size_t n = tau.size();
    for (size_t len = (size_t)opts.min_window; len <= n; ++len) {
        for (size_t begin = 0; begin + len <= n; ++begin) {
            std::vector<double> wt(tau.begin() + begin, tau.begin() + begin + len);
            std::vector<double> wy(logv.begin() + begin, logv.begin() + begin + len);
            Fit3 f = fit_log_model(wt, wy);
            if (!f.valid) continue;
            double adj = 1.0 - (1.0 - f.r_squared) * double(len - 1) / double(len - 3);
            bool better = adj > best_score + 1e-12 ||
                          (adj > best_score - 1e-12 &&
                           (len > best_len || (len == best_len && begin < best_begin)));
            if (better) {
                best_score = adj;
                best = f;
                best_begin = begin;
                best_len = len;
            }
        }
    }
    if (!best.valid) throw std::runtime_error("estimate_support_slope: no usable fit window");

    SupportEntry e;
    e.h_estimate = best.slope + t;
    e.r_squared = best.r_squared;
    e.mu_hat = opts.fit_decay_exponent ? best.mu : 0.0;
    e.window_tau_min = tau[best_begin];
    e.window_tau_max = tau[best_begin + best_len - 1];
    e.method = "slope-fit";
    return e;
}

GrowthClass classify_growth(const IndicatorSample& low, const IndicatorSample& high, double t,
                            double dead_band) {
    double a = std::abs(low.rescaled_to(t).value);
    double b = std::abs(high.rescaled_to(t).value);
    if (a == 0.0 && b == 0.0) return GrowthClass::Indeterminate;
    if (a == 0.0) return GrowthClass::Growth;
    double ratio = b / a;
    if (ratio > 1.0 + dead_band) return GrowthClass::Growth;
    if (ratio < 1.0 - dead_band) return GrowthClass::Decay;
    return GrowthClass::Indeterminate;
}

SupportEntry estimate_support_bisection(const LinearSystem& sys_gamma, const LinearSystem& sys_one,
                                        int p_node, int q_node, const Direction& d,
                                        std::pair<double, double> t_range,
                                        const BisectionOptions& opts,
                                        const SolveOptions& solve_opts) {
    if (!(t_range.first < t_range.second))
        throw std::invalid_argument("estimate_support_bisection: empty t range");
    if (!(opts.tau_low < opts.tau_high))
        throw std::invalid_argument("estimate_support_bisection: needs tau_low < tau_high");

    // one measurement pair; the classifier moves along t by exact rescaling
    IndicatorSample low = indicator(sys_gamma, sys_one, p_node, q_node,
                                    ProbeParams{d, opts.tau_low, 0.0}, solve_opts);
    IndicatorSample high = indicator(sys_gamma, sys_one, p_node, q_node,
                                     ProbeParams{d, opts.tau_high, 0.0}, solve_opts);

    auto classify = [&](double t) { return classify_growth(low, high, t, opts.dead_band); };
    GrowthClass lo_class = classify(t_range.first);
    GrowthClass hi_class = classify(t_range.second);
    if (lo_class != GrowthClass::Growth || hi_class != GrowthClass::Decay) {
        auto ratio_at = [&](double t) {
            double a = std::abs(low.rescaled_to(t).value);
            double b = std::abs(high.rescaled_to(t).value);
            return a > 0.0 ? b / a : std::numeric_limits<double>::infinity();
        };
        std::ostringstream os;
        os << "estimate_support_bisection: t range does not bracket the growth/decay transition"
           << " (ratio at t=" << t_range.first << " is " << ratio_at(t_range.first) << ", at t="
           << t_range.second << " is " << ratio_at(t_range.second) << ")";
        throw std::runtime_error(os.str());
    }

    double lo = t_range.first, hi = t_range.second;
    bool hit_dead_band = false;
    for (int step = 0; step < opts.max_steps && hi - lo > opts.t_tol; ++step) {
        double mid = 0.5 * (lo + hi);
        GrowthClass c = classify(mid);
        if (c == GrowthClass::Growth) {
            lo = mid;
        } else if (c == GrowthClass::Decay) {
            hi = mid;
        } else {
            // inside the dead band: the transition is here to within its width
            lo = mid;
            hi = mid;
            hit_dead_band = true;
        }
    }

    SupportEntry e;
    e.direction = d;
    e.h_estimate = 0.5 * (lo + hi);
    e.method = hit_dead_band ? "bisection(dead-band)" : "bisection";
    e.window_tau_min = opts.tau_low;
    e.window_tau_max = opts.tau_high;
    return e;
}

SupportEntry estimate_support_bisection(const Mesh& m, const InclusionSet& incl, int p_node,
                                        int q_node, const Direction& d,
                                        std::pair<double, double> t_range,
                                        const BisectionOptions& opts,
                                        const SolveOptions& solve_opts) {
    LinearSystem sys_gamma = assemble(m, ConductivityMap::from_inclusions(incl));
    LinearSystem sys_one = assemble(m, ConductivityMap::homogeneous(incl.components.size()));
    return estimate_support_bisection(sys_gamma, sys_one, p_node, q_node, d, t_range, opts,
                                      solve_opts);
}

} // namespace eit
