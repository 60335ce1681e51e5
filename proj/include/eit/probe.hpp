#pragma once

#include <complex>
#include <vector>

#include "eit/fem.hpp"

namespace eit {

struct ProbeParams {
    Direction direction;
    double tau = 1.0; // > 0
    double t = 0.0;
};

struct IndicatorSample {
    double tau = 0.0;
    double t = 0.0;
    std::complex<double> value{};
    bool failed = false;
    std::string error;

    // exact algebraic move along t: I(tau, t') = e^{tau (t - t')} I(tau, t)
    IndicatorSample rescaled_to(double t_new) const;
};

struct SlopeFitOptions {
    int min_window = 4;
    double noise_floor = 1e-10; // 1e2 * solver relative tolerance
    bool fit_decay_exponent = true;
};

struct BisectionOptions {
    double tau_low = 4.0;
    double tau_high = 12.0;
    double t_tol = 0.01;
    double dead_band = 0.10; // growth/decay ratio dead band around 1
    int max_steps = 60;
};

// Boundary trace of the scaled probe: per edge midpoint y with normal nu,
//   tau ((omega + i omega_perp) . nu) e^{tau (y.omega - t)} e^{i tau y.omega_perp},
// i.e. e^{-tau t} dv/dnu with the scaling folded into the data so downstream
// values stay bounded.  Throws when tau (y.omega - t) would overflow.
BoundaryData scaled_probe_trace(const Mesh& m, const ProbeParams& p);

IndicatorSample indicator(const Mesh& m, const InclusionSet& incl, int p_node, int q_node,
                          const ProbeParams& params, const SolveOptions& opts = {});
IndicatorSample indicator(const LinearSystem& sys_gamma, const LinearSystem& sys_one, int p_node,
                          int q_node, const ProbeParams& params, const SolveOptions& opts = {});

// One indicator per tau, solved independently; fails when more than 20% of
// the samples fail.
std::vector<IndicatorSample> indicator_sweep(const Mesh& m, const InclusionSet& incl, int p_node,
                                             int q_node, const Direction& d, double t,
                                             const std::vector<double>& tau_grid, int jobs = 1,
                                             const SolveOptions& opts = {});
std::vector<IndicatorSample> indicator_sweep(const LinearSystem& sys_gamma,
                                             const LinearSystem& sys_one, int p_node, int q_node,
                                             const Direction& d, double t,
                                             const std::vector<double>& tau_grid, int jobs = 1,
                                             const SolveOptions& opts = {});

// Support estimate from a tau sweep at fixed t.  Fits the large-tau model
//   log|I| = c + s tau - mu log tau
// over the contiguous window (length >= min_window) maximizing R^2 and
// returns h_hat = s + t; mu_hat is the decay-rate diagnostic.
SupportEntry estimate_support_slope(const std::vector<IndicatorSample>& samples, double t,
                                    const SlopeFitOptions& opts = {});

// Growth/decay classification of t against h via the ratio
// |I(tau_high,t)| / |I(tau_low,t)| computed from one measurement pair at t = 0
// and moved along t with the exact rescaling identity; bisects the bracket.
SupportEntry estimate_support_bisection(const Mesh& m, const InclusionSet& incl, int p_node,
                                        int q_node, const Direction& d,
                                        std::pair<double, double> t_range,
                                        const BisectionOptions& opts = {},
                                        const SolveOptions& solve_opts = {});
SupportEntry estimate_support_bisection(const LinearSystem& sys_gamma, const LinearSystem& sys_one,
                                        int p_node, int q_node, const Direction& d,
                                        std::pair<double, double> t_range,
                                        const BisectionOptions& opts = {},
                                        const SolveOptions& solve_opts = {});

enum class GrowthClass { Growth, Decay, Indeterminate };
GrowthClass classify_growth(const IndicatorSample& low, const IndicatorSample& high, double t,
                            double dead_band = 0.10);

} // namespace eit
