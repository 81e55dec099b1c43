#pragma once

#include "dichotomy/verify.hpp"

namespace dichotomy {

/// Hypotheses of the finite-time dichotomy criterion: uniform window
/// dichotomies with (K, alpha) on [a, a+N] for base points a forming a
/// relatively dense set with gap ell, coefficients bounded by M, and target
/// whole-range constants (Kbar, beta_bar) with alpha > beta_bar > 0 and
/// Kbar > 4 K^8.
struct FiniteTimeHypothesis {
    long long window_n = 10;            // N
    std::vector<long long> base_points;
    long long density_gap = 1;          // ell
    double k_const = 1.0;               // K
    double alpha = 1.0;
    double coeff_bound = 1.0;           // M
    double kbar = 5.0;
    double beta_bar = 0.5;

    void validate() const;
};

/// A finite-window projection family anchored at the window ends: nullspaces
/// are forward images of the unstable split at lo, ranges are stepwise
/// preimages of the most-contracted directions at hi. Both families are
/// invariant by construction; the split rank comes from the singular-value
/// slopes of Phi(hi, lo). Throws NoGap when a direction cannot be
/// classified.
struct AnchoredFamily {
    ProjectionFamily family;
    int rank = 0;
    std::vector<double> slopes;  // log sigma_i / (hi - lo), descending
};

AnchoredFamily estimate_window_family(const CoefficientSequence& seq, long long lo, long long hi,
                                      double tol_slope = 1e-3, const ToleranceConfig& tol = {});

struct FiniteTimeReport {
    // stage 1: coefficient bound
    bool coeff_bound_ok = false;
    double max_coeff_norm = 0.0;
    // stage 2: relative density
    bool density_ok = false;
    long long max_gap = 0;
    // stage 3: per-window certificates with (K, alpha)
    bool windows_ok = false;
    bool ranks_consistent = false;
    long long worst_base = 0;
    double worst_window_margin = 0.0;
    // stage 4: empirical whole-range certificate with (Kbar, beta_bar);
    // labeled empirical because no window-size threshold is computable
    bool global_ok = false;
    double global_margin = 0.0;
    int rank = -1;
    bool hypotheses_pass = false;  // stages 1-3
    bool pass = false;             // stages 1-4
};

/// Runs the four stages over [scan_lo, scan_hi]. Per-base-point window
/// checks are independent and parallelized under the given mode.
FiniteTimeReport finite_time_check(const SequencePtr& seq, const FiniteTimeHypothesis& hyp,
                                   long long scan_lo, long long scan_hi,
                                   ExecutionMode mode = default_execution_mode(),
                                   const ToleranceConfig& tol = {});

}  // namespace dichotomy
