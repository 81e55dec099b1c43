#pragma once

#include <string>

#include "dichotomy/certificate.hpp"
#include "dichotomy/parallel.hpp"
#include "dichotomy/transition.hpp"

namespace dichotomy {

struct InvarianceReport {
    double max_residual = 0.0;  // absolute |A(k)P(k) - P(k+1)A(k)|
    long long worst_k = 0;
    bool pass = false;
};

/// Max invariance residual over k in [lo, hi-1]. A window of length one is
/// vacuously invariant.
InvarianceReport check_invariance(const CoefficientSequence& seq, const ProjectionFamily& family,
                                  long long lo, long long hi, const ToleranceConfig& tol = {});

struct PairWitness {
    long long m = 0;
    long long k = 0;
    double margin = 0.0;
    std::string inequality;  // "forward" | "backward" | "projection-bound"
};

struct VerifyReport {
    bool pass = false;
    double worst_margin = 0.0;  // min over all checked inequalities
    double margin_slack = 0.0;  // pass tolerance: worst_margin >= -margin_slack
    PairWitness worst;
    long long pairs_checked = 0;
    Form form;
    long long window_lo = 0, window_hi = 0;
};

/// Checks the certificate's inequalities for every pair m <= k in
/// [lo, hi]. Form A checks |Phi(k,m)P(m)| <= L e^{-a(k-m)} and
/// |Phi(m,k)(I-P(k))| <= L e^{-a(k-m)}; Form B checks the projection bound M
/// plus the vector-wise decay (sigma_max on the range) and growth
/// (sigma_min on the nullspace) inequalities with K. Margins are
/// bound minus measured value (forward/backward/projection) or measured
/// minus bound (Form B growth), so >= 0 always means "inequality holds".
VerifyReport verify_certificate(const DichotomyCertificate& cert, long long lo, long long hi,
                                const ToleranceConfig& tol = {},
                                ExecutionMode mode = default_execution_mode());

struct EstimateOptions {
    std::optional<double> alpha;  // fit alpha by bisection when absent
    double l_cap = 1e6;           // cap on L(alpha) during the fit
    ExecutionMode mode = default_execution_mode();
};

struct EstimateResult {
    DichotomyCertificate certificate;  // Form A with the fitted (L, alpha)
    double l_forward = 0.0;            // minimal L for the forward inequality alone
    double l_backward = 0.0;           // minimal L for the backward inequality alone
};

/// Minimal L(alpha) = max over pairs of |Phi(k,m)P(m)| e^{a(k-m)} and
/// |Phi(m,k)(I-P(k))| e^{a(k-m)}; when alpha is absent, the largest alpha
/// with L(alpha) <= l_cap is found by bisection. Throws NoDecay when the
/// measured norms show no net contraction across the window.
EstimateResult estimate_constants(const SequencePtr& seq, const ProjectionFamily& family,
                                  long long lo, long long hi,
                                  const EstimateOptions& opts = {},
                                  const ToleranceConfig& tol = {});

}  // namespace dichotomy
