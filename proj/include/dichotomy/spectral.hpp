#pragma once

#include <vector>

#include "dichotomy/certificate.hpp"
#include "dichotomy/transition.hpp"

namespace dichotomy {

/// Result of the SVD-slope split at a base point: the estimated stable
/// subspace plus the fitted per-direction growth exponents.
///
/// The estimator fits log sigma_i(Phi(m+N, m)) against N over the ladder and
/// classifies directions by the sign of the fitted slope. It is an artifact
/// addition (no procedure for finding P is given in the source material);
/// its known failure mode is a slowly opening gap: slopes within
/// +-tol_slope of zero are refused (NoGap) rather than guessed.
struct SubspaceEstimate {
    long long at_k = 0;
    Subspace subspace;                 // estimated stable subspace at at_k
    std::vector<double> growth_rates;  // fitted slopes, descending
    double gap_quality = 0.0;          // slope separation across the sign split
};

struct StableSubspaceOptions {
    double tol_slope = 1e-3;  // |slope| below this is ambiguous -> NoGap
};

/// Stable subspace at m from the singular-value ladder of Phi(m+N, m),
/// N in `ladder`. Throws NoGap when a direction cannot be classified.
SubspaceEstimate estimate_stable_subspace(const CoefficientSequence& seq, long long m,
                                          const std::vector<long long>& ladder,
                                          const StableSubspaceOptions& opts = {},
                                          const ToleranceConfig& tol = {});

/// Verdict of the bounded-solution probe at (m, xi).
struct BoundedSolutionVerdict {
    bool bounded_forward = false;
    double sup_forward = 0.0;      // sup |Phi(k,m) xi| over the horizon
    double envelope = 0.0;         // growth envelope the sup was judged against
    bool backward_constructed = false;
    bool bounded_backward = false;
    double sup_backward = 0.0;
    double backward_matches_xi = 0.0;  // |y(m) - xi| for the reconstruction
    std::vector<Vector> backward_solution;  // y(m-horizon) ... y(m)
};

struct BoundedSolutionOptions {
    long long horizon = 40;
    double envelope_factor = 10.0;  // bounded iff sup <= factor * max(1,|xi|)
};

/// Forward branch: iterate x(k+1) = A(k)x(k) and compare sup|x| to the
/// envelope. Backward branch (when a family hint is given and the interval
/// extends below m): reconstruct y(k) = Phi(k,m) xi through the restricted
/// inverses, certify y(m) = xi and boundedness. xi should lie in NP(m) for
/// the backward reconstruction to represent a genuine solution.
BoundedSolutionVerdict bounded_solution_oracle(const CoefficientSequence& seq,
                                               const ProjectionFamily* family_hint, long long m,
                                               const Vector& xi,
                                               const BoundedSolutionOptions& opts = {},
                                               const ToleranceConfig& tol = {});

}  // namespace dichotomy
