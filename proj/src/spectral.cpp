#include "dichotomy/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dichotomy {

SubspaceEstimate estimate_stable_subspace(const CoefficientSequence& seq, long long m,
                                          const std::vector<long long>& ladder,
                                          const StableSubspaceOptions& opts,
                                          const ToleranceConfig& tol) {
    require(!ladder.empty(), ErrorCode::InvalidInput, "estimate_stable_subspace: empty ladder");
    std::vector<long long> ns = ladder;
    std::sort(ns.begin(), ns.end());
    require(ns.front() > 0, ErrorCode::InvalidInput,
            "estimate_stable_subspace: ladder entries must be positive");
    const int n = seq.dim();

    // log sigma_i(Phi(m+N, m)) per ordered index i, for each ladder point
    std::vector<std::vector<double>> logs(ns.size());
    Matrix v_last;
    for (size_t t = 0; t < ns.size(); ++t) {
        Matrix phi = transition(seq, m + ns[t], m).matrix;
        Eigen::JacobiSVD<Matrix> svd(phi, Eigen::ComputeFullV);
        logs[t].resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double sv = svd.singularValues()(i);
            // exact zeros (kernel directions) decay faster than any rate;
            // clamp to a very steep slope instead of -inf
            logs[t][static_cast<size_t>(i)] = sv > 0.0 ? std::log(sv) : -700.0;
        }
        if (t + 1 == ns.size()) v_last = svd.matrixV();
    }

    // least-squares slope of log sigma_i vs N per index
    SubspaceEstimate est;
    est.at_k = m;
    est.growth_rates.resize(static_cast<size_t>(n));
    const double nbar =
        std::accumulate(ns.begin(), ns.end(), 0.0) / static_cast<double>(ns.size());
    double denom = 0.0;
    for (long long nv : ns) denom += (static_cast<double>(nv) - nbar) * (static_cast<double>(nv) - nbar);
    for (int i = 0; i < n; ++i) {
        if (ns.size() == 1) {
            est.growth_rates[static_cast<size_t>(i)] =
                logs[0][static_cast<size_t>(i)] / static_cast<double>(ns[0]);
            continue;
        }
        double num = 0.0, ybar = 0.0;
        for (size_t t = 0; t < ns.size(); ++t) ybar += logs[t][static_cast<size_t>(i)];
        ybar /= static_cast<double>(ns.size());
        for (size_t t = 0; t < ns.size(); ++t)
            num += (static_cast<double>(ns[t]) - nbar) * (logs[t][static_cast<size_t>(i)] - ybar);
        est.growth_rates[static_cast<size_t>(i)] = num / denom;
    }

    int stable = 0;
    for (int i = 0; i < n; ++i) {
        const double slope = est.growth_rates[static_cast<size_t>(i)];
        if (std::abs(slope) <= opts.tol_slope)
            throw DichotomyError(ErrorCode::NoGap,
                                 "estimate_stable_subspace: slope " + std::to_string(slope) +
                                     " is too close to zero to classify");
        if (slope < 0.0) ++stable;
    }
    // singular values are sorted descending, so the stable directions are the
    // trailing right singular vectors at the largest ladder point
    est.subspace =
        stable > 0 ? Subspace(v_last.rightCols(stable), tol) : Subspace::zero(n);
    const int r_unstable = n - stable;
    if (r_unstable > 0 && stable > 0)
        est.gap_quality = est.growth_rates[static_cast<size_t>(r_unstable - 1)] -
                          est.growth_rates[static_cast<size_t>(r_unstable)];
    else
        est.gap_quality = std::numeric_limits<double>::infinity();
    return est;
}

BoundedSolutionVerdict bounded_solution_oracle(const CoefficientSequence& seq,
                                               const ProjectionFamily* family_hint, long long m,
                                               const Vector& xi, const BoundedSolutionOptions& opts,
                                               const ToleranceConfig& tol) {
    require(xi.size() == seq.dim(), ErrorCode::DimensionMismatch,
            "bounded_solution_oracle: xi has the wrong dimension");
    BoundedSolutionVerdict v;
    v.envelope = opts.envelope_factor * std::max(1.0, xi.norm());

    // forward branch by direct iteration
    if (seq.interval().contains(m + opts.horizon)) {
        Vector x = xi;
        v.sup_forward = x.norm();
        for (long long k = m; k < m + opts.horizon; ++k) {
            x = seq.at(k) * x;
            require(x.allFinite(), ErrorCode::OverflowDetected,
                    "bounded_solution_oracle: forward iterate overflowed");
            v.sup_forward = std::max(v.sup_forward, x.norm());
        }
        v.bounded_forward = v.sup_forward <= v.envelope;
    } else {
        v.bounded_forward = false;
        v.sup_forward = std::numeric_limits<double>::quiet_NaN();
    }

    // backward branch through the restricted inverses of the hinted family
    if (family_hint != nullptr && seq.interval().contains(m - opts.horizon)) {
        v.backward_constructed = true;
        const long long a = m - opts.horizon;
        v.backward_solution.assign(static_cast<size_t>(opts.horizon) + 1, Vector());
        Vector y = xi;
        v.backward_solution.back() = y;
        v.sup_backward = y.norm();
        for (long long k = m - 1; k >= a; --k) {
            y = one_step_backward(seq, *family_hint, k, tol) * y;
            v.backward_solution[static_cast<size_t>(k - a)] = y;
            v.sup_backward = std::max(v.sup_backward, y.norm());
        }
        // re-run the equation forward to certify y(m) = xi
        Vector z = v.backward_solution.front();
        for (long long k = a; k < m; ++k) z = seq.at(k) * z;
        v.backward_matches_xi = (z - xi).norm();
        v.bounded_backward = v.sup_backward <= v.envelope &&
                             v.backward_matches_xi <= tol.tol_residual * std::max(1.0, xi.norm());
    }
    return v;
}

}  // namespace dichotomy
