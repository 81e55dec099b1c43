#pragma once

#include <map>
#include <optional>

#include "dichotomy/interval.hpp"
#include "dichotomy/sequence.hpp"

namespace dichotomy {

/// An invariant family of projections P(k) on an interval: explicit window
/// plus constant tails in the infinite directions. All members must be
/// projections of the same rank; invariance A(k)P(k) = P(k+1)A(k) is checked
/// by validate() rather than on construction, since families are also used
/// as hints before a certificate exists.
class ProjectionFamily {
  public:
    /// Default: an empty placeholder (dim 0); any lookup on it fails.
    ProjectionFamily() = default;

    ProjectionFamily(Interval interval, std::map<long long, Matrix> window,
                     std::optional<Matrix> left_tail = std::nullopt,
                     std::optional<Matrix> right_tail = std::nullopt);

    /// Constant family P(k) = p on the interval.
    static ProjectionFamily constant(Interval interval, const Matrix& p);

    int dim() const { return n_; }
    int rank() const { return rank_; }
    const Interval& interval() const { return interval_; }
    const std::map<long long, Matrix>& window() const { return window_; }
    const std::optional<Matrix>& left_tail() const { return left_tail_; }
    const std::optional<Matrix>& right_tail() const { return right_tail_; }

    const Matrix& at(long long k) const;
    bool resolvable(long long k) const;

    /// Family with one projection replaced/added.
    ProjectionFamily with(long long k, const Matrix& p) const;
    /// Restriction to a subinterval (window entries outside are dropped,
    /// tails kept only where the subinterval is unbounded).
    ProjectionFamily restricted_to(Interval sub) const;

    struct ValidationReport {
        double max_idempotency_residual = 0.0;
        double max_invariance_residual = 0.0;
        bool constant_rank = true;
        long long worst_invariance_k = 0;
        bool pass = false;
    };
    /// Checks P(k)^2 = P(k), constant rank, and A(k)P(k) = P(k+1)A(k) for k
    /// in [lo, hi-1]; residuals are relative to the local matrix scales.
    ValidationReport validate(const CoefficientSequence& seq, long long lo, long long hi,
                              const ToleranceConfig& tol = {}) const;

  private:
    int n_ = 0;
    int rank_ = 0;
    Interval interval_;
    std::map<long long, Matrix> window_;
    std::optional<Matrix> left_tail_, right_tail_;
    long long window_lo_ = 0, window_hi_ = -1;
};

}  // namespace dichotomy
