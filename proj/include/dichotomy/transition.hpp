#pragma once

#include <vector>

#include "dichotomy/family.hpp"
#include "dichotomy/linalg.hpp"

namespace dichotomy {

/// Phi(k,m) = A(k-1) ... A(m) for k >= m; the identity when k = m.
struct TransitionOperator {
    long long source = 0;  // m
    long long target = 0;  // k
    Matrix matrix;
};

/// Ordered product, computed by successive multiplication in increasing k.
/// Throws OverflowDetected when entries leave the double range instead of
/// returning Inf.
TransitionOperator transition(const CoefficientSequence& seq, long long k, long long m);

/// One-step backward operator D(j) = [A(j)|_{NP(j) -> NP(j+1)}]^{-1} (I - P(j+1)).
/// Throws NotInjectiveOnNullspace when the restriction is rank-deficient
/// (the Theorem obstruction for extending past a singular step).
Matrix one_step_backward(const CoefficientSequence& seq, const ProjectionFamily& fam, long long j,
                         const ToleranceConfig& tol = {});

/// Phi(m,k)(I - P(k)) as a single n x n matrix: inverts Phi(k,m) on NP(k)
/// and vanishes on RP(k). Requires the family invariant on [m,k].
Matrix restricted_backward(const CoefficientSequence& seq, const ProjectionFamily& fam,
                           long long m, long long k, const ToleranceConfig& tol = {});

/// Per-window precomputation shared by the verification sweeps: coefficient
/// matrices, projections, and one-step backward operators for [lo, hi].
/// Read-only after construction, so sweep kernels may share it across
/// threads.
class WindowContext {
  public:
    WindowContext(const CoefficientSequence& seq, const ProjectionFamily& fam, long long lo,
                  long long hi, const ToleranceConfig& tol = {});

    long long lo() const { return lo_; }
    long long hi() const { return hi_; }
    int dim() const { return n_; }
    int rank() const { return rank_; }
    const ToleranceConfig& tol() const { return tol_; }

    const Matrix& coeff(long long k) const { return a_.at(idx(k)); }          // A(k), k in [lo,hi-1]
    const Matrix& projection(long long k) const { return p_.at(idx(k)); }     // P(k)
    const Matrix& complement_proj(long long k) const { return q_.at(idx(k)); }  // I - P(k)
    const Matrix& backstep(long long k) const { return d_.at(idx(k)); }       // D(k), k in [lo,hi-1]
    const Matrix& range_basis(long long k) const { return rb_.at(idx(k)); }
    const Matrix& null_basis(long long k) const { return nb_.at(idx(k)); }

  private:
    size_t idx(long long k) const {
        require(k >= lo_ && k <= hi_, ErrorCode::IndexOutsideInterval,
                "WindowContext: index outside window");
        return static_cast<size_t>(k - lo_);
    }
    long long lo_, hi_;
    int n_, rank_;
    ToleranceConfig tol_;
    std::vector<Matrix> a_, p_, q_, d_, rb_, nb_;
};

}  // namespace dichotomy
