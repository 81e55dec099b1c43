#include "dichotomy/transition.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dichotomy {

namespace {
constexpr double kOverflowGuard = 1e300;

void check_overflow(const Matrix& m, long long k) {
    if (!m.allFinite() || m.cwiseAbs().maxCoeff() > kOverflowGuard)
        throw DichotomyError(ErrorCode::OverflowDetected,
                             "transition product leaves double range at k=" + std::to_string(k));
}
}  // namespace

TransitionOperator transition(const CoefficientSequence& seq, long long k, long long m) {
    require(k >= m, ErrorCode::InvalidInput, "transition: need k >= m");
    require(seq.interval().contains(m) && seq.interval().contains(k),
            ErrorCode::IndexOutsideInterval, "transition: indices outside the interval");
    Matrix phi = Matrix::Identity(seq.dim(), seq.dim());
    for (long long j = m; j < k; ++j) {
        phi = seq.at(j) * phi;
        check_overflow(phi, j + 1);
    }
    return {m, k, std::move(phi)};
}

Matrix one_step_backward(const CoefficientSequence& seq, const ProjectionFamily& fam, long long j,
                         const ToleranceConfig& tol) {
    const int n = seq.dim();
    const Matrix& a = seq.at(j);
    const Matrix& pj = fam.at(j);
    const Matrix& pj1 = fam.at(j + 1);

    const double inv_scale = (1.0 + spectral_norm(a)) * (1.0 + spectral_norm(pj));
    require(spectral_norm(a * pj - pj1 * a) <= tol.tol_residual * inv_scale,
            ErrorCode::InvalidInput,
            "one_step_backward: family is not invariant at k=" + std::to_string(j));

    Subspace nj = projection_nullspace(pj, tol);
    Subspace nj1 = projection_nullspace(pj1, tol);
    require(nj.dim() == nj1.dim(), ErrorCode::RankMismatch,
            "one_step_backward: family rank is not constant");
    if (nj.dim() == 0) return Matrix::Zero(n, n);

    // coordinates of A(j) : NP(j) -> NP(j+1)
    Matrix c = nj1.basis().transpose() * (a * nj.basis());
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    require(smax > 0.0 && smin > tol.tol_rank * smax, ErrorCode::NotInjectiveOnNullspace,
            "A(" + std::to_string(j) + ") is not injective on the projection nullspace");
    Matrix c_inv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    return nj.basis() * c_inv * nj1.basis().transpose() *
           (Matrix::Identity(n, n) - pj1);
}

Matrix restricted_backward(const CoefficientSequence& seq, const ProjectionFamily& fam,
                           long long m, long long k, const ToleranceConfig& tol) {
    require(k >= m, ErrorCode::InvalidInput, "restricted_backward: need k >= m");
    const int n = seq.dim();
    Matrix xi = Matrix::Identity(n, n) - fam.at(m);
    // Xi(m,k) = Xi(m,k-1) D(k-1), Xi(m,m) = I - P(m)
    for (long long j = m; j < k; ++j) {
        xi = xi * one_step_backward(seq, fam, j, tol);
        check_overflow(xi, j);
    }
    return xi;
}

WindowContext::WindowContext(const CoefficientSequence& seq, const ProjectionFamily& fam,
                             long long lo, long long hi, const ToleranceConfig& tol)
    : lo_(lo), hi_(hi), n_(seq.dim()), rank_(fam.rank()), tol_(tol) {
    require(lo <= hi, ErrorCode::InvalidInput, "WindowContext: need lo <= hi");
    require(fam.dim() == n_, ErrorCode::DimensionMismatch,
            "WindowContext: family and sequence dimensions differ");
    const size_t w = static_cast<size_t>(hi - lo + 1);
    a_.reserve(w);
    p_.reserve(w);
    q_.reserve(w);
    d_.reserve(w);
    rb_.reserve(w);
    nb_.reserve(w);
    const Matrix id = Matrix::Identity(n_, n_);
    for (long long k = lo; k <= hi; ++k) {
        p_.push_back(fam.at(k));
        q_.push_back(id - p_.back());
        rb_.push_back(projection_range(p_.back(), tol).basis());
        nb_.push_back(projection_nullspace(p_.back(), tol).basis());
        if (k < hi) {
            a_.push_back(seq.at(k));
            d_.push_back(one_step_backward(seq, fam, k, tol));
        }
    }
}

}  // namespace dichotomy
