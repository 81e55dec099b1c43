#include "dichotomy/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dichotomy {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::NotAComplement: return "NotAComplement";
        case ErrorCode::NotInjectiveOnNullspace: return "NotInjectiveOnNullspace";
        case ErrorCode::KernelNotInStable: return "KernelNotInStable";
        case ErrorCode::ComplementConstraintViolated: return "ComplementConstraintViolated";
        case ErrorCode::RankMismatch: return "RankMismatch";
        case ErrorCode::TransversalityFailure: return "TransversalityFailure";
        case ErrorCode::ExtensionObstructed: return "ExtensionObstructed";
        case ErrorCode::NoDecay: return "NoDecay";
        case ErrorCode::NoGap: return "NoGap";
        case ErrorCode::NotAdmissible: return "NotAdmissible";
        case ErrorCode::SigmaTooLarge: return "SigmaTooLarge";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::OverflowDetected: return "OverflowDetected";
        case ErrorCode::IndexOutsideInterval: return "IndexOutsideInterval";
    }
    return "Unknown";
}

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite())
        throw DichotomyError(ErrorCode::InvalidInput,
                             std::string(what) + ": entries must be finite");
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

int rank_of(const Matrix& a, const ToleranceConfig& tol) {
    require(a.size() > 0, ErrorCode::InvalidInput, "rank_of: empty matrix");
    require_finite(a, "rank_of");
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    const double cutoff = tol.tol_rank * sv(0);
    if (sv(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

Subspace kernel_of(const Matrix& a, const ToleranceConfig& tol) {
    require(a.size() > 0, ErrorCode::InvalidInput, "kernel_of: empty matrix");
    require_finite(a, "kernel_of");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 && sv(0) > 0.0 ? tol.tol_rank * sv(0) : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return Subspace(svd.matrixV().rightCols(a.cols() - r), tol);
}

Subspace range_of(const Matrix& a, const ToleranceConfig& tol) {
    require(a.size() > 0, ErrorCode::InvalidInput, "range_of: empty matrix");
    require_finite(a, "range_of");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 && sv(0) > 0.0 ? tol.tol_rank * sv(0) : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return Subspace(svd.matrixU().leftCols(r), tol);
}

Subspace preimage(const Matrix& a, const Subspace& s, const ToleranceConfig& tol) {
    require(a.size() > 0, ErrorCode::InvalidInput, "preimage: empty matrix");
    require(s.ambient_dim() == a.rows(), ErrorCode::DimensionMismatch,
            "preimage: subspace ambient dim must equal rows of the matrix");
    // x is in the preimage iff the component of a*x orthogonal to s vanishes,
    // i.e. x lies in the kernel of (I - proj_s) a.
    Matrix rejected = a - s.basis() * (s.basis().transpose() * a);
    // Kernel cutoff must be relative to a, not to the possibly tiny rejected
    // part, so that directions mapped into s by a near-zero residual count.
    Eigen::JacobiSVD<Matrix> svd(rejected, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(spectral_norm(a), sv.size() > 0 ? sv(0) : 0.0);
    const double cutoff = tol.tol_rank * scale;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return Subspace(svd.matrixV().rightCols(a.cols() - r), tol);
}

Matrix orthonormalize_columns(const Matrix& columns, const ToleranceConfig& tol) {
    require_finite(columns, "orthonormalize_columns");
    Matrix q = columns;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i)
                q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        const double nrm = q.col(j).norm();
        require(nrm > tol.tol_rank, ErrorCode::InvalidInput,
                "orthonormalize_columns: numerically dependent columns");
        q.col(j) /= nrm;
    }
    return q;
}

Subspace complement(const Subspace& s, const std::optional<Subspace>& within,
                    const std::optional<Subspace>& containing, const ToleranceConfig& tol) {
    const int n = s.ambient_dim();
    const Subspace amb = within.value_or(Subspace::full(n));
    require(amb.ambient_dim() == n, ErrorCode::DimensionMismatch,
            "complement: ambient dims differ");
    require(amb.contains(s, tol.tol_residual), ErrorCode::InvalidInput,
            "complement: s is not inside `within`");

    Matrix seed(n, 0);
    if (containing) {
        require(containing->ambient_dim() == n, ErrorCode::DimensionMismatch,
                "complement: ambient dims differ");
        require(amb.contains(*containing, tol.tol_residual), ErrorCode::InvalidInput,
                "complement: `containing` is not inside `within`");
        // containing must meet s trivially
        if (containing->dim() > 0 && s.dim() > 0) {
            Matrix both(n, s.dim() + containing->dim());
            both << s.basis(), containing->basis();
            require(rank_of(both, tol) == s.dim() + containing->dim(), ErrorCode::NotAComplement,
                    "complement: `containing` intersects s nontrivially");
        }
        seed = containing->basis();
    }

    const int needed = amb.dim() - s.dim() - static_cast<int>(seed.cols());
    require(needed >= 0, ErrorCode::NotAComplement,
            "complement: `containing` too large for a complement");

    if (needed > 0) {
        // Orthogonal complement of (s + seed) inside `within`: reject both
        // from a basis of `within` and take the surviving directions.
        Matrix cand = amb.basis();
        cand -= s.basis() * (s.basis().transpose() * cand);
        if (seed.cols() > 0) {
            Matrix seed_on = orthonormalize_columns(seed, tol);
            cand -= seed_on * (seed_on.transpose() * cand);
        }
        Eigen::JacobiSVD<Matrix> svd(cand, Eigen::ComputeThinU);
        Matrix extra = svd.matrixU().leftCols(needed);
        Matrix full(n, seed.cols() + needed);
        full << seed, extra;
        seed = full;
    }
    if (seed.cols() == 0) return Subspace::zero(n);
    return Subspace(orthonormalize_columns(seed, tol), tol);
}

Matrix make_projection(const Subspace& range, const Subspace& nullsp, const ToleranceConfig& tol) {
    const int n = range.ambient_dim();
    require(nullsp.ambient_dim() == n, ErrorCode::DimensionMismatch,
            "make_projection: ambient dims differ");
    const int r = range.dim();
    require(r + nullsp.dim() == n, ErrorCode::NotAComplement,
            "make_projection: dims of range and nullspace must sum to n");
    if (r == 0) return Matrix::Zero(n, n);
    if (r == n) return Matrix::Identity(n, n);

    // Solve P [R N] = [R 0]. Partial-pivot LU keeps the solve exact on
    // triangular bases, which the surgery decay tests rely on.
    Matrix basis(n, n);
    basis << range.basis(), nullsp.basis();
    require(rank_of(basis, tol) == n, ErrorCode::NotAComplement,
            "make_projection: range + nullspace is rank-deficient");
    Eigen::PartialPivLU<Matrix> lu(basis);
    Matrix rhs(n, n);
    rhs.setZero();
    rhs.leftCols(r) = range.basis();
    Matrix p = rhs * lu.inverse();

    const double scale = std::max(1.0, spectral_norm(p));
    require(spectral_norm(p * p - p) <= tol.tol_residual * scale, ErrorCode::NotAComplement,
            "make_projection: idempotency residual too large");
    require(spectral_norm(p * range.basis() - range.basis()) <= tol.tol_residual * scale,
            ErrorCode::NotAComplement, "make_projection: range residual too large");
    require(spectral_norm(p * nullsp.basis()) <= tol.tol_residual * scale,
            ErrorCode::NotAComplement, "make_projection: nullspace residual too large");
    return p;
}

Subspace projection_range(const Matrix& p, const ToleranceConfig& tol) {
    return range_of(p, tol);
}

Subspace projection_nullspace(const Matrix& p, const ToleranceConfig& tol) {
    return kernel_of(p, tol);
}

int projection_rank(const Matrix& p) {
    if (p.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(p);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 0.5) ++r;
    return r;
}

// ---- Subspace ----

Subspace::Subspace(Matrix basis, const ToleranceConfig& tol) : basis_(std::move(basis)) {
    require_finite(basis_, "Subspace");
    require(basis_.rows() > 0, ErrorCode::InvalidInput, "Subspace: ambient dim must be positive");
    require(basis_.cols() <= basis_.rows(), ErrorCode::InvalidInput,
            "Subspace: more basis vectors than ambient dim");
    if (basis_.cols() > 0) {
        Matrix gram = basis_.transpose() * basis_ - Matrix::Identity(basis_.cols(), basis_.cols());
        require(gram.cwiseAbs().maxCoeff() <= tol.tol_orth, ErrorCode::InvalidInput,
                "Subspace: basis is not orthonormal within tol_orth");
    }
}

Subspace Subspace::zero(int ambient_dim) { return Subspace(Matrix(ambient_dim, 0)); }

Subspace Subspace::full(int ambient_dim) {
    return Subspace(Matrix::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::span_of(const Matrix& columns, const ToleranceConfig& tol) {
    require(columns.rows() > 0, ErrorCode::InvalidInput, "span_of: ambient dim must be positive");
    if (columns.cols() == 0) return zero(static_cast<int>(columns.rows()));
    if (columns.cols() == 1) {
        // single vector: plain normalization (rank-revealing SVD would lose
        // relative accuracy of tiny components)
        require_finite(columns, "span_of");
        const double nrm = columns.norm();
        if (nrm == 0.0) return zero(static_cast<int>(columns.rows()));
        return Subspace(columns / nrm, tol);
    }
    return range_of(columns, tol);
}

double Subspace::distance_to(const Vector& x) const {
    if (dim() == 0) return x.norm();
    return (x - basis_ * (basis_.transpose() * x)).norm();
}

bool Subspace::contains(const Matrix& columns, double tol) const {
    if (columns.cols() == 0) return true;
    Matrix rej = columns - basis_ * (basis_.transpose() * columns);
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        const double scale = std::max(1.0, columns.col(j).norm());
        if (rej.col(j).norm() > tol * scale) return false;
    }
    return true;
}

double subspace_distance(const Subspace& s1, const Subspace& s2) {
    require(s1.ambient_dim() == s2.ambient_dim(), ErrorCode::DimensionMismatch,
            "subspace_distance: ambient dims differ");
    return spectral_norm(s1.projector() - s2.projector());
}

}  // namespace dichotomy
