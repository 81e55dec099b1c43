#include "dichotomy/extension.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dichotomy {

namespace {

std::pair<long long, long long> finite_window(const DichotomyCertificate& cert, const char* who) {
    require(cert.verified_window.kind == Interval::Kind::Finite, ErrorCode::InvalidInput,
            std::string(who) + ": certificate must carry a finite verified window");
    return {cert.verified_window.a, cert.verified_window.b};
}

// sigma_min of A restricted to the columns of basis (n x d)
double restricted_sigma_min(const Matrix& a, const Matrix& basis) {
    if (basis.cols() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<Matrix> svd(a * basis);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// operator norm of the inverse of A(j) : NP(j) -> NP(j+1)
double restricted_inverse_norm(const Matrix& a, const Matrix& pj, const Matrix& pj1,
                               const ToleranceConfig& tol) {
    Subspace nj = projection_nullspace(pj, tol);
    if (nj.dim() == 0) return 0.0;
    Subspace nj1 = projection_nullspace(pj1, tol);
    Matrix c = nj1.basis().transpose() * (a * nj.basis());
    Eigen::JacobiSVD<Matrix> svd(c);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    require(smin > 0.0, ErrorCode::NotInjectiveOnNullspace, "step is singular on the nullspace");
    return 1.0 / smin;
}

DichotomyCertificate tighten(const SequencePtr& seq, const ProjectionFamily& fam, long long lo,
                             long long hi, double alpha, const ToleranceConfig& tol) {
    EstimateOptions opts;
    opts.alpha = alpha;
    return estimate_constants(seq, fam, lo, hi, opts, tol).certificate;
}

}  // namespace

ExtensionVerdict can_extend_plus(const DichotomyCertificate& cert, long long m, long long to,
                                 const ToleranceConfig& tol) {
    require(m > to, ErrorCode::InvalidInput, "can_extend_plus: need m > target index");
    ExtensionVerdict v;
    v.required_rank = cert.rank();
    Matrix phi = transition(*cert.seq, m, to).matrix;
    Subspace range_m = projection_range(cert.family.at(m), tol);
    v.preimage_dim = preimage(phi, range_m, tol).dim();
    v.extendable = v.preimage_dim == v.required_rank;
    v.projection_preserved = v.extendable;
    if (!v.extendable) v.obstruction = ErrorCode::DimensionMismatch;
    return v;
}

ExtensionVerdict can_extend_minus(const DichotomyCertificate& cert, long long m, long long to,
                                  const ToleranceConfig& tol) {
    require(m < to, ErrorCode::InvalidInput, "can_extend_minus: need m < target index");
    ExtensionVerdict v;
    v.required_rank = cert.rank();
    Matrix phi = transition(*cert.seq, to, m).matrix;
    Subspace null_m = projection_nullspace(cert.family.at(m), tol);

    const double smin = restricted_sigma_min(phi, null_m.basis());
    const double smax = null_m.dim() > 0 ? spectral_norm(phi * null_m.basis()) : 0.0;
    const bool injective = null_m.dim() == 0 || (smax > 0.0 && smin > tol.tol_rank * smax);
    if (!injective) {
        v.extendable = false;
        v.obstruction = ErrorCode::NotInjectiveOnNullspace;
        return v;
    }
    v.extendable = true;
    Subspace ker = kernel_of(phi, tol);
    Subspace range_m = projection_range(cert.family.at(m), tol);
    if (range_m.contains(ker, tol.tol_residual * 10)) {
        v.projection_preserved = true;
    } else {
        v.projection_preserved = false;
        v.obstruction = ErrorCode::KernelNotInStable;
    }
    return v;
}

ExtensionResult extend_plus(const DichotomyCertificate& cert, long long to,
                            const ToleranceConfig& tol) {
    auto [m, hi] = finite_window(cert, "extend_plus");
    require(m > to, ErrorCode::InvalidInput, "extend_plus: window already reaches the target");
    const int n = cert.dim();
    const int r = cert.rank();
    const double alpha = cert.form.alpha;
    const double ea = std::exp(alpha);
    const Matrix id = Matrix::Identity(n, n);

    std::map<long long, Matrix> pmap;
    for (long long k = m; k <= hi; ++k) pmap[k] = cert.family.at(k);

    double kconst = cert.form.as_formA().L;
    for (long long j = m - 1; j >= to; --j) {
        const Matrix& a = cert.seq->at(j);
        Subspace u = preimage(a, projection_range(pmap.at(j + 1), tol), tol);
        if (u.dim() != r)
            throw DichotomyError(ErrorCode::ExtensionObstructed,
                                 "extend_plus: dim(A(" + std::to_string(j) + ")^{-1}(RP(" +
                                     std::to_string(j + 1) + "))) = " + std::to_string(u.dim()) +
                                     " != r = " + std::to_string(r));
        Subspace pre_null = preimage(a, projection_nullspace(pmap.at(j + 1), tol), tol);
        Subspace v = complement(kernel_of(a, tol), pre_null, std::nullopt, tol);
        Matrix pj = make_projection(u, v, tol);

        const double na = spectral_norm(a);
        const double np = spectral_norm(pj);
        const double k1 = std::max({kconst, kconst * na * ea, na * np * ea, np});
        const double inv_n = restricted_inverse_norm(a, pj, pmap.at(j + 1), tol);
        ProjectionFamily step(Interval::finite(j, j + 1), {{j, pj}, {j + 1, pmap.at(j + 1)}});
        const double bwd_step = spectral_norm(one_step_backward(*cert.seq, step, j, tol));
        const double k2 = std::max({kconst, inv_n * kconst * ea, bwd_step * ea,
                                    spectral_norm(id - pj)});
        kconst = std::max(k1, k2);
        pmap[j] = std::move(pj);
    }
    ProjectionFamily fam(Interval::finite(to, hi), std::move(pmap));

    ExtensionResult res;
    res.verdict = can_extend_plus(cert, m, to, tol);
    res.guaranteed = Form::formA(std::max(1.0, kconst), alpha);
    res.certificate = tighten(cert.seq, fam, to, hi, alpha, tol);
    return res;
}

ExtensionResult extend_minus(const DichotomyCertificate& cert, long long to,
                             const ToleranceConfig& tol) {
    auto [lo, m] = finite_window(cert, "extend_minus");
    require(m < to, ErrorCode::InvalidInput, "extend_minus: window already reaches the target");
    const int n = cert.dim();
    const double alpha = cert.form.alpha;
    const double ea = std::exp(alpha);
    const Matrix id = Matrix::Identity(n, n);

    ExtensionResult res;
    res.verdict = can_extend_minus(cert, m, to, tol);
    if (res.verdict.obstruction == ErrorCode::NotInjectiveOnNullspace)
        throw DichotomyError(ErrorCode::ExtensionObstructed,
                             "extend_minus: Phi(to,m) is not injective on NP(m)");

    DichotomyCertificate work = cert;
    double kconst = cert.form.as_formA().L;
    for (long long j = m; j < to; ++j) {
        const Matrix& a = cert.seq->at(j);
        Subspace range_j = projection_range(work.family.at(j), tol);
        Subspace ker = kernel_of(a, tol);
        if (!range_j.contains(ker, tol.tol_residual * 10)) {
            // re-choose the range at j so that N(A(j)) sits inside it
            Subspace null_j = projection_nullspace(work.family.at(j), tol);
            Subspace wj = complement(null_j, std::nullopt, ker, tol);
            SurgeryResult re = change_complement_minus(work, wj, tol);
            work = re.certificate;
            range_j = projection_range(work.family.at(j), tol);
            kconst = std::max(kconst, re.guaranteed.as_formA().L);
            res.rechosen_at.push_back(j);
        }
        Subspace null_j = projection_nullspace(work.family.at(j), tol);
        // U = A(j)(NP(j)), V = A(j)(RP(j)), W = orthogonal completion
        Matrix u_cols = a * null_j.basis();
        require(null_j.dim() == 0 || rank_of(u_cols, tol) == null_j.dim(),
                ErrorCode::ExtensionObstructed,
                "extend_minus: A(" + std::to_string(j) + ") collapses the nullspace");
        Subspace u = Subspace::span_of(u_cols, tol);
        Subspace v =
            range_j.dim() > 0 ? Subspace::span_of(a * range_j.basis(), tol) : Subspace::zero(n);
        Matrix uv(n, u.dim() + v.dim());
        uv << u.basis(), v.basis();
        Subspace w = complement(Subspace::span_of(uv, tol), std::nullopt, std::nullopt, tol);
        Matrix vw(n, v.dim() + w.dim());
        vw << v.basis(), w.basis();
        Matrix pj1 = make_projection(Subspace::span_of(vw, tol), u, tol);

        const double inv_n = restricted_inverse_norm(a, work.family.at(j), pj1, tol);
        const double k1 = std::max({kconst, spectral_norm(a) * kconst * ea, spectral_norm(pj1)});
        const double k2 = std::max(
            {kconst, kconst * ea * inv_n * spectral_norm(id - pj1), spectral_norm(id - pj1)});
        kconst = std::max(k1, k2);

        std::map<long long, Matrix> wfam;
        for (long long k = lo; k <= j; ++k) wfam[k] = work.family.at(k);
        wfam[j + 1] = std::move(pj1);
        work.family = ProjectionFamily(Interval::finite(lo, j + 1), std::move(wfam));
        work.verified_window = Interval::finite(lo, j + 1);
    }

    if (res.verdict.projection_preserved && !res.rechosen_at.empty()) {
        // criterion (ii) holds: restore the original projections at k <= m
        Subspace orig_range = projection_range(cert.family.at(m), tol);
        SurgeryResult re = rebase_at_m(work, m, orig_range, Side::Minus, tol);
        work = re.certificate;
        kconst = std::max(kconst, re.guaranteed.as_formA().L);
    }

    res.guaranteed = Form::formA(std::max(1.0, kconst), alpha);
    res.certificate = tighten(cert.seq, work.family, lo, to, alpha, tol);
    return res;
}

EmbedResult embed_in_Z(const DichotomyCertificate& cert, const ToleranceConfig&) {
    const Interval itv = cert.family.interval();
    require(itv.kind != Interval::Kind::Whole, ErrorCode::InvalidInput,
            "embed_in_Z: the certificate already lives on Z");
    const int n = cert.dim();
    const Matrix id = Matrix::Identity(n, n);
    const double alpha = cert.form.alpha;
    const double eplus = std::exp(alpha), eminus = std::exp(-alpha);

    EmbedResult out;
    TailRule left_tail = TailRule::none(), right_tail = TailRule::none();
    std::optional<Matrix> left_p, right_p;

    const long long a = itv.bounded_below() ? itv.a : cert.verified_window.a;
    const long long b = itv.bounded_above() ? itv.b : cert.verified_window.b;
    require(a <= b, ErrorCode::InvalidInput, "embed_in_Z: degenerate interval");

    if (itv.bounded_below()) {
        const Matrix& pa = cert.family.at(a);
        out.left_matrix = eminus * pa + eplus * (id - pa);
        left_tail = TailRule::constant(out.left_matrix);
        left_p = pa;
    } else {
        left_tail = cert.seq->left_tail();
        require(cert.family.left_tail().has_value(), ErrorCode::InvalidInput,
                "embed_in_Z: family lacks a left tail on an unbounded interval");
        left_p = cert.family.left_tail();
    }
    if (itv.bounded_above()) {
        const Matrix& pb = cert.family.at(b);
        out.right_matrix = eminus * pb + eplus * (id - pb);
        right_tail = TailRule::constant(out.right_matrix);
        right_p = pb;
    } else {
        right_tail = cert.seq->right_tail();
        require(cert.family.right_tail().has_value(), ErrorCode::InvalidInput,
                "embed_in_Z: family lacks a right tail on an unbounded interval");
        right_p = cert.family.right_tail();
    }

    std::map<long long, Matrix> aw;
    std::map<long long, Matrix> pw;
    for (long long k = a; k < b; ++k) aw[k] = cert.seq->at(k);
    for (long long k = a; k <= b; ++k) pw[k] = cert.family.at(k);

    out.extended_seq = std::make_shared<CoefficientSequence>(
        n, Interval::whole(), std::move(aw), std::move(left_tail), std::move(right_tail));
    ProjectionFamily fam(Interval::whole(), std::move(pw), std::move(left_p), std::move(right_p));
    out.certificate = DichotomyCertificate{out.extended_seq, std::move(fam),
                                           cert.form.as_formA(), cert.verified_window, {}};
    return out;
}

}  // namespace dichotomy
