#include "dichotomy/surgery.hpp"

#include <cmath>

namespace dichotomy {

namespace {

std::pair<long long, long long> finite_window(const DichotomyCertificate& cert, const char* who) {
    require(cert.verified_window.kind == Interval::Kind::Finite, ErrorCode::InvalidInput,
            std::string(who) + ": certificate must carry a finite verified window");
    return {cert.verified_window.a, cert.verified_window.b};
}

double smallest_principal_angle(const Subspace& s1, const Subspace& s2) {
    if (s1.dim() == 0 || s2.dim() == 0) return M_PI / 2;
    const double c = std::min(1.0, spectral_norm(s1.basis().transpose() * s2.basis()));
    return std::acos(c);
}

// measured constants at the certificate's alpha, as a Form A certificate
DichotomyCertificate tighten(const SequencePtr& seq, const ProjectionFamily& fam, long long lo,
                             long long hi, double alpha, const ToleranceConfig& tol) {
    EstimateOptions opts;
    opts.alpha = alpha;
    return estimate_constants(seq, fam, lo, hi, opts, tol).certificate;
}

}  // namespace

SurgeryResult change_complement_plus(const DichotomyCertificate& cert, const Subspace& w,
                                     const ToleranceConfig& tol) {
    auto [lo, hi] = finite_window(cert, "change_complement_plus");
    const int n = cert.dim();
    require(w.ambient_dim() == n, ErrorCode::DimensionMismatch,
            "change_complement_plus: ambient dim mismatch");

    Subspace range_base = projection_range(cert.family.at(lo), tol);
    require(w.dim() == n - range_base.dim(), ErrorCode::NotAComplement,
            "change_complement_plus: W has the wrong dimension");
    if (w.dim() > 0) {
        Matrix both(n, range_base.dim() + w.dim());
        both << range_base.basis(), w.basis();
        require(rank_of(both, tol) == n, ErrorCode::NotAComplement,
                "change_complement_plus: W does not complement RP(a)");
    }

    // W(k) = Phi(k,a)(W), propagated one factor at a time
    std::map<long long, Matrix> window;
    Matrix wk = w.basis();
    for (long long k = lo; k <= hi; ++k) {
        Subspace null_k =
            wk.cols() > 0 ? Subspace(orthonormalize_columns(wk, tol), tol) : Subspace::zero(n);
        window[k] = make_projection(projection_range(cert.family.at(k), tol), null_k, tol);
        if (k < hi) wk = cert.seq->at(k) * wk;
    }
    ProjectionFamily qfam(Interval::finite(lo, hi), std::move(window));

    const Form fb = cert.form.as_formB();
    const double q0 = spectral_norm(qfam.at(lo));
    const double m1 = fb.M + fb.K * fb.K * fb.M * q0;
    SurgeryResult res;
    res.guaranteed =
        Form::formB(std::max(1.0, 1.0 + m1), std::max(1.0, fb.K * fb.M * (1.0 + m1)), fb.alpha);
    res.gap_angle = smallest_principal_angle(range_base, w);
    res.certificate = tighten(cert.seq, qfam, lo, hi, cert.form.alpha, tol);
    return res;
}

SurgeryResult change_complement_minus(const DichotomyCertificate& cert, const Subspace& w,
                                      const ToleranceConfig& tol) {
    auto [lo, hi] = finite_window(cert, "change_complement_minus");
    const int n = cert.dim();
    require(w.ambient_dim() == n, ErrorCode::DimensionMismatch,
            "change_complement_minus: ambient dim mismatch");

    Subspace null_base = projection_nullspace(cert.family.at(hi), tol);
    require(w.dim() == n - null_base.dim(), ErrorCode::NotAComplement,
            "change_complement_minus: W has the wrong dimension");
    if (w.dim() > 0 && null_base.dim() > 0) {
        Matrix both(n, null_base.dim() + w.dim());
        both << null_base.basis(), w.basis();
        require(rank_of(both, tol) == n, ErrorCode::NotAComplement,
                "change_complement_minus: W does not complement NP(b)");
    }

    // W(k) = Phi(b,k)^{-1}(W), stepped down: W(k) = A(k)^{-1}(W(k+1))
    std::map<long long, Matrix> window;
    Subspace wk = w;
    for (long long k = hi; k >= lo; --k) {
        window[k] = make_projection(wk, projection_nullspace(cert.family.at(k), tol), tol);
        if (k > lo) {
            wk = preimage(cert.seq->at(k - 1), wk, tol);
            require(wk.dim() == w.dim(), ErrorCode::NotAComplement,
                    "change_complement_minus: preimage dimension collapsed at k=" +
                        std::to_string(k - 1));
        }
    }
    ProjectionFamily qfam(Interval::finite(lo, hi), std::move(window));

    const Form fb = cert.form.as_formB();
    const double dpq = spectral_norm(cert.family.at(hi) - qfam.at(hi));
    SurgeryResult res;
    res.guaranteed = Form::formB(std::max(1.0, fb.M + fb.K * fb.K * fb.M * dpq),
                                 std::max(fb.K, fb.K * fb.M * (1.0 + fb.K * dpq)), fb.alpha);
    res.gap_angle = smallest_principal_angle(null_base, w);
    res.certificate = tighten(cert.seq, qfam, lo, hi, cert.form.alpha, tol);
    return res;
}

SurgeryResult rebase_at_m(const DichotomyCertificate& cert, long long m, const Subspace& w,
                          Side side, const ToleranceConfig& tol) {
    auto [lo, hi] = finite_window(cert, "rebase_at_m");
    const int n = cert.dim();
    require(m >= lo && m <= hi, ErrorCode::InvalidInput,
            "rebase_at_m: m outside the certificate window");

    if (side == Side::Plus) {
        if (m == lo) return change_complement_plus(cert, w, tol);
        Matrix phi = transition(*cert.seq, m, lo).matrix;
        Subspace range_m = projection_range(cert.family.at(m), tol);
        require(w.dim() == n - range_m.dim(), ErrorCode::NotAComplement,
                "rebase_at_m: W has the wrong dimension");
        Matrix both(n, range_m.dim() + w.dim());
        both << range_m.basis(), w.basis();
        require(rank_of(both, tol) == n, ErrorCode::NotAComplement,
                "rebase_at_m: W does not complement RP(m)");
        // V with V (+) N(Phi(m,a)) = Phi(m,a)^{-1}(W)
        Subspace pre = preimage(phi, w, tol);
        Subspace ker = kernel_of(phi, tol);
        Subspace v = complement(ker, pre, std::nullopt, tol);
        return change_complement_plus(cert, v, tol);
    }

    if (m == hi) return change_complement_minus(cert, w, tol);
    Matrix phi = transition(*cert.seq, hi, m).matrix;
    Subspace null_m = projection_nullspace(cert.family.at(m), tol);
    require(w.dim() == n - null_m.dim(), ErrorCode::NotAComplement,
            "rebase_at_m: W has the wrong dimension");
    if (null_m.dim() > 0) {
        Matrix both(n, null_m.dim() + w.dim());
        both << null_m.basis(), w.basis();
        require(rank_of(both, tol) == n, ErrorCode::NotAComplement,
                "rebase_at_m: W does not complement NP(m)");
    }
    Subspace ker = kernel_of(phi, tol);
    require(w.contains(ker, tol.tol_residual * 10), ErrorCode::ComplementConstraintViolated,
            "rebase_at_m: N(Phi(b,m)) is not contained in W");
    // V contains Phi(b,m)(W) and complements NP(b)
    Subspace image = Subspace::span_of(phi * w.basis(), tol);
    Subspace null_base = projection_nullspace(cert.family.at(hi), tol);
    Subspace v = complement(null_base, std::nullopt, image, tol);
    return change_complement_minus(cert, v, tol);
}

SurgeryResult glue_half_lines(const DichotomyCertificate& cert_plus,
                              const DichotomyCertificate& cert_minus,
                              const ToleranceConfig& tol) {
    require(cert_plus.seq == cert_minus.seq, ErrorCode::InvalidInput,
            "glue_half_lines: certificates must refer to the same sequence");
    auto [plo, phi_] = finite_window(cert_plus, "glue_half_lines");
    auto [mlo, mhi] = finite_window(cert_minus, "glue_half_lines");
    require(mhi == plo, ErrorCode::InvalidInput,
            "glue_half_lines: windows must meet at a shared endpoint");
    require(cert_plus.rank() == cert_minus.rank(), ErrorCode::RankMismatch,
            "glue_half_lines: ranks differ");
    const int n = cert_plus.dim();

    Subspace stable = projection_range(cert_plus.family.at(plo), tol);
    Subspace unstable = projection_nullspace(cert_minus.family.at(mhi), tol);
    {
        Matrix both(n, stable.dim() + unstable.dim());
        both << stable.basis(), unstable.basis();
        require(stable.dim() + unstable.dim() == n && rank_of(both, tol) == n,
                ErrorCode::TransversalityFailure,
                "glue_half_lines: stable and unstable subspaces are not transversal at the seam");
    }

    SurgeryResult plus = change_complement_plus(cert_plus, unstable, tol);
    SurgeryResult minus = change_complement_minus(cert_minus, stable, tol);

    std::map<long long, Matrix> window;
    for (long long k = mlo; k <= mhi; ++k) window[k] = minus.certificate.family.at(k);
    for (long long k = plo + 1; k <= phi_; ++k) window[k] = plus.certificate.family.at(k);
    ProjectionFamily fam(Interval::finite(mlo, phi_), std::move(window));

    const Form fbp = plus.certificate.form.as_formB();
    const Form fbm = minus.certificate.form.as_formB();
    const double alpha = std::min(fbp.alpha, fbm.alpha);
    SurgeryResult res;
    res.guaranteed = Form::formB(std::max(fbp.M, fbm.M), std::max(1.0, fbp.K * fbm.K), alpha);
    res.gap_angle = smallest_principal_angle(stable, unstable);
    res.certificate = tighten(cert_plus.seq, fam, mlo, phi_, alpha, tol);
    return res;
}

WitnessResult nonuniqueness_witness(const DichotomyCertificate& cert, long long m, Side side,
                                    const ToleranceConfig& tol) {
    auto [lo, hi] = finite_window(cert, "nonuniqueness_witness");
    const int n = cert.dim();
    require(m >= lo && m <= hi, ErrorCode::InvalidInput,
            "nonuniqueness_witness: m outside the certificate window");

    WitnessResult out;
    out.agree_at = m;

    const long long base = side == Side::Plus ? lo : hi;
    Matrix phi = side == Side::Plus ? transition(*cert.seq, m, base).matrix
                                    : transition(*cert.seq, base, m).matrix;
    Subspace ker = kernel_of(phi, tol);
    if (ker.dim() == 0) return out;  // invertible: the projection is unique, NoWitness

    Subspace v1, v2;
    if (side == Side::Plus) {
        v1 = projection_nullspace(cert.family.at(base), tol);
        require(v1.dim() > 0, ErrorCode::InvalidInput,
                "nonuniqueness_witness: rank-n certificates have no complement freedom");
        // rotate the first complement direction 45 degrees toward the kernel
        Matrix basis = v1.basis();
        Vector u = ker.basis().col(0);
        basis.col(0) = (basis.col(0) + u).normalized();
        v2 = Subspace::span_of(basis, tol);
    } else {
        v1 = projection_range(cert.family.at(base), tol);
        Subspace nb = projection_nullspace(cert.family.at(base), tol);
        require(v1.dim() > 0 && nb.dim() > 0, ErrorCode::InvalidInput,
                "nonuniqueness_witness: degenerate rank leaves no range freedom");
        // the forced part of V is X = Phi(b,m)(RP(m)); rotate a free direction
        Subspace x = Subspace::span_of(phi * projection_range(cert.family.at(m), tol).basis(), tol);
        Subspace free_dirs = complement(x, v1, std::nullopt, tol);
        require(free_dirs.dim() > 0, ErrorCode::InvalidInput,
                "nonuniqueness_witness: no free range direction despite a singular transition");
        Matrix basis(n, v1.dim());
        if (x.dim() > 0) basis.leftCols(x.dim()) = x.basis();
        basis.rightCols(free_dirs.dim()) = free_dirs.basis();
        Vector u = nb.basis().col(0);
        basis.col(x.dim()) = (free_dirs.basis().col(0) + u).normalized();
        v2 = Subspace::span_of(basis, tol);
    }
    SurgeryResult first = side == Side::Plus ? change_complement_plus(cert, v1, tol)
                                             : change_complement_minus(cert, v1, tol);
    SurgeryResult second = side == Side::Plus ? change_complement_plus(cert, v2, tol)
                                              : change_complement_minus(cert, v2, tol);

    out.found = true;
    out.agreement_gap =
        spectral_norm(first.certificate.family.at(m) - second.certificate.family.at(m));
    out.differ_at = base;
    out.difference_gap = 0.0;
    for (long long k = lo; k <= hi; ++k) {
        const double g =
            spectral_norm(first.certificate.family.at(k) - second.certificate.family.at(k));
        if (g > out.difference_gap) {
            out.difference_gap = g;
            out.differ_at = k;
        }
    }
    out.first = std::move(first.certificate);
    out.second = std::move(second.certificate);
    return out;
}

}  // namespace dichotomy
