#include "dichotomy/roughness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dichotomy/extension.hpp"

namespace dichotomy {

RoughnessConstants predicted_constants(double k_const, double alpha, double delta) {
    require(k_const >= 1.0, ErrorCode::InvalidInput, "predicted_constants: K must be >= 1");
    require(alpha > 0.0, ErrorCode::InvalidInput, "predicted_constants: alpha must be > 0");
    require(delta >= 0.0, ErrorCode::InvalidInput, "predicted_constants: delta must be >= 0");

    RoughnessConstants c;
    c.delta = delta;
    const double em = std::exp(-alpha);
    c.rho_delta = k_const * (1.0 + em) / (1.0 - em) * delta;

    const double sh = std::sinh(alpha), ch = std::cosh(alpha);
    const double radicand = sh * sh - 2.0 * k_const * delta * sh;
    if (c.rho_delta >= 1.0 || radicand < 0.0) {
        c.admissible = false;
        return c;
    }
    c.admissible = true;
    c.beta = -std::log(ch - std::sqrt(radicand));
    c.gamma = c.beta + std::log(1.0 + 2.0 * k_const * std::exp(alpha) * delta * sh);
    c.d1 = 1.0 / (1.0 - k_const * delta / (1.0 - std::exp(-(alpha + c.beta))));
    c.d2 = 1.0 / (1.0 - k_const * delta * std::exp(alpha - c.gamma) /
                            (1.0 - std::exp(-(alpha + c.gamma))));
    c.L = k_const * (1.0 + k_const * delta / ((1.0 - c.rho_delta) * (1.0 - em))) *
          std::max(c.d1, c.d2);
    c.qp_bound = k_const * c.L * (1.0 + std::exp(-(alpha + c.beta))) /
                 (1.0 - std::exp(-(alpha + c.beta))) * delta;
    return c;
}

SequenceBoundResult sequence_bound(const GrowthBoundInput& input, BoundSide side) {
    require(input.d > 0.0 && input.alpha > 0.0 && input.delta >= 0.0, ErrorCode::InvalidInput,
            "sequence_bound: need D > 0, alpha > 0, delta >= 0");
    for (double m : input.mu)
        require(m >= 0.0, ErrorCode::InvalidInput, "sequence_bound: mu must be nonnegative");

    const double em = std::exp(-input.alpha);
    SequenceBoundResult res;
    res.sigma = input.delta * (1.0 + em) / (1.0 - em);
    require(res.sigma < 1.0, ErrorCode::SigmaTooLarge,
            "sequence_bound: sigma = " + std::to_string(res.sigma) + " >= 1");

    const double sh = std::sinh(input.alpha), ch = std::cosh(input.alpha);
    const double radicand = sh * sh - 2.0 * input.delta * sh;
    require(radicand >= 0.0, ErrorCode::SigmaTooLarge, "sequence_bound: negative radicand");
    const double beta = -std::log(ch - std::sqrt(radicand));

    if (side == BoundSide::Forward) {
        res.exponent = beta;
        res.coefficient =
            input.d / (1.0 - input.delta * em / (1.0 - std::exp(-(input.alpha + beta))));
    } else {
        const double gamma = beta + std::log(1.0 + 2.0 * input.delta * sh);
        res.exponent = gamma;
        res.coefficient = input.d / (1.0 - input.delta * std::exp(-gamma) /
                                               (1.0 - std::exp(-(input.alpha + gamma))));
    }

    // self-test on the supplied data (sums truncated to what is available)
    const long long n = static_cast<long long>(input.mu.size());
    for (long long i = 0; i < n; ++i) {
        // distance from the anchor: forward anchors at the front, backward at the back
        const long long dist = side == BoundSide::Forward ? i : (n - 1 - i);
        double rhs = input.d * std::exp(-input.alpha * static_cast<double>(dist));
        for (long long j = 0; j < n; ++j) {
            const double muj = input.mu[static_cast<size_t>(j)];
            if (j < i)
                rhs += input.delta * std::exp(-input.alpha * static_cast<double>(i - j - 1)) * muj;
            else
                rhs += input.delta * std::exp(-input.alpha * static_cast<double>(j + 1 - i)) * muj;
        }
        const double mui = input.mu[static_cast<size_t>(i)];
        if (mui > rhs * (1.0 + 1e-12)) res.hypothesis_ok = false;
        if (mui > res.coefficient * std::exp(-res.exponent * static_cast<double>(dist)) *
                      (1.0 + 1e-12))
            res.conclusion_ok = false;
    }
    return res;
}

Matrix GreensKernel::operator()(long long k, long long p) const {
    if (k > p) return transition(*cert_->seq, k, p).matrix * cert_->family.at(p);
    return -restricted_backward(*cert_->seq, cert_->family, k, p, tol_);
}

namespace {

// Applies the truncated contraction to columns: given u over the window,
// produce T(u) = Sfwd - Sbwd + F with the forward/backward recurrences.
struct TruncatedOperator {
    const WindowContext& ctx;
    const std::vector<Matrix>& b;  // B(k), k in [lo, hi-1]; empty matrices mean zero
    std::vector<Matrix> fconst;    // Ffwd(k) - Fbwd(k), k in [lo, hi]

    TruncatedOperator(const WindowContext& c, const std::vector<Matrix>& bmats,
                      const std::vector<Matrix>& f, int cols)
        : ctx(c), b(bmats) {
        const long long lo = ctx.lo(), hi = ctx.hi();
        const int n = ctx.dim();
        const size_t w = static_cast<size_t>(hi - lo + 1);
        fconst.assign(w, Matrix::Zero(n, cols));
        // Ffwd(k+1) = P(k+1)(A(k) Ffwd(k) + f(k)); the projection is an
        // identity on the true value and keeps noise off the unstable modes
        Matrix ffwd = Matrix::Zero(n, cols);
        for (long long k = lo; k < hi; ++k) {
            ffwd = ctx.coeff(k) * ffwd;
            const Matrix& fk = f[static_cast<size_t>(k - lo)];
            if (fk.size() > 0) ffwd += fk;
            ffwd = ctx.projection(k + 1) * ffwd;
            fconst[static_cast<size_t>(k + 1 - lo)] = ffwd;
        }
        // Fbwd(k) = D(k) (f(k) + Fbwd(k+1))
        Matrix fbwd = Matrix::Zero(n, cols);
        for (long long k = hi - 1; k >= lo; --k) {
            const Matrix& fk = f[static_cast<size_t>(k - lo)];
            if (fk.size() > 0)
                fbwd = ctx.backstep(k) * (fk + fbwd);
            else
                fbwd = ctx.backstep(k) * fbwd;
            fconst[static_cast<size_t>(k - lo)] -= fbwd;
        }
    }

    void apply(const std::vector<Matrix>& u, std::vector<Matrix>& out) const {
        const long long lo = ctx.lo(), hi = ctx.hi();
        const int n = ctx.dim();
        const int cols = static_cast<int>(fconst[0].cols());
        // Sfwd(k+1) = P(k+1) A(k) (Sfwd(k) + P(k) B(k) u(k))
        Matrix sfwd = Matrix::Zero(n, cols);
        out[0] = fconst[0];
        for (long long k = lo; k < hi; ++k) {
            const Matrix& bk = b[static_cast<size_t>(k - lo)];
            if (bk.size() > 0)
                sfwd = ctx.coeff(k) * (sfwd + ctx.projection(k) * (bk * u[static_cast<size_t>(k - lo)]));
            else
                sfwd = ctx.coeff(k) * sfwd;
            sfwd = ctx.projection(k + 1) * sfwd;
            out[static_cast<size_t>(k + 1 - lo)] = fconst[static_cast<size_t>(k + 1 - lo)] + sfwd;
        }
        // Sbwd(k) = (I-P(k)) B(k) u(k) + D(k) Sbwd(k+1)
        Matrix sbwd = Matrix::Zero(n, cols);
        for (long long k = hi - 1; k >= lo; --k) {
            const Matrix& bk = b[static_cast<size_t>(k - lo)];
            sbwd = ctx.backstep(k) * sbwd;
            if (bk.size() > 0)
                sbwd += ctx.complement_proj(k) * (bk * u[static_cast<size_t>(k - lo)]);
            out[static_cast<size_t>(k - lo)] -= sbwd;
        }
    }
};

double sup_norm(const std::vector<Matrix>& u) {
    double s = 0.0;
    for (const auto& m : u) s = std::max(s, m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0);
    return s;
}

struct CoreSolution {
    std::vector<Matrix> u;
    double sup = 0.0;
    double contraction = 0.0;
    int iterations = 0;
};

CoreSolution solve_core(const WindowContext& ctx, const std::vector<Matrix>& b,
                        const std::vector<Matrix>& f, int cols, double rho_delta,
                        const FixedPointOptions& opts) {
    require(rho_delta < 1.0, ErrorCode::NotAdmissible,
            "fixed point: rho*delta = " + std::to_string(rho_delta) + " >= 1");
    const size_t w = static_cast<size_t>(ctx.hi() - ctx.lo() + 1);
    TruncatedOperator t(ctx, b, f, cols);

    CoreSolution sol;
    sol.contraction = rho_delta;
    sol.u.assign(w, Matrix::Zero(ctx.dim(), cols));
    std::vector<Matrix> next(w, Matrix::Zero(ctx.dim(), cols));
    const double stop = (1.0 - rho_delta) * opts.tol_fixedpoint;
    for (int it = 0; it < opts.max_iterations; ++it) {
        t.apply(sol.u, next);
        double diff = 0.0;
        for (size_t i = 0; i < w; ++i) diff = std::max(diff, (next[i] - sol.u[i]).cwiseAbs().maxCoeff());
        sol.u.swap(next);
        sol.iterations = it + 1;
        if (diff < stop) {
            sol.sup = sup_norm(sol.u);
            return sol;
        }
    }
    throw DichotomyError(ErrorCode::NotAdmissible,
                         "fixed point failed to converge within the iteration budget");
}

double truncation_tail(const Form& fa, double sup, long long margin) {
    const double em = std::exp(-fa.alpha);
    return fa.L * std::exp(-fa.alpha * static_cast<double>(margin)) * sup / (1.0 - em);
}

}  // namespace

FixedPointSolution bounded_solution_fixed_point(const ForcingProblem& problem,
                                                const DichotomyCertificate& cert,
                                                const FixedPointOptions& opts,
                                                const ToleranceConfig& tol) {
    require(problem.window_lo < problem.window_hi, ErrorCode::InvalidInput,
            "bounded_solution_fixed_point: empty window");
    require(problem.report_lo >= problem.window_lo && problem.report_hi <= problem.window_hi &&
                problem.report_lo <= problem.report_hi,
            ErrorCode::InvalidInput,
            "bounded_solution_fixed_point: report region must sit inside the window");
    const long long lo = problem.window_lo, hi = problem.window_hi;

    WindowContext ctx(*cert.seq, cert.family, lo, hi, tol);
    std::vector<Matrix> b(static_cast<size_t>(hi - lo), Matrix());
    std::vector<Matrix> f(static_cast<size_t>(hi - lo), Matrix());
    double delta = 0.0;
    for (const auto& [k, m] : problem.b) {
        if (k < lo || k >= hi) continue;
        b[static_cast<size_t>(k - lo)] = m;
        delta = std::max(delta, spectral_norm(m));
    }
    for (const auto& [k, v] : problem.f) {
        if (k < lo || k >= hi) continue;
        f[static_cast<size_t>(k - lo)] = v;
    }

    const Form fa = cert.form.as_formA();
    const RoughnessConstants pred = predicted_constants(fa.L, fa.alpha, delta);
    require(pred.admissible, ErrorCode::NotAdmissible,
            "bounded_solution_fixed_point: rho*delta >= 1");

    CoreSolution core = solve_core(ctx, b, f, 1, pred.rho_delta, opts);

    const long long margin = std::min(problem.report_lo - lo, hi - problem.report_hi);
    const double tail = truncation_tail(fa, core.sup, margin);
    char tailbuf[32];
    std::snprintf(tailbuf, sizeof tailbuf, "%.3e", tail);
    require(tail < tol.tol_residual, ErrorCode::WindowTooSmall,
            std::string("bounded_solution_fixed_point: truncation tail ") + tailbuf +
                " exceeds tol_residual; widen the window");

    FixedPointSolution out;
    out.sup_norm = core.sup;
    out.contraction = core.contraction;
    out.iterations = core.iterations;
    out.truncation_bound = tail / (1.0 - pred.rho_delta);
    for (long long k = lo; k <= hi; ++k) out.u[k] = core.u[static_cast<size_t>(k - lo)].col(0);
    return out;
}

namespace {

// One impulse solve: f(a-1) = I/K, all basis columns at once. The solution
// carries both perturbed dichotomy quantities:
//   k >= a:   u(k) = K^{-1} Psi(k,a) Q(a)
//   k <= a-1: u(k) = -K^{-1} Psi(k,a) (I - Q(a))
struct AnchorSolve {
    Matrix q;               // Q(a) = K u(a)
    std::vector<Matrix> u;  // full window solution, n x n per index
};

AnchorSolve impulse_solve(const WindowContext& ctx, const std::vector<Matrix>& bmats,
                          const Form& fa, double rho_delta, long long a,
                          const FixedPointOptions& opts, const ToleranceConfig& tol) {
    require(ctx.lo() < a && a <= ctx.hi(), ErrorCode::InvalidInput,
            "impulse_solve: window must contain a-1 and a");
    const int n = ctx.dim();
    std::vector<Matrix> f(static_cast<size_t>(ctx.hi() - ctx.lo()), Matrix());
    f[static_cast<size_t>(a - 1 - ctx.lo())] = Matrix::Identity(n, n) / fa.L;

    CoreSolution core = solve_core(ctx, bmats, f, n, rho_delta, opts);

    const long long margin = std::min(a - ctx.lo(), ctx.hi() - a);
    const double tail = truncation_tail(fa, core.sup, margin);
    char tailbuf[32];
    std::snprintf(tailbuf, sizeof tailbuf, "%.3e", tail);
    require(tail < tol.tol_residual, ErrorCode::WindowTooSmall,
            std::string("impulse solve: truncation tail ") + tailbuf +
                " exceeds tol_residual; widen the window");

    AnchorSolve out;
    out.q = fa.L * core.u[static_cast<size_t>(a - ctx.lo())];
    out.u = std::move(core.u);
    return out;
}

std::vector<Matrix> collect_b(const WindowContext& ctx, const std::map<long long, Matrix>& b,
                              double* delta_out) {
    std::vector<Matrix> bmats(static_cast<size_t>(ctx.hi() - ctx.lo()), Matrix());
    double delta = 0.0;
    for (const auto& [k, m] : b) {
        if (k < ctx.lo() || k >= ctx.hi()) continue;
        bmats[static_cast<size_t>(k - ctx.lo())] = m;
        delta = std::max(delta, spectral_norm(m));
    }
    if (delta_out) *delta_out = delta;
    return bmats;
}

}  // namespace

Matrix perturbed_projection(const DichotomyCertificate& cert, const std::map<long long, Matrix>& b,
                            long long m, long long window_lo, long long window_hi,
                            const FixedPointOptions& opts, const ToleranceConfig& tol) {
    WindowContext ctx(*cert.seq, cert.family, window_lo, window_hi, tol);
    double delta = 0.0;
    std::vector<Matrix> bmats = collect_b(ctx, b, &delta);
    const Form fa = cert.form.as_formA();
    const RoughnessConstants pred = predicted_constants(fa.L, fa.alpha, delta);
    require(pred.admissible, ErrorCode::NotAdmissible, "perturbed_projection: rho*delta >= 1");

    Matrix q = impulse_solve(ctx, bmats, fa, pred.rho_delta, m, opts, tol).q;
    require(spectral_norm(q * q - q) <= 1e-6 * std::max(1.0, spectral_norm(q)),
            ErrorCode::WindowTooSmall,
            "perturbed_projection: assembled Q(m) is far from idempotent");
    return q;
}

std::map<long long, Matrix> perturbed_family(const DichotomyCertificate& cert,
                                             const std::map<long long, Matrix>& b, long long lo,
                                             long long hi, long long window_lo,
                                             long long window_hi, ExecutionMode mode,
                                             const FixedPointOptions& opts,
                                             const ToleranceConfig& tol) {
    require(lo <= hi, ErrorCode::InvalidInput, "perturbed_family: need lo <= hi");
    WindowContext ctx(*cert.seq, cert.family, window_lo, window_hi, tol);
    double delta = 0.0;
    std::vector<Matrix> bmats = collect_b(ctx, b, &delta);
    const Form fa = cert.form.as_formA();
    const RoughnessConstants pred = predicted_constants(fa.L, fa.alpha, delta);
    require(pred.admissible, ErrorCode::NotAdmissible, "perturbed_family: rho*delta >= 1");

    std::vector<Matrix> slots(static_cast<size_t>(hi - lo + 1));
    std::exception_ptr error;
    for_each_index(hi - lo + 1, mode, [&](long long i) {
        try {
            slots[static_cast<size_t>(i)] =
                impulse_solve(ctx, bmats, fa, pred.rho_delta, lo + i, opts, tol).q;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);
    std::map<long long, Matrix> out;
    for (long long k = lo; k <= hi; ++k) out[k] = std::move(slots[static_cast<size_t>(k - lo)]);
    return out;
}

ImpulseProfile perturbed_impulse_profile(const DichotomyCertificate& cert,
                                         const std::map<long long, Matrix>& b, long long anchor,
                                         long long window_lo, long long window_hi,
                                         const FixedPointOptions& opts,
                                         const ToleranceConfig& tol) {
    WindowContext ctx(*cert.seq, cert.family, window_lo, window_hi, tol);
    double delta = 0.0;
    std::vector<Matrix> bmats = collect_b(ctx, b, &delta);
    const Form fa = cert.form.as_formA();
    const RoughnessConstants pred = predicted_constants(fa.L, fa.alpha, delta);
    require(pred.admissible, ErrorCode::NotAdmissible,
            "perturbed_impulse_profile: rho*delta >= 1");

    AnchorSolve solve = impulse_solve(ctx, bmats, fa, pred.rho_delta, anchor, opts, tol);
    ImpulseProfile out;
    out.q = std::move(solve.q);
    for (long long k = window_lo; k <= window_hi; ++k) {
        const double v = fa.L * spectral_norm(solve.u[static_cast<size_t>(k - window_lo)]);
        if (k >= anchor)
            out.forward_norms[k] = v;
        else
            out.backward_norms[k] = v;
    }
    return out;
}

std::map<long long, Vector> apply_perturbation_operator(const ForcingProblem& problem,
                                                        const DichotomyCertificate& cert,
                                                        const std::map<long long, Vector>& u,
                                                        const ToleranceConfig& tol) {
    const long long lo = problem.window_lo, hi = problem.window_hi;
    WindowContext ctx(*cert.seq, cert.family, lo, hi, tol);
    std::vector<Matrix> b(static_cast<size_t>(hi - lo), Matrix());
    std::vector<Matrix> f(static_cast<size_t>(hi - lo), Matrix());
    for (const auto& [k, m] : problem.b)
        if (k >= lo && k < hi) b[static_cast<size_t>(k - lo)] = m;
    for (const auto& [k, v] : problem.f)
        if (k >= lo && k < hi) f[static_cast<size_t>(k - lo)] = v;
    TruncatedOperator t(ctx, b, f, 1);
    std::vector<Matrix> uin(static_cast<size_t>(hi - lo + 1), Matrix::Zero(ctx.dim(), 1));
    for (const auto& [k, v] : u)
        if (k >= lo && k <= hi) uin[static_cast<size_t>(k - lo)] = v;
    std::vector<Matrix> uout(uin.size(), Matrix::Zero(ctx.dim(), 1));
    t.apply(uin, uout);
    std::map<long long, Vector> out;
    for (long long k = lo; k <= hi; ++k) out[k] = uout[static_cast<size_t>(k - lo)].col(0);
    return out;
}

SequencePtr perturbed_sequence(const SequencePtr& seq, const std::map<long long, Matrix>& b) {
    const int n = seq->dim();
    std::map<long long, Matrix> window = seq->window();
    const Matrix id = Matrix::Identity(n, n);
    for (const auto& [k, mat] : b) {
        require(mat.rows() == n && mat.cols() == n, ErrorCode::DimensionMismatch,
                "perturbed_sequence: B(k) has the wrong shape");
        window[k] = seq->at(k) * (id + mat);
    }
    return std::make_shared<CoefficientSequence>(n, seq->interval(), std::move(window),
                                                 seq->left_tail(), seq->right_tail());
}

RoughnessReport verify_roughness(const DichotomyCertificate& cert,
                                 const std::map<long long, Matrix>& b, long long report_lo,
                                 long long report_hi, ExecutionMode mode,
                                 const FixedPointOptions& opts, const ToleranceConfig& tol) {
    require(report_lo < report_hi, ErrorCode::InvalidInput,
            "verify_roughness: empty report region");

    // half-line and finite-interval certificates are embedded into Z first,
    // with B = 0 off the original interval
    DichotomyCertificate base = cert;
    if (cert.family.interval().kind != Interval::Kind::Whole)
        base = embed_in_Z(cert, tol).certificate;

    const Form fa = base.form.as_formA();
    double delta = 0.0;
    for (const auto& [k, mat] : b) delta = std::max(delta, spectral_norm(mat));

    RoughnessReport rep;
    rep.report_lo = report_lo;
    rep.report_hi = report_hi;
    rep.predicted = predicted_constants(fa.L, fa.alpha, delta);
    require(rep.predicted.admissible, ErrorCode::NotAdmissible,
            "verify_roughness: rho*delta >= 1");

    // computation window: the full perturbation support plus a decay margin
    const double denom = (1.0 - std::exp(-fa.alpha)) * (1.0 - rep.predicted.rho_delta);
    const long long pad =
        2 + static_cast<long long>(std::ceil(
                std::log(std::max(2.0, 2.0 * fa.L / (denom * tol.tol_residual))) / fa.alpha));
    long long window_lo = report_lo - pad, window_hi = report_hi + pad;
    if (!b.empty()) {
        window_lo = std::min(window_lo, b.begin()->first);
        window_hi = std::max(window_hi, b.rbegin()->first + 1);
    }

    WindowContext ctx(*base.seq, base.family, window_lo, window_hi, tol);
    std::vector<Matrix> bmats = collect_b(ctx, b, nullptr);

    // one impulse solve per report anchor; the solutions carry the perturbed
    // dichotomy quantities stably (no long forward products)
    const long long rcount = report_hi - report_lo + 1;
    std::vector<AnchorSolve> solves(static_cast<size_t>(rcount));
    std::exception_ptr error;
    for_each_index(rcount, mode, [&](long long i) {
        try {
            solves[static_cast<size_t>(i)] =
                impulse_solve(ctx, bmats, fa, rep.predicted.rho_delta, report_lo + i, opts, tol);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);

    // rank preservation and distance to the unperturbed projections
    rep.rank_preserved = true;
    rep.max_qp_distance = 0.0;
    for (long long k = report_lo; k <= report_hi; ++k) {
        const Matrix& q = solves[static_cast<size_t>(k - report_lo)].q;
        if (projection_rank(q) != base.rank()) rep.rank_preserved = false;
        rep.max_qp_distance =
            std::max(rep.max_qp_distance, spectral_norm(q - base.family.at(k)));
    }
    rep.qp_margin = rep.predicted.qp_bound - rep.max_qp_distance;

    // invariance of Q under the perturbed coefficients
    SequencePtr pseq = perturbed_sequence(base.seq, b);
    rep.max_invariance_residual = 0.0;
    for (long long k = report_lo; k < report_hi; ++k) {
        const Matrix& ak = pseq->at(k);
        const Matrix& qk = solves[static_cast<size_t>(k - report_lo)].q;
        const Matrix& qk1 = solves[static_cast<size_t>(k + 1 - report_lo)].q;
        rep.max_invariance_residual =
            std::max(rep.max_invariance_residual, spectral_norm(ak * qk - qk1 * ak));
    }

    // dichotomy margins with the predicted (L, beta), read off the impulse
    // solutions: for anchor a, K|u_a(k)| = |Psi(k,a)Q(a)| when k >= a and
    // |Psi(k,a)(I-Q(a))| when k < a
    VerifyReport& vr = rep.perturbed_verify;
    vr.form = Form::formA(std::max(1.0, rep.predicted.L), rep.predicted.beta);
    vr.window_lo = report_lo;
    vr.window_hi = report_hi;
    vr.margin_slack = tol.tol_margin * vr.form.L;
    vr.worst_margin = std::numeric_limits<double>::infinity();
    double l_meas = 0.0;
    for (long long a = report_lo; a <= report_hi; ++a) {
        const AnchorSolve& sa = solves[static_cast<size_t>(a - report_lo)];
        for (long long k = report_lo; k <= report_hi; ++k) {
            const double value = fa.L * spectral_norm(sa.u[static_cast<size_t>(k - window_lo)]);
            const long long sep = k >= a ? k - a : a - k;
            const double bound = vr.form.L * std::exp(-vr.form.alpha * static_cast<double>(sep));
            const double margin = bound - value;
            l_meas = std::max(l_meas, value * std::exp(vr.form.alpha * static_cast<double>(sep)));
            ++vr.pairs_checked;
            const long long pm = std::min(a, k), pk = std::max(a, k);
            const char* kind = k >= a ? "forward" : "backward";
            if (margin < vr.worst_margin ||
                (margin == vr.worst_margin &&
                 (pk - pm < vr.worst.k - vr.worst.m ||
                  (pk - pm == vr.worst.k - vr.worst.m && pm < vr.worst.m)))) {
                vr.worst_margin = margin;
                vr.worst = {pm, pk, margin, kind};
            }
        }
    }
    vr.pass = vr.worst_margin >= -vr.margin_slack;
    rep.measured_l_at_beta = l_meas;

    rep.pass = rep.rank_preserved &&
               rep.qp_margin >= -tol.tol_margin * std::max(1.0, rep.predicted.qp_bound) &&
               rep.perturbed_verify.pass && rep.max_invariance_residual <= 1e-8;
    return rep;
}

OdeConstants ode_constants(double k_const, double alpha, double delta) {
    require(k_const >= 1.0 && alpha > 0.0 && delta >= 0.0, ErrorCode::InvalidInput,
            "ode_constants: need K >= 1, alpha > 0, delta >= 0");
    OdeConstants c;
    const double q = 2.0 * k_const * delta / alpha;
    if (q >= 1.0) {
        c.admissible = false;
        return c;
    }
    c.admissible = true;
    const double root = std::sqrt(1.0 - q);
    c.beta = alpha * root;
    c.l = 2.0 * k_const * (1.0 + k_const * delta / ((1.0 - q) * alpha)) / (1.0 + root);
    c.qp_bound = 2.0 * k_const * c.l * delta / (alpha + c.beta);
    return c;
}

}  // namespace dichotomy
