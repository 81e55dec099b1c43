#include "dichotomy/verify.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

namespace dichotomy {

InvarianceReport check_invariance(const CoefficientSequence& seq, const ProjectionFamily& family,
                                  long long lo, long long hi, const ToleranceConfig& tol) {
    InvarianceReport rep;
    rep.worst_k = lo;
    for (long long k = lo; k < hi; ++k) {
        const double res = spectral_norm(seq.at(k) * family.at(k) - family.at(k + 1) * seq.at(k));
        if (res > rep.max_residual) {
            rep.max_residual = res;
            rep.worst_k = k;
        }
    }
    rep.pass = rep.max_residual < tol.tol_residual;
    return rep;
}

namespace {

double sigma_min(const Matrix& m) {
    if (m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// Per-anchor rows of measured pair quantities over a window. Row i holds
// separations s = 0 .. (hi - lo - i) for anchor m = lo + i.
struct SweepRows {
    std::vector<std::vector<double>> fwd;    // |Phi(k,m) P(m)|
    std::vector<std::vector<double>> bwd;    // |Phi(m,k) (I-P(k))|
    std::vector<std::vector<double>> smax;   // sigma_max(Phi(k,m) Rm), Form B
    std::vector<std::vector<double>> smin;   // sigma_min(Phi(k,m) Nm), Form B
};

SweepRows sweep_pairs(const WindowContext& ctx, bool form_b, ExecutionMode mode) {
    const long long lo = ctx.lo(), hi = ctx.hi();
    const long long w = hi - lo + 1;
    SweepRows rows;
    rows.fwd.resize(static_cast<size_t>(w));
    rows.bwd.resize(static_cast<size_t>(w));
    if (form_b) {
        rows.smax.resize(static_cast<size_t>(w));
        rows.smin.resize(static_cast<size_t>(w));
    }
    for_each_index(w, mode, [&](long long i) {
        const long long m = lo + i;
        const long long len = hi - m + 1;
        auto& fwd = rows.fwd[static_cast<size_t>(i)];
        auto& bwd = rows.bwd[static_cast<size_t>(i)];
        fwd.resize(static_cast<size_t>(len));
        bwd.resize(static_cast<size_t>(len));
        Matrix f = ctx.projection(m);          // Phi(k,m) P(m)
        Matrix xi = ctx.complement_proj(m);    // Phi(m,k) (I - P(k))
        Matrix y, z;
        std::vector<double>* smax = nullptr;
        std::vector<double>* smin = nullptr;
        if (form_b) {
            smax = &rows.smax[static_cast<size_t>(i)];
            smin = &rows.smin[static_cast<size_t>(i)];
            smax->resize(static_cast<size_t>(len));
            smin->resize(static_cast<size_t>(len));
            y = ctx.range_basis(m);  // Phi(k,m) Rm
            z = ctx.null_basis(m);   // Phi(k,m) Nm
        }
        for (long long s = 0; s < len; ++s) {
            const long long k = m + s;
            fwd[static_cast<size_t>(s)] = spectral_norm(f);
            bwd[static_cast<size_t>(s)] = spectral_norm(xi);
            if (form_b) {
                (*smax)[static_cast<size_t>(s)] = spectral_norm(y);
                (*smin)[static_cast<size_t>(s)] = sigma_min(z);
            }
            if (k < hi) {
                // invariance makes the re-projections identities; numerically
                // they stop rounding noise from riding the unstable modes
                f = ctx.projection(k + 1) * (ctx.coeff(k) * f);
                xi = xi * ctx.backstep(k);
                if (form_b) {
                    y = ctx.projection(k + 1) * (ctx.coeff(k) * y);
                    z = ctx.complement_proj(k + 1) * (ctx.coeff(k) * z);
                }
                if (!f.allFinite() || !xi.allFinite())
                    throw DichotomyError(ErrorCode::OverflowDetected,
                                         "pair sweep: product overflow");
            }
        }
    });
    return rows;
}

struct WitnessAcc {
    double margin = std::numeric_limits<double>::infinity();
    long long m = 0, k = 0;
    int ineq = 0;  // 0 forward, 1 backward, 2 projection-bound, 3 growth
    void offer(double mg, long long mm, long long kk, int iq) {
        const long long sep = k - m, nsep = kk - mm;
        if (mg < margin || (mg == margin && (nsep < sep || (nsep == sep && (mm < m || (mm == m && iq < ineq)))))) {
            margin = mg;
            m = mm;
            k = kk;
            ineq = iq;
        }
    }
};

const char* ineq_name(int ineq) {
    switch (ineq) {
        case 0: return "forward";
        case 1: return "backward";
        case 2: return "projection-bound";
        case 3: return "growth";
    }
    return "?";
}

}  // namespace

VerifyReport verify_certificate(const DichotomyCertificate& cert, long long lo, long long hi,
                                const ToleranceConfig& tol, ExecutionMode mode) {
    require(lo <= hi, ErrorCode::InvalidInput, "verify_certificate: need lo <= hi");
    const auto inv = cert.family.validate(*cert.seq, lo, hi, tol);
    require(inv.pass, ErrorCode::InvalidInput,
            "verify_certificate: projection family invalid on the window (invariance residual " +
                std::to_string(inv.max_invariance_residual) + " at k=" +
                std::to_string(inv.worst_invariance_k) + ")");

    WindowContext ctx(*cert.seq, cert.family, lo, hi, tol);
    const bool form_b = cert.form.kind == Form::Kind::B;
    const SweepRows rows = sweep_pairs(ctx, form_b, mode);

    const double alpha = cert.form.alpha;
    const int n = ctx.dim(), r = ctx.rank();
    WitnessAcc acc;
    long long pairs = 0;
    for (long long i = 0; i <= hi - lo; ++i) {
        const long long m = lo + i;
        const auto& fwd = rows.fwd[static_cast<size_t>(i)];
        const auto& bwd = rows.bwd[static_cast<size_t>(i)];
        for (size_t s = 0; s < fwd.size(); ++s) {
            const long long k = m + static_cast<long long>(s);
            const double decay = std::exp(-alpha * static_cast<double>(s));
            ++pairs;
            if (!form_b) {
                acc.offer(cert.form.L * decay - fwd[s], m, k, 0);
                acc.offer(cert.form.L * decay - bwd[s], m, k, 1);
            } else {
                if (r > 0) acc.offer(cert.form.K * decay - rows.smax[static_cast<size_t>(i)][s], m, k, 0);
                if (r < n)
                    acc.offer(rows.smin[static_cast<size_t>(i)][s] - decay / cert.form.K, m, k, 3);
            }
        }
        if (form_b) {
            const double pn = spectral_norm(ctx.projection(m));
            const double qn = spectral_norm(ctx.complement_proj(m));
            acc.offer(cert.form.M - std::max(pn, qn), m, m, 2);
        }
    }

    VerifyReport rep;
    rep.form = cert.form;
    rep.window_lo = lo;
    rep.window_hi = hi;
    rep.pairs_checked = pairs;
    rep.worst_margin = acc.margin;
    rep.worst = {acc.m, acc.k, acc.margin, ineq_name(acc.ineq)};
    const double cscale = std::max(1.0, form_b ? std::max(cert.form.K, cert.form.M) : cert.form.L);
    rep.margin_slack = tol.tol_margin * cscale;
    rep.pass = acc.margin >= -rep.margin_slack;
    return rep;
}

EstimateResult estimate_constants(const SequencePtr& seq, const ProjectionFamily& family,
                                  long long lo, long long hi, const EstimateOptions& opts,
                                  const ToleranceConfig& tol) {
    require(lo < hi, ErrorCode::InvalidInput, "estimate_constants: need a window of length >= 2");
    const auto inv = family.validate(*seq, lo, hi, tol);
    require(inv.pass, ErrorCode::InvalidInput,
            "estimate_constants: family invalid on the window (invariance residual " +
                std::to_string(inv.max_invariance_residual) + ")");

    WindowContext ctx(*seq, family, lo, hi, tol);
    const SweepRows rows = sweep_pairs(ctx, false, opts.mode);
    const long long w = hi - lo + 1;
    const int n = ctx.dim(), r = ctx.rank();

    // collapse rows: envelope over anchors per separation, each side
    std::vector<double> env_f(static_cast<size_t>(w), 0.0), env_b(static_cast<size_t>(w), 0.0);
    for (long long i = 0; i < w; ++i)
        for (size_t s = 0; s < rows.fwd[static_cast<size_t>(i)].size(); ++s) {
            env_f[s] = std::max(env_f[s], rows.fwd[static_cast<size_t>(i)][s]);
            env_b[s] = std::max(env_b[s], rows.bwd[static_cast<size_t>(i)][s]);
        }

    // decay sanity: the certificate asserts net contraction of both parts;
    // refuse to fit when the window shows none
    const size_t smax = static_cast<size_t>(w - 1);
    if (r > 0 && !(env_f[smax] < env_f[0]))
        throw DichotomyError(ErrorCode::NoDecay,
                             "estimate_constants: no net forward contraction across the window");
    if (r < n && !(env_b[smax] < env_b[0]))
        throw DichotomyError(ErrorCode::NoDecay,
                             "estimate_constants: no net backward contraction across the window");

    auto l_of_alpha = [&](double alpha, double* lf = nullptr, double* lb = nullptr) {
        double mf = 0.0, mb = 0.0;
        for (size_t s = 0; s <= smax; ++s) {
            const double grow = std::exp(alpha * static_cast<double>(s));
            mf = std::max(mf, env_f[s] * grow);
            mb = std::max(mb, env_b[s] * grow);
        }
        if (lf) *lf = mf;
        if (lb) *lb = mb;
        return std::max(mf, mb);
    };

    double alpha;
    if (opts.alpha) {
        alpha = *opts.alpha;
        require(alpha > 0.0, ErrorCode::InvalidInput, "estimate_constants: alpha must be > 0");
    } else {
        require(l_of_alpha(1e-12) <= opts.l_cap, ErrorCode::NoDecay,
                "estimate_constants: L exceeds the cap even as alpha -> 0");
        double feas = 1e-12, infeas = 1.0;
        while (l_of_alpha(infeas) <= opts.l_cap) {
            feas = infeas;
            infeas *= 2.0;
            if (infeas > 512.0) break;  // absurdly steep; accept
        }
        for (int it = 0; it < 200 && infeas - feas > 1e-12 * std::max(1.0, feas); ++it) {
            const double mid = 0.5 * (feas + infeas);
            (l_of_alpha(mid) <= opts.l_cap ? feas : infeas) = mid;
        }
        alpha = feas;
    }

    double lf = 0.0, lb = 0.0;
    const double l = std::max(1.0, l_of_alpha(alpha, &lf, &lb));
    return EstimateResult{
        DichotomyCertificate{seq, family, Form::formA(l, alpha), Interval::finite(lo, hi), {}},
        lf, lb};
}

}  // namespace dichotomy
