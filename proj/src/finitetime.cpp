#include "dichotomy/finitetime.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace dichotomy {

void FiniteTimeHypothesis::validate() const {
    require(window_n >= 1, ErrorCode::InvalidInput, "FiniteTimeHypothesis: N must be >= 1");
    require(density_gap >= 1, ErrorCode::InvalidInput, "FiniteTimeHypothesis: ell must be >= 1");
    require(!base_points.empty(), ErrorCode::InvalidInput,
            "FiniteTimeHypothesis: no base points given");
    require(k_const >= 1.0 && coeff_bound > 0.0, ErrorCode::InvalidInput,
            "FiniteTimeHypothesis: need K >= 1 and M > 0");
    require(alpha > beta_bar && beta_bar > 0.0, ErrorCode::InvalidInput,
            "FiniteTimeHypothesis: need alpha > beta_bar > 0");
    require(kbar > 4.0 * std::pow(k_const, 8.0), ErrorCode::InvalidInput,
            "FiniteTimeHypothesis: need Kbar > 4 K^8");
}

AnchoredFamily estimate_window_family(const CoefficientSequence& seq, long long lo, long long hi,
                                      double tol_slope, const ToleranceConfig& tol) {
    require(lo < hi, ErrorCode::InvalidInput, "estimate_window_family: need lo < hi");
    const int n = seq.dim();
    const double len = static_cast<double>(hi - lo);

    Matrix phi = transition(seq, hi, lo).matrix;
    Eigen::JacobiSVD<Matrix> svd(phi, Eigen::ComputeFullU | Eigen::ComputeFullV);

    AnchoredFamily out;
    out.slopes.resize(static_cast<size_t>(n));
    int unstable = 0, stable = 0;
    for (int i = 0; i < n; ++i) {
        const double sv = svd.singularValues()(i);
        const double slope = sv > 0.0 ? std::log(sv) / len : -700.0;
        out.slopes[static_cast<size_t>(i)] = slope;
        if (slope > tol_slope)
            ++unstable;
        else if (slope < -tol_slope)
            ++stable;
        else
            throw DichotomyError(ErrorCode::NoGap,
                                 "estimate_window_family: singular-value slope " +
                                     std::to_string(slope) + " cannot be classified");
    }
    out.rank = stable;

    // nullspaces: forward images of the unstable right-singular directions
    // ranges: stepwise preimages of the most-contracted left directions
    Matrix unstable_cols = svd.matrixV().leftCols(unstable);
    Matrix s_end = svd.matrixU().rightCols(stable);

    std::vector<Subspace> ranges(static_cast<size_t>(hi - lo + 1));
    ranges.back() = Subspace::span_of(s_end, tol);
    for (long long k = hi - 1; k >= lo; --k) {
        ranges[static_cast<size_t>(k - lo)] =
            preimage(seq.at(k), ranges[static_cast<size_t>(k + 1 - lo)], tol);
        require(ranges[static_cast<size_t>(k - lo)].dim() == stable, ErrorCode::NoGap,
                "estimate_window_family: range preimage dimension drifted at k=" +
                    std::to_string(k));
    }

    std::map<long long, Matrix> window;
    Matrix nk = unstable_cols;
    for (long long k = lo; k <= hi; ++k) {
        Subspace null_k =
            nk.cols() > 0 ? Subspace(orthonormalize_columns(nk, tol), tol) : Subspace::zero(n);
        window[k] = make_projection(ranges[static_cast<size_t>(k - lo)], null_k, tol);
        if (k < hi) nk = seq.at(k) * nk;
    }
    out.family = ProjectionFamily(Interval::finite(lo, hi), std::move(window));
    return out;
}

FiniteTimeReport finite_time_check(const SequencePtr& seq, const FiniteTimeHypothesis& hyp,
                                   long long scan_lo, long long scan_hi, ExecutionMode mode,
                                   const ToleranceConfig& tol) {
    hyp.validate();
    require(scan_lo < scan_hi, ErrorCode::InvalidInput, "finite_time_check: empty scan range");
    FiniteTimeReport rep;

    // stage 1: coefficient norm bound
    rep.max_coeff_norm = 0.0;
    for (long long k = scan_lo; k < scan_hi; ++k)
        rep.max_coeff_norm = std::max(rep.max_coeff_norm, spectral_norm(seq->at(k)));
    rep.coeff_bound_ok = rep.max_coeff_norm <= hyp.coeff_bound * (1.0 + 1e-12);

    // stage 2: relative density with gap ell over the scan range
    std::vector<long long> bases = hyp.base_points;
    std::sort(bases.begin(), bases.end());
    bases.erase(std::remove_if(bases.begin(), bases.end(),
                               [&](long long a) {
                                   return a < scan_lo || a + hyp.window_n > scan_hi;
                               }),
                bases.end());
    if (bases.empty()) {
        rep.density_ok = false;
        rep.max_gap = scan_hi - scan_lo;
    } else {
        rep.max_gap = std::max(bases.front() - scan_lo,
                               (scan_hi - hyp.window_n) - bases.back());
        for (size_t i = 0; i + 1 < bases.size(); ++i)
            rep.max_gap = std::max(rep.max_gap, bases[i + 1] - bases[i]);
        rep.density_ok = rep.max_gap <= hyp.density_gap;
    }

    // stage 3: per-base-point window certificates with (K, alpha)
    struct WindowOutcome {
        bool ok = false;
        int rank = -1;
        double margin = 0.0;
        bool nogap = false;
    };
    std::vector<WindowOutcome> outcomes(bases.size());
    for_each_index(static_cast<long long>(bases.size()), mode, [&](long long i) {
        const long long a = bases[static_cast<size_t>(i)];
        WindowOutcome& o = outcomes[static_cast<size_t>(i)];
        try {
            AnchoredFamily af = estimate_window_family(*seq, a, a + hyp.window_n, 1e-3, tol);
            DichotomyCertificate cert{seq, af.family, Form::formA(hyp.k_const, hyp.alpha),
                                      Interval::finite(a, a + hyp.window_n), {}};
            VerifyReport vr = verify_certificate(cert, a, a + hyp.window_n, tol, ExecutionMode::Serial);
            o.ok = vr.pass;
            o.rank = af.rank;
            o.margin = vr.worst_margin;
        } catch (const DichotomyError&) {
            o.nogap = true;
        }
    });
    rep.windows_ok = !bases.empty();
    rep.ranks_consistent = true;
    rep.worst_window_margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        if (o.nogap || !o.ok) rep.windows_ok = false;
        if (!o.nogap) {
            if (rep.rank == -1) rep.rank = o.rank;
            if (o.rank != rep.rank) rep.ranks_consistent = false;
        }
        const double margin = o.nogap ? -std::numeric_limits<double>::infinity() : o.margin;
        if (margin < rep.worst_window_margin) {
            rep.worst_window_margin = margin;
            rep.worst_base = bases[i];
        }
    }
    rep.windows_ok = rep.windows_ok && rep.ranks_consistent;

    // stage 4: empirical whole-range certificate with (Kbar, beta_bar)
    try {
        AnchoredFamily af = estimate_window_family(*seq, scan_lo, scan_hi, 1e-3, tol);
        DichotomyCertificate cert{seq, af.family, Form::formA(hyp.kbar, hyp.beta_bar),
                                  Interval::finite(scan_lo, scan_hi), {}};
        VerifyReport vr = verify_certificate(cert, scan_lo, scan_hi, tol, mode);
        rep.global_ok = vr.pass && (rep.rank == -1 || af.rank == rep.rank);
        rep.global_margin = vr.worst_margin;
    } catch (const DichotomyError&) {
        rep.global_ok = false;
        rep.global_margin = -std::numeric_limits<double>::infinity();
    }

    rep.hypotheses_pass = rep.coeff_bound_ok && rep.density_ok && rep.windows_ok;
    rep.pass = rep.hypotheses_pass && rep.global_ok;
    return rep;
}

}  // namespace dichotomy
