#include "dichotomy/certificate.hpp"

#include <cmath>

#include "dichotomy/linalg.hpp"

namespace dichotomy {

// ---- ProjectionFamily ----

ProjectionFamily::ProjectionFamily(Interval interval, std::map<long long, Matrix> window,
                                   std::optional<Matrix> left_tail,
                                   std::optional<Matrix> right_tail)
    : interval_(interval),
      window_(std::move(window)),
      left_tail_(std::move(left_tail)),
      right_tail_(std::move(right_tail)) {
    const Matrix* first = nullptr;
    if (!window_.empty()) first = &window_.begin()->second;
    else if (left_tail_) first = &*left_tail_;
    else if (right_tail_) first = &*right_tail_;
    require(first != nullptr, ErrorCode::InvalidInput, "ProjectionFamily: no projections given");
    n_ = static_cast<int>(first->rows());
    rank_ = projection_rank(*first);
    auto check = [&](const Matrix& p) {
        require(p.rows() == n_ && p.cols() == n_, ErrorCode::DimensionMismatch,
                "ProjectionFamily: inconsistent dimensions");
        require_finite(p, "ProjectionFamily");
    };
    for (const auto& [k, p] : window_) {
        check(p);
        require(interval_.contains(k), ErrorCode::IndexOutsideInterval,
                "ProjectionFamily: window index outside the interval");
    }
    if (left_tail_) check(*left_tail_);
    if (right_tail_) check(*right_tail_);
    if (!window_.empty()) {
        window_lo_ = window_.begin()->first;
        window_hi_ = window_.rbegin()->first;
    }
}

ProjectionFamily ProjectionFamily::constant(Interval interval, const Matrix& p) {
    std::optional<Matrix> left, right;
    if (!interval.bounded_below()) left = p;
    if (!interval.bounded_above()) right = p;
    std::map<long long, Matrix> window;
    if (interval.bounded_below() || interval.bounded_above()) {
        if (interval.kind == Interval::Kind::Finite) {
            for (long long k = interval.a; k <= interval.b; ++k) window[k] = p;
        } else if (interval.kind == Interval::Kind::HalfPlus) {
            window[interval.a] = p;
            right = p;
        } else if (interval.kind == Interval::Kind::HalfMinus) {
            window[interval.b] = p;
            left = p;
        }
    }
    return ProjectionFamily(interval, std::move(window), std::move(left), std::move(right));
}

const Matrix& ProjectionFamily::at(long long k) const {
    require(interval_.contains(k), ErrorCode::IndexOutsideInterval,
            "P(" + std::to_string(k) + ") requested outside " + interval_.to_string());
    auto it = window_.find(k);
    if (it != window_.end()) return it->second;
    require(window_.empty() || k < window_lo_ || k > window_hi_, ErrorCode::InvalidInput,
            "P(" + std::to_string(k) + "): hole in the explicit window");
    const bool left = window_.empty() ? k < 0 : k < window_lo_;
    const std::optional<Matrix>& tail = left ? left_tail_ : right_tail_;
    require(tail.has_value(), ErrorCode::IndexOutsideInterval,
            "P(" + std::to_string(k) + "): no tail covers this index");
    return *tail;
}

bool ProjectionFamily::resolvable(long long k) const {
    if (!interval_.contains(k)) return false;
    if (window_.count(k)) return true;
    if (!window_.empty() && k >= window_lo_ && k <= window_hi_) return false;
    const bool left = window_.empty() ? k < 0 : k < window_lo_;
    return left ? left_tail_.has_value() : right_tail_.has_value();
}

ProjectionFamily ProjectionFamily::with(long long k, const Matrix& p) const {
    std::map<long long, Matrix> w = window_;
    w[k] = p;
    return ProjectionFamily(interval_, std::move(w), left_tail_, right_tail_);
}

ProjectionFamily ProjectionFamily::restricted_to(Interval sub) const {
    std::map<long long, Matrix> w;
    for (const auto& [k, p] : window_)
        if (sub.contains(k)) w[k] = p;
    std::optional<Matrix> left, right;
    if (!sub.bounded_below()) left = left_tail_;
    if (!sub.bounded_above()) right = right_tail_;
    // make sure the endpoints resolve explicitly when a tail is dropped
    if (sub.bounded_below())
        for (long long k = sub.a; k <= (sub.bounded_above() ? sub.b : sub.a); ++k)
            if (!w.count(k) && resolvable(k)) w[k] = at(k);
    if (sub.bounded_above())
        for (long long k = (sub.bounded_below() ? sub.a : sub.b); k <= sub.b; ++k)
            if (!w.count(k) && resolvable(k)) w[k] = at(k);
    return ProjectionFamily(sub, std::move(w), std::move(left), std::move(right));
}

ProjectionFamily::ValidationReport ProjectionFamily::validate(const CoefficientSequence& seq,
                                                              long long lo, long long hi,
                                                              const ToleranceConfig& tol) const {
    ValidationReport rep;
    for (long long k = lo; k <= hi; ++k) {
        const Matrix& p = at(k);
        const double scale = std::max(1.0, spectral_norm(p));
        rep.max_idempotency_residual =
            std::max(rep.max_idempotency_residual, spectral_norm(p * p - p) / scale);
        if (projection_rank(p) != rank_) rep.constant_rank = false;
        if (k < hi) {
            const Matrix& a = seq.at(k);
            const double inv_scale = (1.0 + spectral_norm(a)) * scale;
            const double res = spectral_norm(a * p - at(k + 1) * a) / inv_scale;
            if (res > rep.max_invariance_residual) {
                rep.max_invariance_residual = res;
                rep.worst_invariance_k = k;
            }
        }
    }
    rep.pass = rep.constant_rank && rep.max_idempotency_residual <= tol.tol_residual &&
               rep.max_invariance_residual <= tol.tol_residual;
    return rep;
}

// ---- certificate forms ----

Form Form::formA(double l, double alpha) {
    require(l >= 1.0, ErrorCode::InvalidInput, "FormA: L must be >= 1");
    require(alpha > 0.0, ErrorCode::InvalidInput, "FormA: alpha must be > 0");
    Form f;
    f.kind = Kind::A;
    f.L = l;
    f.alpha = alpha;
    return f;
}

Form Form::formB(double m, double k, double alpha) {
    require(m >= 1.0 && k >= 1.0, ErrorCode::InvalidInput, "FormB: M and K must be >= 1");
    require(alpha > 0.0, ErrorCode::InvalidInput, "FormB: alpha must be > 0");
    Form f;
    f.kind = Kind::B;
    f.M = m;
    f.K = k;
    f.alpha = alpha;
    return f;
}

Form Form::as_formA() const {
    if (kind == Kind::A) return *this;
    return formA(K * M, alpha);  // L = KM
}

Form Form::as_formB() const {
    if (kind == Kind::B) return *this;
    return formB(L, L, alpha);  // M = K = L
}

ConversionResult convert_certificate(const DichotomyCertificate& cert, Form::Kind target) {
    ConversionResult out{cert, false};
    out.certificate.form = (target == Form::Kind::A) ? cert.form.as_formA() : cert.form.as_formB();
    out.certificate.origin_form = cert.form.kind;
    // A -> B -> A (or B -> A -> B) composes L = K M with M = K = L and
    // squares the constant; flag it so reports can warn about the inflation.
    out.roundtrip_inflation =
        cert.origin_form.has_value() && *cert.origin_form == target && cert.form.kind != target;
    return out;
}

}  // namespace dichotomy
