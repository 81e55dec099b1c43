#pragma once

#include "dichotomy/verify.hpp"

namespace dichotomy {

/// Result of a projection surgery: the rebuilt certificate with measured
/// (tightened) constants, the constants guaranteed by the constructive
/// proof bounds, and the principal-angle conditioning of the new complement
/// at the base point (no hard threshold is enforced; callers decide).
struct SurgeryResult {
    DichotomyCertificate certificate;
    Form guaranteed;
    double gap_angle = 0.0;  // smallest principal angle (radians) at the base
};

/// Plus side: keep every range, move the nullspace. Given a certificate on a
/// window [a,b] (a is the base) and W with W (+) RP(a) = R^n, builds
/// Q(k) = projection with range RP(k) and nullspace Phi(k,a)(W).
/// Guaranteed constants follow the KM(1+M1) chain with M1 = M + K^2 M |Q(a)|.
SurgeryResult change_complement_plus(const DichotomyCertificate& cert, const Subspace& w,
                                     const ToleranceConfig& tol = {});

/// Minus side: keep every nullspace, move the range. Given a certificate on
/// [a,b] (b is the base) and W with W (+) NP(b) = R^n, builds
/// Q(k) = projection with range Phi(b,k)^{-1}(W) and nullspace NP(k),
/// stepping the preimages down one factor at a time.
SurgeryResult change_complement_minus(const DichotomyCertificate& cert, const Subspace& w,
                                      const ToleranceConfig& tol = {});

enum class Side { Plus, Minus };

/// Re-base the complement freedom at an interior point m.
/// Plus side: RQ(m) = RP(m), NQ(m) = W; the base complement is
/// V with V (+) N(Phi(m,a)) = Phi(m,a)^{-1}(W). Minus side: NQ(m) = NP(m),
/// RQ(m) = W, which requires N(Phi(b,m)) inside W
/// (ComplementConstraintViolated otherwise); the base complement is
/// V = Phi(b,m)(W) extended orthogonally against NP(b).
SurgeryResult rebase_at_m(const DichotomyCertificate& cert, long long m, const Subspace& w,
                          Side side, const ToleranceConfig& tol = {});

/// Glue half-line certificates into a whole-line one. Requires the same
/// sequence, equal ranks (RankMismatch) and RP+(0) (+) NP-(0) = R^n
/// (TransversalityFailure), where 0 names the shared endpoint. Both sides
/// are rebuilt to share P(0) = projection(RP+(0), NP-(0)); the guaranteed
/// constant follows the K^2 crossing-pair bound.
SurgeryResult glue_half_lines(const DichotomyCertificate& cert_plus,
                              const DichotomyCertificate& cert_minus,
                              const ToleranceConfig& tol = {});

/// Two verified certificates that agree at m but differ elsewhere, exhibiting
/// the non-uniqueness caused by a singular transition. Returns found = false
/// (NoWitness) when the transition is numerically invertible. The second
/// complement is the canonical one rotated 45 degrees toward a kernel
/// direction (plus side) or a nullspace direction (minus side), so runs are
/// reproducible.
struct WitnessResult {
    bool found = false;
    std::optional<DichotomyCertificate> first, second;
    long long agree_at = 0;
    double agreement_gap = 0.0;   // |Q1(m) - Q2(m)|
    long long differ_at = 0;
    double difference_gap = 0.0;  // max |Q1(k) - Q2(k)| over the window
};

WitnessResult nonuniqueness_witness(const DichotomyCertificate& cert, long long m, Side side,
                                    const ToleranceConfig& tol = {});

}  // namespace dichotomy
