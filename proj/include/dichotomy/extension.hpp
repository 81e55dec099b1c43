#pragma once

#include "dichotomy/surgery.hpp"

namespace dichotomy {

/// Outcome of the extension criteria. `preimage_dim` carries the measured
/// dimension behind the plus-side criterion dim(Phi(m,base)^{-1}(RP(m))) = r.
struct ExtensionVerdict {
    bool extendable = false;
    int preimage_dim = -1;  // plus side only
    int required_rank = 0;
    std::optional<ErrorCode> obstruction;  // DimensionMismatch | NotInjectiveOnNullspace | KernelNotInStable
    bool projection_preserved = false;
};

/// Plus side: a dichotomy on [m, ...) extends to [to, ...) iff
/// dim(Phi(m,to)^{-1}(RP(m))) = r; the projection stays unchanged on k >= m.
ExtensionVerdict can_extend_plus(const DichotomyCertificate& cert, long long m, long long to = 0,
                                 const ToleranceConfig& tol = {});

/// Minus side: (i) extendable with the same rank iff Phi(to,m) is injective
/// on NP(m); (ii) the projection survives unchanged iff additionally
/// N(Phi(to,m)) lies inside RP(m).
ExtensionVerdict can_extend_minus(const DichotomyCertificate& cert, long long m, long long to = 0,
                                  const ToleranceConfig& tol = {});

struct ExtensionResult {
    DichotomyCertificate certificate;  // measured constants on the extended window
    Form guaranteed;                   // Form A constants from the step-by-step proof bounds
    ExtensionVerdict verdict;
    std::vector<long long> rechosen_at;  // minus side: steps where the range was re-chosen
};

/// Extends a certificate on [m, hi] down to [to, hi], one step at a time so
/// the first obstruction index is reported precisely
/// (ExtensionObstructed names the failing step). New projections are
/// P(j) = projection(preimage(A(j), RP(j+1)),
///                   complement of N(A(j)) inside preimage(A(j), NP(j+1))).
ExtensionResult extend_plus(const DichotomyCertificate& cert, long long to = 0,
                            const ToleranceConfig& tol = {});

/// Extends a certificate on [lo, m] up to [lo, to]. Steps forward with
/// U = A(j)(NP(j)), V = A(j)(RP(j)), W = orthogonal completion,
/// P(j+1) = projection(V+W, U). When N(A(j)) is not inside RP(j) the range
/// at j is first re-chosen (recorded in rechosen_at); when criterion (ii)
/// held at m, the original projections on k <= m are restored afterwards.
ExtensionResult extend_minus(const DichotomyCertificate& cert, long long to = 0,
                             const ToleranceConfig& tol = {});

struct EmbedResult {
    SequencePtr extended_seq;          // A~(k) on Z
    DichotomyCertificate certificate;  // same constants, piecewise-constant tails
    Matrix left_matrix;                // e^{-a}P(a) + e^{a}(I-P(a)), used for k < a
    Matrix right_matrix;               // e^{-a}P(b) + e^{a}(I-P(b)), used for k >= b
};

/// Embeds an interval dichotomy into Z with the same constant and exponent,
/// freezing the endpoint projections into autonomous tail systems.
EmbedResult embed_in_Z(const DichotomyCertificate& cert, const ToleranceConfig& tol = {});

}  // namespace dichotomy
