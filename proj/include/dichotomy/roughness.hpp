#pragma once

#include <map>

#include "dichotomy/verify.hpp"

namespace dichotomy {

/// Closed-form constants of the multiplicative roughness theorem. With
/// unperturbed constants (K, alpha) and a perturbation bound delta, the
/// perturbed system keeps an exponential dichotomy with constant L and
/// exponent beta as long as rho*delta < 1.
struct RoughnessConstants {
    double delta = 0.0;
    double rho_delta = 0.0;  // K (1-e^-a)^{-1} (1+e^-a) delta
    double beta = 0.0;       // -log(cosh a - sqrt(sinh^2 a - 2 K delta sinh a))
    double gamma = 0.0;      // beta + log(1 + 2 K e^a delta sinh a)
    double d1 = 0.0;
    double d2 = 0.0;
    double L = 0.0;
    double qp_bound = 0.0;  // K L (1+e^{-(a+b)}) (1-e^{-(a+b)})^{-1} delta
    bool admissible = false;
};

/// Pure formula evaluation; inadmissible inputs (rho*delta >= 1 or a negative
/// radicand) yield admissible = false with the offending fields zeroed.
RoughnessConstants predicted_constants(double k_const, double alpha, double delta);

/// Lemma-style growth-bound input: a nonnegative sequence mu_k anchored at
/// `anchor`, dominated by D e^{-a |k-anchor|} plus delta-weighted shifted
/// convolutions of itself.
struct GrowthBoundInput {
    std::vector<double> mu;  // mu[anchor], mu[anchor+1], ... (forward) or ... mu[anchor] (backward)
    double d = 1.0;
    double alpha = 1.0;
    double delta = 0.0;
    long long anchor = 0;
};

enum class BoundSide { Forward, Backward };

struct SequenceBoundResult {
    double coefficient = 0.0;  // D / (1 - delta e^{-a} / (1 - e^{-(a+b)})) or the gamma variant
    double exponent = 0.0;     // beta (forward) or gamma (backward)
    double sigma = 0.0;        // delta (1+e^-a)(1-e^-a)^{-1}
    bool hypothesis_ok = true;   // the supplied mu satisfies the assumed inequality
    bool conclusion_ok = true;   // the supplied mu satisfies the concluded bound
};

/// Evaluates the sequence-bound formulas and self-tests them against the
/// supplied mu (sums truncated to the available data). Throws SigmaTooLarge
/// when sigma >= 1.
SequenceBoundResult sequence_bound(const GrowthBoundInput& input, BoundSide side);

/// The dichotomy-split fundamental kernel of the unperturbed system:
/// G(k,p) = Phi(k,p) P(p) for k > p and -Phi(k,p)(I-P(p)) for k <= p.
class GreensKernel {
  public:
    GreensKernel(const DichotomyCertificate& cert, const ToleranceConfig& tol = {})
        : cert_(&cert), tol_(tol) {}
    Matrix operator()(long long k, long long p) const;

  private:
    const DichotomyCertificate* cert_;
    ToleranceConfig tol_;
};

/// A forced, multiplicatively perturbed problem
///   x(k+1) = A(k)(I + B(k)) x(k) + f(k)
/// truncated to [window_lo, window_hi]; B and f live on [window_lo, window_hi-1]
/// and are zero where missing. Results are certified on
/// [report_lo, report_hi], which must sit inside the window with enough
/// margin for the geometric truncation tail.
struct ForcingProblem {
    std::map<long long, Matrix> b;
    std::map<long long, Vector> f;
    long long window_lo = 0, window_hi = 0;
    long long report_lo = 0, report_hi = 0;
};

struct FixedPointSolution {
    std::map<long long, Vector> u;  // on [report_lo, report_hi]
    double sup_norm = 0.0;          // over the whole computation window
    double truncation_bound = 0.0;  // certified bound on the report region
    double contraction = 0.0;       // rho * delta used for the stopping rule
    int iterations = 0;
};

struct FixedPointOptions {
    double tol_fixedpoint = 1e-12;
    int max_iterations = 100000;
};

/// Unique bounded solution of the forced perturbed equation via the
/// contraction T built on the unperturbed Green's kernel. Iterates from
/// u = 0 until the successive difference falls below
/// (1 - rho delta) * tol_fixedpoint. Throws NotAdmissible when
/// rho delta >= 1 and WindowTooSmall when the truncation tail exceeds
/// tol_residual on the report region.
FixedPointSolution bounded_solution_fixed_point(const ForcingProblem& problem,
                                                const DichotomyCertificate& cert,
                                                const FixedPointOptions& opts = {},
                                                const ToleranceConfig& tol = {});

/// Perturbed projection at m via the impulse method: for each basis vector
/// xi, force with f(m-1) = xi/K and read Q(m) xi = K x(m) off the unique
/// bounded solution.
Matrix perturbed_projection(const DichotomyCertificate& cert,
                            const std::map<long long, Matrix>& b, long long m,
                            long long window_lo, long long window_hi,
                            const FixedPointOptions& opts = {}, const ToleranceConfig& tol = {});

/// Perturbed projections on [lo, hi]; the per-anchor impulse solves are
/// independent, so this is one of the OpenMP kernels (the serial path is the
/// reference). Results are identical in both modes.
std::map<long long, Matrix> perturbed_family(const DichotomyCertificate& cert,
                                             const std::map<long long, Matrix>& b, long long lo,
                                             long long hi, long long window_lo,
                                             long long window_hi,
                                             ExecutionMode mode = default_execution_mode(),
                                             const FixedPointOptions& opts = {},
                                             const ToleranceConfig& tol = {});

struct RoughnessReport {
    RoughnessConstants predicted;
    VerifyReport perturbed_verify;       // (L, beta) inequalities for the perturbed system
    double max_invariance_residual = 0;  // of Q under A(I+B)
    double max_qp_distance = 0.0;        // max_k |Q(k) - P(k)|
    double qp_margin = 0.0;              // qp_bound - max_qp_distance
    bool rank_preserved = false;
    double measured_l_at_beta = 0.0;     // minimal L(beta) measured on the window
    long long report_lo = 0, report_hi = 0;
    bool pass = false;
};

/// End-to-end roughness validation: computes the perturbed projection family
/// on the report region, then checks rank preservation, invariance, the
/// |Q - P| bound, and the perturbed dichotomy inequalities with the
/// predicted constants. Certificates on half lines are embedded into Z
/// first (with B = 0 off the original interval).
RoughnessReport verify_roughness(const DichotomyCertificate& cert,
                                 const std::map<long long, Matrix>& b, long long report_lo,
                                 long long report_hi,
                                 ExecutionMode mode = default_execution_mode(),
                                 const FixedPointOptions& opts = {},
                                 const ToleranceConfig& tol = {});

/// Builds the perturbed coefficient sequence A(k)(I + B(k)) (B zero outside
/// its support).
SequencePtr perturbed_sequence(const SequencePtr& seq, const std::map<long long, Matrix>& b);

/// Norm profile of one impulse solve at `anchor`: the bounded-solution
/// representation carries |Psi(k,anchor) Q(anchor)| for k >= anchor and
/// |Psi(k,anchor)(I - Q(anchor))| for k < anchor, read here without any long
/// forward products. Values close to the window edges carry the truncation
/// error; keep a decay margin.
struct ImpulseProfile {
    Matrix q;  // Q(anchor)
    std::map<long long, double> forward_norms;
    std::map<long long, double> backward_norms;
};

ImpulseProfile perturbed_impulse_profile(const DichotomyCertificate& cert,
                                         const std::map<long long, Matrix>& b, long long anchor,
                                         long long window_lo, long long window_hi,
                                         const FixedPointOptions& opts = {},
                                         const ToleranceConfig& tol = {});

/// One application of the truncated contraction (test hook for the
/// contraction-ratio certificate): returns T(u) over the window, with
/// missing u entries treated as zero.
std::map<long long, Vector> apply_perturbation_operator(const ForcingProblem& problem,
                                                        const DichotomyCertificate& cert,
                                                        const std::map<long long, Vector>& u,
                                                        const ToleranceConfig& tol = {});

struct OdeConstants {
    double beta = 0.0;
    double l = 0.0;
    double qp_bound = 0.0;  // 2 K L (a+b)^{-1} delta
    bool admissible = false;
};

/// Continuous-time analog constants (formula evaluation only):
/// beta = a sqrt(1 - 2K delta / a), L = 2K(1 + K delta (1-2K delta/a)^{-1}/a)
/// / (1 + sqrt(1 - 2K delta/a)).
OdeConstants ode_constants(double k_const, double alpha, double delta);

}  // namespace dichotomy
