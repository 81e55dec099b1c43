#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dichotomy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical tolerances used by every rank / residual decision in the library.
struct ToleranceConfig {
    double tol_rank = 1e-9;      ///< relative singular-value threshold
    double tol_orth = 1e-10;     ///< orthonormality tolerance for subspace bases
    double tol_residual = 1e-9;  ///< equation-residual tolerance (projections, invariance)
    double tol_margin = 1e-12;   ///< slack for certificate margins (relative to the constant)

    void validate() const {
        if (!(tol_rank > 0.0 && tol_rank < 1.0) || !(tol_orth > 0.0) || !(tol_residual > 0.0) ||
            !(tol_margin >= 0.0))
            throw std::invalid_argument("ToleranceConfig: tolerances must be positive, tol_rank < 1");
    }
};

/// Failure taxonomy. Codes are stable strings so reports stay diffable.
enum class ErrorCode {
    DimensionMismatch,
    InvalidInput,
    NotAComplement,
    NotInjectiveOnNullspace,
    KernelNotInStable,
    ComplementConstraintViolated,
    RankMismatch,
    TransversalityFailure,
    ExtensionObstructed,
    NoDecay,
    NoGap,
    NotAdmissible,
    SigmaTooLarge,
    WindowTooSmall,
    OverflowDetected,
    IndexOutsideInterval,
};

const char* error_code_name(ErrorCode code);

class DichotomyError : public std::runtime_error {
  public:
    DichotomyError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw DichotomyError(code, msg);
}

}  // namespace dichotomy
