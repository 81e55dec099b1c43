#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dichotomy/interval.hpp"
#include "dichotomy/types.hpp"

namespace dichotomy {

/// How a coefficient sequence continues beyond its explicit window.
struct TailRule {
    enum class Kind { None, Constant, Periodic };
    Kind kind = Kind::None;
    std::vector<Matrix> matrices;  // one matrix for Constant, the period for Periodic

    static TailRule none() { return {}; }
    static TailRule constant(Matrix m) { return {Kind::Constant, {std::move(m)}}; }
    static TailRule periodic(std::vector<Matrix> ms) {
        require(!ms.empty(), ErrorCode::InvalidInput, "TailRule: empty period");
        return {Kind::Periodic, std::move(ms)};
    }
};

/// The matrices A(k) of x(k+1) = A(k) x(k) on an interval, resolved from an
/// explicit window plus tail rules for the infinite directions.
class CoefficientSequence {
  public:
    CoefficientSequence(int n, Interval interval, std::map<long long, Matrix> window,
                        TailRule left_tail = TailRule::none(),
                        TailRule right_tail = TailRule::none(),
                        std::optional<double> norm_bound = std::nullopt);

    int dim() const { return n_; }
    const Interval& interval() const { return interval_; }
    const std::map<long long, Matrix>& window() const { return window_; }
    const TailRule& left_tail() const { return left_tail_; }
    const TailRule& right_tail() const { return right_tail_; }
    std::optional<double> norm_bound() const { return norm_bound_; }

    /// A(k); throws IndexOutsideInterval when k is not a coefficient index,
    /// and fails loudly when neither the window nor a tail rule covers k.
    const Matrix& at(long long k) const;

    bool resolvable(long long k) const;

    /// A new sequence with A(k) replaced on the listed indices.
    CoefficientSequence with_overrides(const std::map<long long, Matrix>& overrides) const;

  private:
    int n_;
    Interval interval_;
    std::map<long long, Matrix> window_;
    TailRule left_tail_;
    TailRule right_tail_;
    std::optional<double> norm_bound_;
    long long window_lo_ = 0, window_hi_ = -1;  // empty when lo > hi
};

using SequencePtr = std::shared_ptr<const CoefficientSequence>;

/// A named system with an optionally known dichotomy projection family.
struct NamedFixture {
    std::string label;
    SequencePtr sequence;
    // constant known projection (all fixtures in the registry have one)
    std::optional<Matrix> known_projection;
    int known_rank = 0;
    double alpha = 0.0;  // known exponent for the fixture's certificate
    std::string description;
};

/// Registry of the standard fixtures:
///   S1  = constant diag(1/2, 2) on Z, P = diag(1, 0)
///   S2a = S1 with A(0) = diag(1/2, 0)
///   S2b = S1 with A(0) = diag(0, 2)
///   S3  = constant diag(2, 1/2) on Z_- with A(-1) = diag(2, 0), P = diag(0, 1)
const std::vector<NamedFixture>& fixture_registry();
const NamedFixture& fixture(const std::string& label);

/// Seeded random perturbation sequence: entries i.i.d. uniform in [-1, 1],
/// rescaled so the spectral norm of each B(k) equals delta exactly.
/// Deterministic across platforms (splitmix64-based generator).
std::map<long long, Matrix> seeded_perturbation(int n, long long lo, long long hi, double delta,
                                                std::uint64_t seed);

/// Random matrix with entries uniform in [-1, 1] (same generator as above).
Matrix seeded_uniform_matrix(int rows, int cols, std::uint64_t seed);

}  // namespace dichotomy
