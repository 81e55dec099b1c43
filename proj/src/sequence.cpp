#include "dichotomy/sequence.hpp"

#include <cmath>

#include "dichotomy/linalg.hpp"

namespace dichotomy {

std::string Interval::to_string() const {
    switch (kind) {
        case Kind::Whole: return "Z";
        case Kind::HalfPlus: return "[" + std::to_string(a) + ",inf)";
        case Kind::HalfMinus: return "(-inf," + std::to_string(b) + "]";
        case Kind::Finite: return "[" + std::to_string(a) + "," + std::to_string(b) + "]";
    }
    return "?";
}

CoefficientSequence::CoefficientSequence(int n, Interval interval,
                                         std::map<long long, Matrix> window, TailRule left_tail,
                                         TailRule right_tail, std::optional<double> norm_bound)
    : n_(n),
      interval_(interval),
      window_(std::move(window)),
      left_tail_(std::move(left_tail)),
      right_tail_(std::move(right_tail)),
      norm_bound_(norm_bound) {
    require(n_ > 0, ErrorCode::InvalidInput, "CoefficientSequence: dimension must be positive");
    for (const auto& [k, m] : window_) {
        require(m.rows() == n_ && m.cols() == n_, ErrorCode::DimensionMismatch,
                "CoefficientSequence: matrix at k=" + std::to_string(k) + " is not n x n");
        require_finite(m, "CoefficientSequence");
        require(interval_.coefficient_defined_at(k), ErrorCode::IndexOutsideInterval,
                "CoefficientSequence: window index " + std::to_string(k) +
                    " outside the coefficient range of " + interval_.to_string());
        if (norm_bound_)
            require(spectral_norm(m) <= *norm_bound_ * (1 + 1e-12), ErrorCode::InvalidInput,
                    "CoefficientSequence: |A(k)| exceeds the declared norm bound");
    }
    for (const auto& tail : {left_tail_, right_tail_})
        for (const auto& m : tail.matrices) {
            require(m.rows() == n_ && m.cols() == n_, ErrorCode::DimensionMismatch,
                    "CoefficientSequence: tail matrix is not n x n");
            require_finite(m, "CoefficientSequence");
        }
    if (!window_.empty()) {
        window_lo_ = window_.begin()->first;
        window_hi_ = window_.rbegin()->first;
    }
}

bool CoefficientSequence::resolvable(long long k) const {
    if (!interval_.coefficient_defined_at(k)) return false;
    if (window_.count(k)) return true;
    if (!window_.empty() && k >= window_lo_ && k <= window_hi_) return false;  // hole
    const TailRule& tail = (window_.empty() || k < window_lo_) ? left_tail_ : right_tail_;
    return tail.kind != TailRule::Kind::None;
}

const Matrix& CoefficientSequence::at(long long k) const {
    require(interval_.coefficient_defined_at(k), ErrorCode::IndexOutsideInterval,
            "A(" + std::to_string(k) + ") requested outside " + interval_.to_string());
    auto it = window_.find(k);
    if (it != window_.end()) return it->second;
    require(window_.empty() || k < window_lo_ || k > window_hi_, ErrorCode::InvalidInput,
            "A(" + std::to_string(k) + "): hole in the explicit window");
    const bool left = window_.empty() || k < window_lo_;
    const TailRule& tail = left ? left_tail_ : right_tail_;
    require(tail.kind != TailRule::Kind::None, ErrorCode::IndexOutsideInterval,
            "A(" + std::to_string(k) + "): no tail rule covers this index");
    if (tail.kind == TailRule::Kind::Constant) return tail.matrices[0];
    // periodic: anchor the phase at the window edge (or 0 when no window)
    const long long anchor = window_.empty() ? 0 : (left ? window_lo_ : window_hi_ + 1);
    const long long p = static_cast<long long>(tail.matrices.size());
    const long long phase = ((k - anchor) % p + p) % p;
    return tail.matrices[static_cast<size_t>(phase)];
}

CoefficientSequence CoefficientSequence::with_overrides(
    const std::map<long long, Matrix>& overrides) const {
    std::map<long long, Matrix> w = window_;
    for (const auto& [k, m] : overrides) w[k] = m;
    return CoefficientSequence(n_, interval_, std::move(w), left_tail_, right_tail_, norm_bound_);
}

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

std::vector<NamedFixture> build_registry() {
    const double ln2 = std::log(2.0);
    std::vector<NamedFixture> reg;

    auto s1 = std::make_shared<CoefficientSequence>(
        2, Interval::whole(), std::map<long long, Matrix>{},
        TailRule::constant(diag2(0.5, 2.0)), TailRule::constant(diag2(0.5, 2.0)));
    reg.push_back({"S1", s1, diag2(1, 0), 1, ln2, "constant diag(1/2,2) on Z"});

    auto s2a = std::make_shared<CoefficientSequence>(
        2, Interval::whole(), std::map<long long, Matrix>{{0, diag2(0.5, 0.0)}},
        TailRule::constant(diag2(0.5, 2.0)), TailRule::constant(diag2(0.5, 2.0)));
    reg.push_back({"S2a", s2a, diag2(1, 0), 1, ln2,
                   "S1 with A(0)=diag(1/2,0); kernel hits the unstable direction"});

    auto s2b = std::make_shared<CoefficientSequence>(
        2, Interval::whole(), std::map<long long, Matrix>{{0, diag2(0.0, 2.0)}},
        TailRule::constant(diag2(0.5, 2.0)), TailRule::constant(diag2(0.5, 2.0)));
    reg.push_back({"S2b", s2b, diag2(1, 0), 1, ln2,
                   "S1 with A(0)=diag(0,2); kernel inside the stable direction"});

    auto s3 = std::make_shared<CoefficientSequence>(
        2, Interval::half_minus(0), std::map<long long, Matrix>{{-1, diag2(2.0, 0.0)}},
        TailRule::constant(diag2(2.0, 0.5)), TailRule::none());
    reg.push_back({"S3", s3, diag2(0, 1), 1, ln2,
                   "constant diag(2,1/2) on Z_- with A(-1)=diag(2,0)"});

    return reg;
}

// splitmix64: tiny, seedable, identical on every platform
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform_pm1() {  // uniform in [-1, 1)
        return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    }
};

}  // namespace

const std::vector<NamedFixture>& fixture_registry() {
    static const std::vector<NamedFixture> reg = build_registry();
    return reg;
}

const NamedFixture& fixture(const std::string& label) {
    for (const auto& f : fixture_registry())
        if (f.label == label) return f;
    throw DichotomyError(ErrorCode::InvalidInput, "unknown fixture: " + label);
}

Matrix seeded_uniform_matrix(int rows, int cols, std::uint64_t seed) {
    SplitMix64 rng{seed};
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform_pm1();
    return m;
}

std::map<long long, Matrix> seeded_perturbation(int n, long long lo, long long hi, double delta,
                                                std::uint64_t seed) {
    require(lo <= hi, ErrorCode::InvalidInput, "seeded_perturbation: need lo <= hi");
    require(delta >= 0.0, ErrorCode::InvalidInput, "seeded_perturbation: delta must be >= 0");
    SplitMix64 rng{seed};
    std::map<long long, Matrix> out;
    for (long long k = lo; k <= hi; ++k) {
        Matrix b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = rng.uniform_pm1();
        const double nrm = spectral_norm(b);
        out[k] = (delta == 0.0 || nrm == 0.0) ? Matrix::Zero(n, n).eval() : (b * (delta / nrm)).eval();
    }
    return out;
}

}  // namespace dichotomy
