#pragma once

#include <limits>
#include <string>

#include "dichotomy/types.hpp"

namespace dichotomy {

/// An interval of integers: the whole line, a half line, or a finite range.
struct Interval {
    enum class Kind { Whole, HalfPlus, HalfMinus, Finite };

    Kind kind = Kind::Whole;
    long long a = 0;  ///< left endpoint (HalfPlus, Finite)
    long long b = 0;  ///< right endpoint (HalfMinus, Finite)

    static Interval whole() { return {Kind::Whole, 0, 0}; }
    static Interval half_plus(long long a) { return {Kind::HalfPlus, a, 0}; }
    static Interval half_minus(long long b) { return {Kind::HalfMinus, 0, b}; }
    static Interval finite(long long a, long long b) {
        require(a <= b, ErrorCode::InvalidInput, "Interval: need a <= b");
        return {Kind::Finite, a, b};
    }

    bool contains(long long k) const {
        switch (kind) {
            case Kind::Whole: return true;
            case Kind::HalfPlus: return k >= a;
            case Kind::HalfMinus: return k <= b;
            case Kind::Finite: return k >= a && k <= b;
        }
        return false;
    }

    bool bounded_above() const { return kind == Kind::HalfMinus || kind == Kind::Finite; }
    bool bounded_below() const { return kind == Kind::HalfPlus || kind == Kind::Finite; }

    /// Indices k for which the coefficient A(k) is defined: states live on
    /// the interval, so A is needed up to max-1 when bounded above.
    bool coefficient_defined_at(long long k) const {
        if (bounded_above() && k > ((kind == Kind::Finite) ? b - 1 : b - 1)) return false;
        if (bounded_below() && k < a) return false;
        return true;
    }

    std::string to_string() const;
};

}  // namespace dichotomy
