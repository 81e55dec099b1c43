#pragma once

#include "dichotomy/types.hpp"

namespace dichotomy {

/// A linear subspace of R^n stored as an orthonormal basis (columns).
/// Zero-dimensional subspaces are first class: the basis is n x 0.
class Subspace {
  public:
    /// Default: the zero subspace of R^1 (placeholder for aggregate members).
    Subspace() : basis_(1, 0) {}

    /// Wraps a matrix whose columns are already orthonormal (checked).
    Subspace(Matrix basis, const ToleranceConfig& tol = {});

    /// The zero subspace of R^n.
    static Subspace zero(int ambient_dim);
    /// All of R^n.
    static Subspace full(int ambient_dim);
    /// Span of the given (not necessarily orthonormal) columns; rank-revealed
    /// and orthonormalized.
    static Subspace span_of(const Matrix& columns, const ToleranceConfig& tol = {});

    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }

    /// Orthogonal projector onto the subspace (basis * basis^T).
    Matrix projector() const { return basis_ * basis_.transpose(); }

    /// Distance of x from the subspace, |x - proj(x)|.
    double distance_to(const Vector& x) const;

    /// True if every column of M lies in the subspace within tol.
    bool contains(const Matrix& columns, double tol) const;
    bool contains(const Subspace& other, double tol) const { return contains(other.basis(), tol); }

  private:
    Matrix basis_;
};

/// Gap metric: spectral norm of the difference of orthogonal projectors.
/// Symmetric, zero iff equal spans, 1 when one space meets the other's
/// orthogonal complement.
double subspace_distance(const Subspace& s1, const Subspace& s2);

}  // namespace dichotomy
