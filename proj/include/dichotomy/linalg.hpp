#pragma once

#include <optional>

#include "dichotomy/subspace.hpp"

namespace dichotomy {

/// Spectral norm (largest singular value). Empty matrices have norm 0.
double spectral_norm(const Matrix& a);

/// Numerical rank: number of singular values above tol.tol_rank * sigma_max.
int rank_of(const Matrix& a, const ToleranceConfig& tol = {});

/// Orthonormal basis of the nullspace; dim = cols - rank_of(a).
Subspace kernel_of(const Matrix& a, const ToleranceConfig& tol = {});

/// Column span of a.
Subspace range_of(const Matrix& a, const ToleranceConfig& tol = {});

/// { x : a*x in span(s) }. Always contains kernel_of(a).
Subspace preimage(const Matrix& a, const Subspace& s, const ToleranceConfig& tol = {});

/// Orthonormalize columns by modified Gram-Schmidt with one
/// reorthogonalization pass. Requires numerically independent columns; a
/// single column reduces to division by its norm, which keeps the relative
/// accuracy of near-axis directions (SVD-based orthonormalization would not).
Matrix orthonormalize_columns(const Matrix& columns, const ToleranceConfig& tol = {});

/// A complement C of s inside `within` (ambient space when omitted), with
/// `containing` as a required subset of C. Defaults to the orthogonal
/// complement, extended minimally past `containing`. Fails with
/// NotAComplement when containing intersects s nontrivially or the spaces do
/// not fit.
Subspace complement(const Subspace& s,
                    const std::optional<Subspace>& within = std::nullopt,
                    const std::optional<Subspace>& containing = std::nullopt,
                    const ToleranceConfig& tol = {});

/// The projection with the given range and nullspace. Requires
/// range (+) nullsp = R^n; residuals (P^2 - P, P*range - range, P*nullsp)
/// are checked against tol.tol_residual.
Matrix make_projection(const Subspace& range, const Subspace& nullsp,
                       const ToleranceConfig& tol = {});

/// Range and nullspace of a (numerical) projection matrix.
Subspace projection_range(const Matrix& p, const ToleranceConfig& tol = {});
Subspace projection_nullspace(const Matrix& p, const ToleranceConfig& tol = {});

/// Rank of a numerical projection: count of singular values > 1/2.
/// (A projection's nonzero singular values are all >= 1.)
int projection_rank(const Matrix& p);

void require_finite(const Matrix& a, const char* what);

}  // namespace dichotomy
