#include <doctest.h>

#include <cmath>

#include "dichotomy/linalg.hpp"
#include "dichotomy/sequence.hpp"

using namespace dichotomy;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Subspace span1(double x, double y) {
    Matrix v(2, 1);
    v << x, y;
    return Subspace::span_of(v);
}

// Brute-force membership oracle: x in span(S) iff residual of the
// least-squares fit vanishes.
bool in_span_bruteforce(const Subspace& s, const Vector& x, double tol = 1e-9) {
    if (s.dim() == 0) return x.norm() <= tol;
    Vector c = s.basis().colPivHouseholderQr().solve(x);
    return (s.basis() * c - x).norm() <= tol * std::max(1.0, x.norm());
}

}  // namespace

TEST_CASE("rank_of on the named examples") {
    CHECK(rank_of(Matrix::Identity(3, 3)) == 3);
    CHECK(rank_of(Matrix::Zero(2, 2)) == 0);
    CHECK(rank_of(mat2(1, 2, 2, 4)) == 1);  // sigma_2 = 0 exactly
}

TEST_CASE("kernel_of on the named examples") {
    CHECK(kernel_of(Matrix::Identity(2, 2)).dim() == 0);
    CHECK(kernel_of(Matrix::Zero(2, 2)).dim() == 2);
    Subspace k = kernel_of(mat2(1, 0, 0, 0));
    REQUIRE(k.dim() == 1);
    CHECK(subspace_distance(k, span1(0, 1)) < 1e-14);
}

TEST_CASE("preimage on the named examples") {
    SUBCASE("A=diag(1/2,0), S=span e1 -> all of R^2") {
        CHECK(preimage(mat2(0.5, 0, 0, 0), span1(1, 0)).dim() == 2);
    }
    SUBCASE("A=diag(0,2), S=span e1 -> span e1") {
        Subspace pre = preimage(mat2(0, 0, 0, 2), span1(1, 0));
        REQUIRE(pre.dim() == 1);
        CHECK(subspace_distance(pre, span1(1, 0)) < 1e-14);
    }
    SUBCASE("identity pulls back to the same span") {
        Subspace s = span1(3, 4);
        CHECK(subspace_distance(preimage(Matrix::Identity(2, 2), s), s) < 1e-14);
    }
    SUBCASE("dimension mismatch is rejected") {
        Matrix a = Matrix::Identity(3, 3);
        CHECK_THROWS_AS(preimage(a, span1(1, 0)), DichotomyError);
    }
}

TEST_CASE("complement on the named examples") {
    SUBCASE("orthogonal default") {
        Subspace c = complement(span1(1, 0));
        REQUIRE(c.dim() == 1);
        CHECK(subspace_distance(c, span1(0, 1)) < 1e-14);
    }
    SUBCASE("constraint forces the complement through span{e1+e2}") {
        Subspace c = complement(span1(1, 0), std::nullopt, span1(1, 1));
        REQUIRE(c.dim() == 1);
        CHECK(subspace_distance(c, span1(1, 1)) < 1e-14);
    }
    SUBCASE("full space has the zero complement") {
        CHECK(complement(Subspace::full(2)).dim() == 0);
    }
    SUBCASE("constraint meeting S fails") {
        CHECK_THROWS_WITH_AS(complement(span1(1, 0), std::nullopt, span1(1, 0)),
                             doctest::Contains("intersects"), DichotomyError);
    }
}

TEST_CASE("make_projection on the named examples") {
    SUBCASE("orthogonal pair gives diag(1,0)") {
        Matrix p = make_projection(span1(1, 0), span1(0, 1));
        CHECK((p - mat2(1, 0, 0, 0)).norm() < 1e-14);
    }
    SUBCASE("oblique nullspace e1+e2") {
        Matrix p = make_projection(span1(1, 0), span1(1, 1));
        CHECK((p - mat2(1, -1, 0, 0)).norm() < 1e-13);
    }
    SUBCASE("degenerate ranks") {
        CHECK((make_projection(Subspace::full(2), Subspace::zero(2)) - Matrix::Identity(2, 2))
                  .norm() == 0.0);
        CHECK(make_projection(Subspace::zero(2), Subspace::full(2)).norm() == 0.0);
    }
    SUBCASE("rank-deficient pair fails") {
        CHECK_THROWS_AS(make_projection(span1(1, 0), span1(1, 1e-14)), DichotomyError);
    }
}

TEST_CASE("subspace_distance on the named examples") {
    Subspace s = span1(2, -1);
    CHECK(subspace_distance(s, s) == 0.0);
    CHECK(subspace_distance(span1(1, 0), span1(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(subspace_distance(span1(1, 0), span1(1, 1)) ==
          doctest::Approx(std::sin(M_PI / 4)).epsilon(1e-12));
}

TEST_CASE("preimage dimension formula on random matrices") {
    // dim(preimage(A,S)) = dim(S ∩ R(A)) + dim N(A)
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        Matrix a = seeded_uniform_matrix(n, n, 1000 + trial);
        if (trial % 3 == 0) a.row(trial % n).setZero();  // force rank deficiency
        const int sdim = 1 + trial % n;
        Subspace s = Subspace::span_of(seeded_uniform_matrix(n, sdim, 2000 + trial));

        Subspace pre = preimage(a, s);
        Subspace ker = kernel_of(a);
        Subspace ran = range_of(a);

        // dim(S ∩ R(A)) = dim S + dim R(A) - dim(S + R(A))
        Matrix sum(n, s.dim() + ran.dim());
        sum << s.basis(), ran.basis();
        const int inter = s.dim() + ran.dim() - rank_of(sum);
        CHECK(pre.dim() == inter + ker.dim());

        // kernel is always inside the preimage
        CHECK(pre.contains(ker, 1e-9));
    }
}

TEST_CASE("composite preimage dimension propagates to the left factor") {
    // dim(preimage(AB,S)) = dim(S) implies dim(preimage(A,S)) = dim(S)
    int accepted = 0;
    for (int trial = 0; accepted < 120 && trial < 3000; ++trial) {
        const int n = 2 + trial % 4;
        Matrix a = seeded_uniform_matrix(n, n, 3000 + trial);
        Matrix b = seeded_uniform_matrix(n, n, 4000 + trial);
        if (trial % 2 == 0) a.col(trial % n).setZero();
        if (trial % 5 == 1) b.row((trial + 1) % n).setZero();
        const int sdim = 1 + trial % n;
        Subspace s = Subspace::span_of(seeded_uniform_matrix(n, sdim, 5000 + trial));
        if (preimage(a * b, s).dim() != s.dim()) continue;
        ++accepted;
        CHECK(preimage(a, s).dim() == s.dim());
    }
    CHECK(accepted >= 120);
}

TEST_CASE("make_projection round-trips through range/nullspace extraction") {
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 4;
        const int r = 1 + trial % (n - 1 > 0 ? n - 1 : 1);
        Matrix cols = seeded_uniform_matrix(n, n, 6000 + trial);
        Subspace range = Subspace::span_of(cols.leftCols(r));
        Subspace nullsp = complement(range);
        // tilt the nullspace to make the projection oblique
        Matrix tilted = nullsp.basis() + 0.3 * range.basis() * seeded_uniform_matrix(r, nullsp.dim(), 7000 + trial);
        nullsp = Subspace::span_of(tilted);

        Matrix p = make_projection(range, nullsp);
        Matrix p2 = make_projection(projection_range(p), projection_nullspace(p));
        CHECK(spectral_norm(p2 - p) < 1e-9 * std::max(1.0, spectral_norm(p)));
    }
}

TEST_CASE("subspaces behave at the degenerate dimensions") {
    Subspace z = Subspace::zero(3);
    CHECK(z.dim() == 0);
    CHECK(z.projector().norm() == 0.0);
    Vector x(3);
    x << 1, 2, 2;
    CHECK(z.distance_to(x) == doctest::Approx(3.0));
    CHECK(in_span_bruteforce(Subspace::full(3), x));
    CHECK(subspace_distance(z, Subspace::full(3)) == doctest::Approx(1.0));
}

TEST_CASE("matrices with non-finite entries are rejected") {
    Matrix bad = mat2(1, 0, 0, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(rank_of(bad), DichotomyError);
    CHECK_THROWS_AS(Subspace::span_of(bad), DichotomyError);
}
