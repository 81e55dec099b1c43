#include <doctest.h>

#include <cmath>

#include "dichotomy/extension.hpp"
#include "fixtures_util.hpp"

using namespace dichotomy;

namespace {
const double kLn2 = std::log(2.0);

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

DichotomyCertificate fixture_cert(const char* label, long long lo, long long hi) {
    const auto& fx = fixture(label);
    return {fx.sequence,
            ProjectionFamily::constant(fx.sequence->interval(), *fx.known_projection)
                .restricted_to(Interval::finite(lo, hi)),
            Form::formA(1.0, kLn2), Interval::finite(lo, hi), {}};
}
}  // namespace

TEST_CASE("can_extend_plus separates the fates of S2a and S2b") {
    auto va = can_extend_plus(fixture_cert("S2a", 1, 40), 1);
    CHECK(!va.extendable);
    CHECK(va.preimage_dim == 2);
    CHECK(va.required_rank == 1);
    CHECK(va.obstruction == ErrorCode::DimensionMismatch);

    auto vb = can_extend_plus(fixture_cert("S2b", 1, 40), 1);
    CHECK(vb.extendable);
    CHECK(vb.preimage_dim == 1);
    CHECK(vb.projection_preserved);
}

TEST_CASE("invertible systems always extend") {
    auto v = can_extend_plus(fixture_cert("S1", 5, 40), 5);
    CHECK(v.extendable);
    CHECK(v.preimage_dim == 1);
}

TEST_CASE("extend_plus constructs the S2b projection at 0") {
    auto res = extend_plus(fixture_cert("S2b", 1, 50));
    CHECK(spectral_norm(res.certificate.family.at(0) - diag2(1, 0)) < 1e-12);
    CHECK(verify_certificate(res.certificate, 0, 50).pass);
    // the input family is untouched above m
    for (long long k = 1; k <= 50; ++k)
        CHECK((res.certificate.family.at(k) - diag2(1, 0)).norm() == 0.0);
}

TEST_CASE("extend_plus reports the first obstruction index") {
    try {
        extend_plus(fixture_cert("S2a", 1, 40));
        FAIL("expected ExtensionObstructed");
    } catch (const DichotomyError& e) {
        CHECK(e.code() == ErrorCode::ExtensionObstructed);
        CHECK(std::string(e.what()).find("A(0)") != std::string::npos);
    }
}

TEST_CASE("extend_plus from deep inside S1 keeps the constant family") {
    auto res = extend_plus(fixture_cert("S1", 5, 45));
    for (long long k = 0; k <= 45; ++k)
        CHECK(spectral_norm(res.certificate.family.at(k) - diag2(1, 0)) < 1e-13);
    CHECK(res.certificate.form.L == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plus criterion is monotone in the target index") {
    for (std::uint64_t seed = 300; seed < 312; ++seed) {
        auto fx = testutil::make_random_fixture(seed, true, 0, 12);
        EstimateOptions opts;
        auto cert = estimate_constants(fx.seq, fx.family, 6, 12, opts).certificate;
        auto v0 = can_extend_plus(cert, 6, 0);
        if (!v0.extendable) continue;
        for (long long j = 1; j < 6; ++j) CHECK(can_extend_plus(cert, 6, j).extendable);
    }
}

TEST_CASE("can_extend_minus on S3 and its broken variant") {
    auto v = can_extend_minus(fixture_cert("S3", -40, -1), -1);
    CHECK(v.extendable);
    CHECK(v.projection_preserved);  // kernel e2 sits inside RP(-1) = span{e2}

    // A(-1) = diag(0, 1/2) kills the unstable direction e1 instead
    const auto& s3 = fixture("S3");
    auto broken = std::make_shared<CoefficientSequence>(
        s3.sequence->with_overrides({{-1, diag2(0.0, 0.5)}}));
    DichotomyCertificate cert{broken,
                              ProjectionFamily::constant(Interval::half_minus(0), diag2(0, 1)),
                              Form::formA(1.0, kLn2), Interval::finite(-40, -1), {}};
    auto vb = can_extend_minus(cert, -1);
    CHECK(!vb.extendable);
    CHECK(vb.obstruction == ErrorCode::NotInjectiveOnNullspace);
    CHECK_THROWS_AS(extend_minus(cert), DichotomyError);
}

TEST_CASE("extend_minus builds P(0) = diag(0,1) for S3") {
    auto res = extend_minus(fixture_cert("S3", -40, -1));
    CHECK(spectral_norm(res.certificate.family.at(0) - diag2(0, 1)) < 1e-12);
    CHECK(res.rechosen_at.empty());
    CHECK(res.verdict.projection_preserved);
    // original projections untouched below m
    for (long long k = -40; k <= -1; ++k)
        CHECK((res.certificate.family.at(k) - diag2(0, 1)).norm() == 0.0);
    CHECK(verify_certificate(res.certificate, -40, 0).pass);
}

TEST_CASE("extend_minus re-chooses the range when the kernel lies outside it") {
    // rotate the range at the base so that N(A(-1)) = span{e2} falls outside
    const auto& fx = fixture("S3");
    DichotomyCertificate cert{fx.sequence,
                              ProjectionFamily::constant(Interval::half_minus(0),
                                                         *fx.known_projection),
                              Form::formA(1.0, kLn2), Interval::finite(-40, -1), {}};
    Matrix w(2, 1);
    w << 1, 1;
    auto tilted = change_complement_minus(cert, Subspace::span_of(w));
    auto v = can_extend_minus(tilted.certificate, -1);
    CHECK(v.extendable);
    CHECK(!v.projection_preserved);
    CHECK(v.obstruction == ErrorCode::KernelNotInStable);

    auto res = extend_minus(tilted.certificate);
    CHECK(res.rechosen_at == std::vector<long long>{-1});
    CHECK(!res.verdict.projection_preserved);
    CHECK(verify_certificate(res.certificate, -40, 0).pass);
    // nullspaces are still the unique unstable family
    for (long long k = -40; k <= 0; ++k)
        CHECK(subspace_distance(projection_nullspace(res.certificate.family.at(k)),
                                projection_nullspace(diag2(0, 1))) < 1e-10);
}

TEST_CASE("embed_in_Z freezes S1 into itself") {
    auto cert = fixture_cert("S1", 0, 10);
    DichotomyCertificate finite{cert.seq, cert.family.restricted_to(Interval::finite(0, 10)),
                                cert.form, Interval::finite(0, 10), {}};
    auto res = embed_in_Z(finite);
    CHECK((res.left_matrix - diag2(0.5, 2.0)).norm() < 1e-15);
    CHECK((res.right_matrix - diag2(0.5, 2.0)).norm() < 1e-15);
    auto rep = verify_certificate(res.certificate, -30, 40);
    CHECK(rep.pass);
    CHECK(rep.worst_margin >= -1e-12);
    // the tail matrices commute with the frozen projections
    const Matrix& pa = finite.family.at(0);
    CHECK(spectral_norm(res.left_matrix * pa - pa * res.left_matrix) < 1e-12);
}

TEST_CASE("embed_in_Z handles a family that differs at the two endpoints") {
    auto base = fixture_cert("S1", 0, 10);
    Matrix w(2, 1);
    w << 1, 1;
    auto oblique = change_complement_plus(base, Subspace::span_of(w));
    DichotomyCertificate finite{oblique.certificate.seq,
                                oblique.certificate.family.restricted_to(Interval::finite(0, 10)),
                                oblique.certificate.form, Interval::finite(0, 10), {}};
    REQUIRE(spectral_norm(finite.family.at(0) - finite.family.at(10)) > 0.1);
    auto res = embed_in_Z(finite);
    auto rep = verify_certificate(res.certificate, -20, 30);
    CHECK(rep.pass);
    // tail systems commute with their own endpoint projections
    const Matrix& pa = finite.family.at(0);
    const Matrix& pb = finite.family.at(10);
    CHECK(spectral_norm(res.left_matrix * pa - pa * res.left_matrix) < 1e-12);
    CHECK(spectral_norm(res.right_matrix * pb - pb * res.right_matrix) < 1e-12);
}

TEST_CASE("embed_in_Z keeps the original tail on an unbounded side") {
    const auto& fx = fixture("S1");
    ProjectionFamily half = ProjectionFamily::constant(Interval::half_plus(0),
                                                       *fx.known_projection);
    DichotomyCertificate cert{fx.sequence, half, Form::formA(1.0, kLn2),
                              Interval::finite(0, 12), {}};
    auto res = embed_in_Z(cert);
    CHECK((res.extended_seq->at(-5) - res.left_matrix).norm() == 0.0);
    CHECK((res.extended_seq->at(20) - diag2(0.5, 2.0)).norm() == 0.0);  // original tail
    CHECK(verify_certificate(res.certificate, -15, 25).pass);
}
