#include <doctest.h>

#include <cmath>

#include "dichotomy/roughness.hpp"
#include "fixtures_util.hpp"
#include "oracle_bvp.hpp"
#include "oracle_constants.hpp"

using namespace dichotomy;

namespace {
const double kLn2 = std::log(2.0);

DichotomyCertificate s1_cert(long long lo, long long hi) {
    const auto& fx = fixture("S1");
    return {fx.sequence, ProjectionFamily::constant(Interval::whole(), *fx.known_projection),
            Form::formA(1.0, kLn2), Interval::finite(lo, hi), {}};
}
}  // namespace

TEST_CASE("predicted_constants collapses to (alpha, K) at delta = 0") {
    for (double k : {1.0, 2.0, 10.0})
        for (double a : {0.1, kLn2, 2.0}) {
            auto c = predicted_constants(k, a, 0.0);
            REQUIRE(c.admissible);
            CHECK(std::abs(c.beta - a) <= 1e-12);
            CHECK(std::abs(c.L - k) <= 1e-12);
            CHECK(c.gamma == doctest::Approx(c.beta));
            CHECK(c.d1 == doctest::Approx(1.0));
            CHECK(c.d2 == doctest::Approx(1.0));
        }
}

TEST_CASE("predicted_constants matches the high-precision oracle") {
    for (auto [k, a, d] : std::vector<std::tuple<double, double, double>>{
             {1.0, kLn2, 0.01}, {2.0, 0.4, 0.005}, {1.5, 1.2, 0.02}, {1.0, kLn2, 0.3}}) {
        auto lib = predicted_constants(k, a, d);
        auto hp = oracle::roughness_constants(k, a, d);
        REQUIRE(lib.admissible == hp.admissible);
        if (!lib.admissible) continue;
        CHECK(lib.rho_delta == doctest::Approx(static_cast<double>(hp.rho_delta)).epsilon(1e-14));
        CHECK(lib.beta == doctest::Approx(static_cast<double>(hp.beta)).epsilon(1e-13));
        CHECK(lib.gamma == doctest::Approx(static_cast<double>(hp.gamma)).epsilon(1e-13));
        CHECK(lib.L == doctest::Approx(static_cast<double>(hp.l)).epsilon(1e-12));
    }
    // the frozen value for (1, ln 2, 0.01)
    CHECK(std::abs(predicted_constants(1.0, kLn2, 0.01).beta - 0.673212) <= 1e-5);
}

TEST_CASE("predicted_constants flags inadmissible perturbations") {
    CHECK(!predicted_constants(1.0, kLn2, 0.5).admissible);   // rho*delta = 1.5
    CHECK(!predicted_constants(10.0, 0.1, 0.02).admissible);  // rho*delta > 1
}

TEST_CASE("beta decreases and L increases with delta") {
    for (double k : {1.0, 2.0})
        for (double a : {0.1, kLn2, 2.0}) {
            double prev_beta = a, prev_l = k;
            const double dmax = 0.999 * (1.0 - std::exp(-a)) / ((1.0 + std::exp(-a)) * k);
            bool first = true;
            for (int i = 1; i <= 40; ++i) {
                const double d = dmax * i / 41.0;
                auto c = predicted_constants(k, a, d);
                REQUIRE(c.admissible);
                if (!first || true) {
                    CHECK(c.beta < prev_beta);
                    CHECK(c.L > prev_l);
                }
                prev_beta = c.beta;
                prev_l = c.L;
                first = false;
            }
        }
}

TEST_CASE("sequence_bound evaluates the closed forms") {
    SUBCASE("delta = 0 returns the input envelope") {
        GrowthBoundInput in;
        in.d = 3.0;
        in.alpha = kLn2;
        in.delta = 0.0;
        for (int k = 0; k < 20; ++k)
            in.mu.push_back(3.0 * std::exp(-kLn2 * k));
        auto r = sequence_bound(in, BoundSide::Forward);
        CHECK(r.exponent == doctest::Approx(kLn2).epsilon(1e-13));
        CHECK(r.coefficient == doctest::Approx(3.0).epsilon(1e-13));
        CHECK(r.hypothesis_ok);
        CHECK(r.conclusion_ok);
    }
    SUBCASE("forward and backward match the oracle at delta = 0.01") {
        GrowthBoundInput in;
        in.d = 1.0;
        in.alpha = kLn2;
        in.delta = 0.01;
        auto f = sequence_bound(in, BoundSide::Forward);
        auto fb = oracle::sequence_bound_forward(1.0L, kLn2, 0.01L);
        CHECK(f.exponent == doctest::Approx(static_cast<double>(fb.exponent)).epsilon(1e-13));
        CHECK(f.coefficient == doctest::Approx(static_cast<double>(fb.coefficient)).epsilon(1e-13));
        CHECK(f.exponent == doctest::Approx(0.6732120705643724).epsilon(1e-9));

        auto b = sequence_bound(in, BoundSide::Backward);
        auto bb = oracle::sequence_bound_backward(1.0L, kLn2, 0.01L);
        CHECK(b.exponent == doctest::Approx(static_cast<double>(bb.exponent)).epsilon(1e-13));
        CHECK(b.coefficient == doctest::Approx(static_cast<double>(bb.coefficient)).epsilon(1e-13));
        CHECK(b.exponent > f.exponent);  // gamma >= beta
    }
    SUBCASE("sigma >= 1 is refused") {
        GrowthBoundInput in;
        in.alpha = 0.1;
        in.delta = 0.2;  // sigma = 0.2 * (1+e^-.1)/(1-e^-.1) ~ 4
        try {
            sequence_bound(in, BoundSide::Forward);
            FAIL("expected SigmaTooLarge");
        } catch (const DichotomyError& e) {
            CHECK(e.code() == ErrorCode::SigmaTooLarge);
        }
    }
    SUBCASE("conclusion violations are detected") {
        GrowthBoundInput in;
        in.d = 1.0;
        in.alpha = kLn2;
        in.delta = 0.01;
        in.mu = {1.0, 0.5, 10.0, 0.1};  // the spike breaks both inequalities
        auto r = sequence_bound(in, BoundSide::Forward);
        CHECK(!r.hypothesis_ok);
        CHECK(!r.conclusion_ok);
    }
}

TEST_CASE("fixed point with B = 0 reproduces the Green's kernel") {
    auto cert = s1_cert(-40, 40);
    GreensKernel g(cert);
    Vector xi(2);
    xi << 0.7, -0.3;
    ForcingProblem prob;
    prob.window_lo = -40;
    prob.window_hi = 40;
    prob.report_lo = -5;
    prob.report_hi = 5;
    prob.f[2] = xi;  // impulse at k = 2, so u(k) = G(k, 3) xi away from k = 3
    auto sol = bounded_solution_fixed_point(prob, cert);
    CHECK(sol.iterations <= 2);
    for (long long k = -40; k <= 40; ++k) {
        if (k == 3) continue;  // G uses the -(I-P) branch at k = p; the impulse lands on P
        CHECK((sol.u.at(k) - g(k, 3) * xi).norm() < 1e-14);
    }
    CHECK((sol.u.at(3) - cert.family.at(3) * xi).norm() < 1e-14);
}

TEST_CASE("zero forcing gives the zero solution") {
    auto cert = s1_cert(-30, 30);
    ForcingProblem prob;
    prob.window_lo = -30;
    prob.window_hi = 30;
    prob.report_lo = -5;
    prob.report_hi = 5;
    prob.b = seeded_perturbation(2, -30, 29, 0.01, 5);
    auto sol = bounded_solution_fixed_point(prob, cert);
    CHECK(sol.sup_norm == 0.0);
}

TEST_CASE("fixed point matches the dense boundary-value oracle") {
    auto cert = s1_cert(-50, 50);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ForcingProblem prob;
        prob.window_lo = -50;
        prob.window_hi = 50;
        prob.report_lo = -10;
        prob.report_hi = 10;
        prob.b = seeded_perturbation(2, -50, 49, 0.01, seed);
        Matrix f = seeded_uniform_matrix(2, 101, seed * 101 + 7);
        for (long long k = -50; k < 50; ++k) prob.f[k] = f.col(k + 50);
        auto sol = bounded_solution_fixed_point(prob, cert);
        auto ora = oracle::solve_truncated_bvp(cert, prob.b, prob.f, -50, 50);
        double diff = 0.0;
        for (long long k = -50; k <= 50; ++k)
            diff = std::max(diff, (sol.u.at(k) - ora.at(k)).norm());
        CHECK(diff < 1e-8);
    }
}

TEST_CASE("truncated operator is a rho-delta contraction") {
    auto cert = s1_cert(-30, 30);
    ForcingProblem prob;
    prob.window_lo = -30;
    prob.window_hi = 30;
    prob.report_lo = 0;
    prob.report_hi = 0;
    prob.b = seeded_perturbation(2, -30, 29, 0.01, 11);
    const double rho_delta = predicted_constants(1.0, kLn2, 0.01).rho_delta;
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        std::map<long long, Vector> u, v;
        Matrix ru = seeded_uniform_matrix(2, 61, seed);
        Matrix rv = seeded_uniform_matrix(2, 61, seed + 1000);
        for (long long k = -30; k <= 30; ++k) {
            u[k] = ru.col(k + 30);
            v[k] = rv.col(k + 30);
        }
        auto tu = apply_perturbation_operator(prob, cert, u);
        auto tv = apply_perturbation_operator(prob, cert, v);
        double num = 0.0, den = 0.0;
        for (long long k = -30; k <= 30; ++k) {
            num = std::max(num, (tu.at(k) - tv.at(k)).lpNorm<Eigen::Infinity>());
            den = std::max(den, (u.at(k) - v.at(k)).lpNorm<Eigen::Infinity>());
        }
        CHECK(num <= rho_delta * den * (1.0 + 1e-12));
    }
}

TEST_CASE("window too small is reported instead of silently truncating") {
    auto cert = s1_cert(-4, 4);
    ForcingProblem prob;
    prob.window_lo = -4;
    prob.window_hi = 4;
    prob.report_lo = -4;
    prob.report_hi = 4;  // no margin at all
    Vector xi(2);
    xi << 1, 1;
    prob.f[0] = xi;
    try {
        bounded_solution_fixed_point(prob, cert);
        FAIL("expected WindowTooSmall");
    } catch (const DichotomyError& e) {
        CHECK(e.code() == ErrorCode::WindowTooSmall);
    }
}

TEST_CASE("perturbed projection reduces to P when B = 0") {
    auto cert = s1_cert(-40, 40);
    Matrix q = perturbed_projection(cert, {}, 0, -40, 40);
    CHECK(spectral_norm(q - cert.family.at(0)) < 1e-12);
}

TEST_CASE("perturbed projection keeps rank and stays within the stated distance") {
    auto cert = s1_cert(-60, 60);
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        auto b = seeded_perturbation(2, -60, 59, 0.01, seed);
        Matrix q = perturbed_projection(cert, b, 0, -60, 60);
        CHECK(projection_rank(q) == 1);
        auto pred = predicted_constants(1.0, kLn2, 0.01);
        CHECK(spectral_norm(q - cert.family.at(0)) <= pred.qp_bound);
    }
}

TEST_CASE("perturbed projections are invariant under the perturbed step") {
    auto cert = s1_cert(-50, 50);
    auto b = seeded_perturbation(2, -50, 49, 0.01, 3);
    auto fam = perturbed_family(cert, b, -2, 2, -50, 50);
    SequencePtr pseq = perturbed_sequence(cert.seq, b);
    for (long long k = -2; k < 2; ++k) {
        const Matrix& psi = pseq->at(k);
        CHECK(spectral_norm(psi * fam.at(k) - fam.at(k + 1) * psi) < 1e-8);
    }
}

TEST_CASE("verify_roughness end to end on S1") {
    auto cert = s1_cert(-60, 60);
    auto b = seeded_perturbation(2, -60, 59, 0.01, 12);
    auto rep = verify_roughness(cert, b, -20, 20);
    CHECK(rep.pass);
    CHECK(rep.rank_preserved);
    CHECK(rep.qp_margin > 0.0);
    CHECK(rep.perturbed_verify.pass);
    CHECK(rep.measured_l_at_beta <= rep.predicted.L);
}

TEST_CASE("verify_roughness survives the near-critical stress case") {
    // rho*delta = 0.99 on S1: delta = 0.33
    const double rho = (1.0 + 0.5) / (1.0 - 0.5);
    const double delta = 0.99 / rho;
    auto cert = s1_cert(-80, 80);
    auto b = seeded_perturbation(2, -80, 79, delta, 4);
    FixedPointOptions opts;
    auto rep = verify_roughness(cert, b, -4, 4, default_execution_mode(), opts);
    CHECK(rep.predicted.rho_delta == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(rep.pass);
}

TEST_CASE("inadmissible perturbations are refused") {
    auto cert = s1_cert(-20, 20);
    auto b = seeded_perturbation(2, -20, 19, 0.4, 2);  // rho*delta = 1.2
    try {
        verify_roughness(cert, b, -5, 5);
        FAIL("expected NotAdmissible");
    } catch (const DichotomyError& e) {
        CHECK(e.code() == ErrorCode::NotAdmissible);
    }
}

TEST_CASE("half-line roughness goes through the embedding") {
    const auto& fx = fixture("S1");
    ProjectionFamily half = ProjectionFamily::constant(Interval::half_plus(0),
                                                       *fx.known_projection);
    DichotomyCertificate cert{fx.sequence, half, Form::formA(1.0, kLn2),
                              Interval::finite(0, 60), {}};
    auto b = seeded_perturbation(2, 0, 59, 0.01, 9);
    auto rep = verify_roughness(cert, b, 5, 40);
    CHECK(rep.pass);
}

TEST_CASE("roughness on a seeded oblique fixture") {
    auto fx = testutil::make_random_fixture(31, false, -20, 20);
    EstimateOptions opts;
    auto cert = estimate_constants(fx.seq, fx.family, -20, 20, opts).certificate;
    const double rho =
        cert.form.L * (1.0 + std::exp(-cert.form.alpha)) / (1.0 - std::exp(-cert.form.alpha));
    const double delta = 0.2 / rho;
    auto b = seeded_perturbation(fx.n, -20, 19, delta, 14);
    auto rep = verify_roughness(cert, b, -6, 6);
    CHECK(rep.pass);
}

TEST_CASE("ode_constants formulas") {
    auto z = ode_constants(1.0, 1.0, 0.0);
    REQUIRE(z.admissible);
    CHECK(z.beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z.l == doctest::Approx(1.0).epsilon(1e-14));

    auto c = ode_constants(1.0, 1.0, 0.1);
    auto hp = oracle::ode_constants(1.0L, 1.0L, 0.1L);
    REQUIRE(c.admissible);
    CHECK(c.beta == doctest::Approx(0.894427190999916).epsilon(1e-12));
    CHECK(c.beta == doctest::Approx(static_cast<double>(hp.beta)).epsilon(1e-14));
    CHECK(c.l == doctest::Approx(static_cast<double>(hp.l)).epsilon(1e-14));
    CHECK(c.qp_bound == doctest::Approx(static_cast<double>(hp.qp)).epsilon(1e-14));

    CHECK(!ode_constants(1.0, 1.0, 0.5).admissible);  // 2K delta / alpha = 1
}
