// Timing comparison of the serial reference kernels against the OpenMP
// paths: the certificate pair sweep, the perturbed-projection family, and
// the finite-time window scan. Both paths produce identical reports; this
// binary only measures.

#include <chrono>
#include <cstdio>
#include <cmath>

#include "dichotomy/finitetime.hpp"
#include "dichotomy/roughness.hpp"
#include "dichotomy/verify.hpp"

using namespace dichotomy;
using Clock = std::chrono::steady_clock;

namespace {

double run_ms(void (*fn)(ExecutionMode), ExecutionMode mode) {
    const auto t0 = Clock::now();
    fn(mode);
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

DichotomyCertificate s1_cert(long long lo, long long hi) {
    const auto& fx = fixture("S1");
    return {fx.sequence,
            ProjectionFamily::constant(Interval::whole(), *fx.known_projection),
            Form::formA(1.0, std::log(2.0)), Interval::finite(lo, hi), {}};
}

void bench_sweep(ExecutionMode mode) {
    auto cert = s1_cert(-400, 400);
    verify_certificate(cert, -400, 400, {}, mode);
}

void bench_roughness(ExecutionMode mode) {
    auto cert = s1_cert(-200, 200);
    auto b = seeded_perturbation(2, -200, 199, 0.01, 99);
    verify_roughness(cert, b, -120, 120, mode);
}

void bench_finite_time(ExecutionMode mode) {
    const auto& fx = fixture("S1");
    FiniteTimeHypothesis hyp;
    hyp.window_n = 40;
    hyp.density_gap = 1;
    hyp.k_const = 1.0;
    hyp.alpha = std::log(2.0);
    hyp.coeff_bound = 2.0;
    hyp.kbar = 5.0;
    hyp.beta_bar = 0.6;
    for (long long a = -200; a + 40 <= 200; ++a) hyp.base_points.push_back(a);
    finite_time_check(fx.sequence, hyp, -200, 200, mode);
}

void report(const char* name, void (*fn)(ExecutionMode)) {
    fn(ExecutionMode::Serial);  // warm caches
    const double serial = run_ms(fn, ExecutionMode::Serial);
    const double parallel = run_ms(fn, ExecutionMode::Parallel);
    std::printf("%-28s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n", name, serial,
                parallel, serial / parallel);
}

}  // namespace

int main() {
    std::printf("threads: %d (OpenMP %s)\n", max_threads(), openmp_enabled() ? "on" : "off");
    report("pair sweep [-400,400]", bench_sweep);
    report("roughness family (241 pts)", bench_roughness);
    report("finite-time scan (321 wins)", bench_finite_time);
    return 0;
}
