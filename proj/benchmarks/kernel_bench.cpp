// Compares the serial reference kernels against their OpenMP counterparts:
// the per-interval chord-cost precompute behind the exact evaluator and the
// per-leaf profile-curve sweep behind the shadow builder. Results must match
// exactly; this binary reports wall times and verifies equality.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lix/keyset.hpp"
#include "lix/profile.hpp"
#include "lix/residual.hpp"
#include "lix/sosd.hpp"
#include "lix/workload_gen.hpp"

using namespace lix;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

bool bench_interval_costs(std::size_t n) {
    KeySet inst = extract_keys(synthetic_dataset("lognormal", n * 64, 3), n);
    WorkloadSpec spec;
    spec.kind = WorkloadKind::UniformHits;
    spec.queries = 50000;
    Workload w = empirical_workload(gen_workload(spec, inst));
    std::vector<double> weights(inst.size(), 0.0);
    for (const auto& [q, p] : w.support()) weights[inst.rank(q) - 1] += p;

    auto t0 = std::chrono::steady_clock::now();
    IntervalCosts serial = interval_costs_serial(inst, weights, {16});
    double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    IntervalCosts parallel = interval_costs_parallel(inst, weights, {16});
    double tp = seconds_since(t0);

    bool same = serial.chord_rgap == parallel.chord_rgap && serial.chord_gap == parallel.chord_gap;
    std::printf("interval-costs   n=%-8zu serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                inst.size(), ts, tp, ts / tp, same ? "identical" : "MISMATCH");
    return same;
}

bool bench_profile_curves(std::size_t n, std::size_t leaves) {
    KeySet ks = synthetic_dataset("lognormal", n, 5);
    Partition pi = Partition::equal_count(ks, leaves);
    std::uint64_t max_r = 0;
    for (const auto& leaf : pi.leaves()) max_r = std::max(max_r, rank_diameter(ks, leaf));
    auto grid = pow2_radius_grid(max_r);

    auto t0 = std::chrono::steady_clock::now();
    auto serial = profile_curves_serial(ks, pi, grid, true, 8192);
    double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto parallel = profile_curves_parallel(ks, pi, grid, true, 8192);
    double tp = seconds_since(t0);

    bool same = serial.size() == parallel.size();
    for (std::size_t j = 0; same && j < serial.size(); ++j)
        same = serial[j].points == parallel[j].points;
    std::printf("profile-curves   n=%-8zu serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                ks.size(), ts, tp, ts / tp, same ? "identical" : "MISMATCH");
    return same;
}

} // namespace

int main(int argc, char** argv) {
    bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    std::printf("OpenMP threads: %d\n", threads());
    bool ok = true;
    if (quick) {
        ok &= bench_interval_costs(256);
        ok &= bench_profile_curves(100000, 64);
    } else {
        ok &= bench_interval_costs(1024);
        ok &= bench_interval_costs(2048);
        ok &= bench_profile_curves(1000000, 1024);
        ok &= bench_profile_curves(4000000, 4096);
    }
    return ok ? 0 : 1;
}
