#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lix/keyset.hpp"
#include "lix/workload.hpp"

namespace lix {

enum class WorkloadKind { UniformHits, Misses, Mixed, ZipfHits, HotspotHits, Gaps };

WorkloadKind parse_workload_kind(const std::string& name);
std::string workload_kind_name(WorkloadKind kind);
const std::vector<std::string>& all_workload_names();

// Deterministic query-stream spec: the same spec and key set produce a
// byte-identical stream. The PRNG is splitmix64 seeded by (seed, kind tag).
struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::UniformHits;
    std::size_t queries = 200000;
    std::uint64_t seed = 1;
    double zipf_s = 0.99;      // zipf_hits exponent
    double hotspot_mass = 0.9; // hotspot_hits: fraction of queries in the window
    double hotspot_width = 0.1; // window as a fraction of n, anchored at 0.45 n
};

std::vector<Key> gen_workload(const WorkloadSpec& spec, const KeySet& ks);

// Aggregates a query stream into a finite empirical workload.
Workload empirical_workload(const std::vector<Key>& queries);

// splitmix64: the documented 64-bit splittable generator behind every stream.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform double in [0, 1)
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }
};

// Built-in desk-scale synthetic datasets: uniform, seglin (piecewise-linear
// rank curve), lognormal (lognormally spaced gaps).
KeySet synthetic_dataset(const std::string& kind, std::size_t n, std::uint64_t seed = 13);

} // namespace lix
