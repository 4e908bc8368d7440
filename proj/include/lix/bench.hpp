#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lix/engines.hpp"
#include "lix/keyset.hpp"
#include "lix/workload_gen.hpp"

namespace lix {

// One benchmark CSV row: a single (dataset, workload, engine config, seed)
// measurement pass.
struct BenchRecord {
    std::string dataset;
    std::string workload;
    std::uint64_t seed = 0;
    std::string family;
    std::string config;
    std::size_t n = 0;
    std::size_t queries = 0;
    double build_ms = 0.0;
    std::size_t index_bytes = 0; // model + directory, excludes the sorted array
    std::size_t directory_bytes = 0;
    std::size_t repair_program_bytes = 0;
    std::size_t atoms = 0;
    double mean_ns = 0.0;
    double p95_ns = 0.0;
    double avg_repair = 0.0;
    double avg_route = 0.0;
    double avg_window = 0.0;
    std::size_t fallbacks = 0;
    bool ratio_defined = false;
    double entropy_ratio = 0.0;
    double support = 0.0;
    std::uint64_t checksum = 0; // FNV-1a over the returned rank sequence
};

struct BenchConfig {
    std::vector<WorkloadKind> workloads = {WorkloadKind::UniformHits,  WorkloadKind::Misses,
                                           WorkloadKind::Mixed,        WorkloadKind::ZipfHits,
                                           WorkloadKind::HotspotHits,  WorkloadKind::Gaps};
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::size_t queries = 200000;
    std::size_t warmup = 1000;
    std::size_t latency_sample = 20000; // prefix of the measured stream
    std::vector<std::uint64_t> epsilons = {32, 128, 512};
    std::vector<std::size_t> shadow_budgets = {256, 1024};
    unsigned radix_bits = 18;
    std::size_t shadow_profile_samples = 8192;
    double zipf_s = 0.99;
    double hotspot_mass = 0.9;
    double hotspot_width = 0.1;
    bool with_binary = true;
    bool with_pla = true;
    bool with_rs = true;
    bool with_shadow = true;
};

// Runs the full grid over one dataset. Aborts with integrity_error when any
// engine's rank checksum diverges from the binary-search oracle.
std::vector<BenchRecord> run_benchmark(const KeySet& ks, const std::string& dataset_name,
                                       const BenchConfig& cfg);

std::uint64_t fnv1a64(std::uint64_t h, std::uint64_t value);

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& rows);
std::vector<BenchRecord> read_bench_csv(std::istream& is); // rejects unknown schema versions

// Resolves a dataset argument: either a known SOSD file under data_dir or a
// synthetic spec "synth:<kind>:<n>[:<seed>]".
KeySet resolve_dataset(const std::string& name, const std::string& data_dir, bool verify_md5);

} // namespace lix
