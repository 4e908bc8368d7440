#include "lix/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "lix/errors.hpp"
#include "lix/residual.hpp"
#include "lix/sosd.hpp"

namespace lix {

std::uint64_t fnv1a64(std::uint64_t h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kTrainSeedOffset = 1000;

struct EngineRun {
    std::string family;
    std::string config;
    const Engine* engine = nullptr;
    double build_ms = 0.0;
};

struct MeasuredPass {
    double mean_ns = 0.0, p95_ns = 0.0;
    double avg_repair = 0.0, avg_route = 0.0, avg_window = 0.0;
    std::size_t fallbacks = 0;
    std::uint64_t checksum = kFnvOffset;
    SpreadDiagnostic diag;
};

MeasuredPass measure(const Engine& engine, const KeySet& ks, const std::vector<Key>& stream,
                     std::size_t warmup, std::size_t latency_sample) {
    MeasuredPass out;
    for (std::size_t i = 0; i < warmup && i < stream.size(); ++i) (void)engine.lookup(stream[i]);

    const std::size_t measured = stream.size() > warmup ? stream.size() - warmup : 0;
    std::vector<double> sample;
    sample.reserve(std::min(measured, latency_sample));
    std::vector<TraceEntry> trace;
    trace.reserve(measured);
    double total_ns = 0.0, repair = 0.0, route = 0.0, window = 0.0;

    for (std::size_t i = warmup; i < stream.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        LookupResult r = engine.lookup(stream[i]);
        auto t1 = std::chrono::steady_clock::now();
        double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
        total_ns += ns;
        if (sample.size() < latency_sample) sample.push_back(ns);
        repair += static_cast<double>(r.metrics.repair_comparisons);
        route += static_cast<double>(r.metrics.route_comparisons);
        window += static_cast<double>(r.metrics.window);
        if (r.metrics.fallback) ++out.fallbacks;
        out.checksum = fnv1a64(out.checksum, r.rank);
        trace.push_back({r.metrics.leaf, r.metrics.window, r.metrics.certified_delta,
                         r.rank - r.metrics.leaf_first});
    }
    (void)ks;
    if (measured > 0) {
        out.mean_ns = total_ns / static_cast<double>(measured);
        out.avg_repair = repair / static_cast<double>(measured);
        out.avg_route = route / static_cast<double>(measured);
        out.avg_window = window / static_cast<double>(measured);
        std::sort(sample.begin(), sample.end());
        out.p95_ns = sample.empty() ? 0.0 : sample[sample.size() * 95 / 100];
        out.diag = spread_diagnostic(trace);
    }
    return out;
}

} // namespace

std::vector<BenchRecord> run_benchmark(const KeySet& ks, const std::string& dataset_name,
                                       const BenchConfig& cfg) {
    std::vector<BenchRecord> rows;

    // workload-independent engines are built once per dataset
    std::vector<std::pair<std::unique_ptr<Engine>, double>> static_engines;
    auto timed_build = [](auto&& builder) {
        auto t0 = std::chrono::steady_clock::now();
        std::unique_ptr<Engine> e = builder();
        auto t1 = std::chrono::steady_clock::now();
        return std::make_pair(std::move(e),
                              std::chrono::duration<double, std::milli>(t1 - t0).count());
    };
    if (cfg.with_binary) static_engines.push_back(timed_build([&] { return build_binary(ks); }));
    if (cfg.with_pla)
        for (std::uint64_t eps : cfg.epsilons)
            static_engines.push_back(timed_build([&] { return build_epsilon_pla(ks, eps); }));
    if (cfg.with_rs)
        for (std::uint64_t eps : cfg.epsilons)
            static_engines.push_back(
                timed_build([&] { return build_radix_spline(ks, eps, cfg.radix_bits); }));

    for (WorkloadKind kind : cfg.workloads) {
        WorkloadSpec base;
        base.kind = kind;
        base.queries = cfg.queries + cfg.warmup;
        base.zipf_s = cfg.zipf_s;
        base.hotspot_mass = cfg.hotspot_mass;
        base.hotspot_width = cfg.hotspot_width;

        // shadow prototypes train on a disjoint stream of the same shape
        std::vector<std::pair<std::unique_ptr<Engine>, double>> shadow_engines;
        if (cfg.with_shadow) {
            WorkloadSpec train_spec = base;
            train_spec.seed = cfg.seeds.empty() ? kTrainSeedOffset
                                                : cfg.seeds.front() + kTrainSeedOffset;
            Workload train = empirical_workload(gen_workload(train_spec, ks));
            for (std::size_t budget : cfg.shadow_budgets) {
                for (bool radix : {false, true}) {
                    ShadowConfig sc;
                    sc.budget = budget;
                    sc.radix = radix;
                    sc.radix_bits = cfg.radix_bits;
                    sc.profile_samples = cfg.shadow_profile_samples;
                    shadow_engines.push_back(
                        timed_build([&] { return build_shadow(ks, train, sc); }));
                }
            }
        }

        for (std::uint64_t seed : cfg.seeds) {
            WorkloadSpec spec = base;
            spec.seed = seed;
            std::vector<Key> stream = gen_workload(spec, ks);

            std::uint64_t oracle_checksum = kFnvOffset;
            for (std::size_t i = cfg.warmup; i < stream.size(); ++i)
                oracle_checksum = fnv1a64(oracle_checksum, ks.rank(stream[i]));

            auto run_one = [&](const Engine& engine, double build_ms) {
                MeasuredPass pass =
                    measure(engine, ks, stream, cfg.warmup, cfg.latency_sample);
                if (pass.checksum != oracle_checksum)
                    throw integrity_error("benchmark: rank checksum diverged for " +
                                          engine.config() + " on " + dataset_name + "/" +
                                          workload_kind_name(kind));
                BenchRecord r;
                r.dataset = dataset_name;
                r.workload = workload_kind_name(kind);
                r.seed = seed;
                r.family = engine.family();
                r.config = engine.config();
                r.n = ks.size();
                r.queries = cfg.queries;
                r.build_ms = build_ms;
                SizeAccount s = engine.sizes();
                r.index_bytes = s.model_bytes + s.directory_bytes;
                r.directory_bytes = s.directory_bytes;
                r.repair_program_bytes = s.repair_program_bytes;
                r.atoms = s.atoms;
                r.mean_ns = pass.mean_ns;
                r.p95_ns = pass.p95_ns;
                r.avg_repair = pass.avg_repair;
                r.avg_route = pass.avg_route;
                r.avg_window = pass.avg_window;
                r.fallbacks = pass.fallbacks;
                r.ratio_defined = pass.diag.defined;
                r.entropy_ratio = pass.diag.entropy_ratio;
                r.support = pass.diag.support;
                r.checksum = pass.checksum;
                rows.push_back(std::move(r));
            };

            for (const auto& [engine, ms] : static_engines) run_one(*engine, ms);
            for (const auto& [engine, ms] : shadow_engines) run_one(*engine, ms);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {
const char* kCsvVersion = "# lix-bench-csv v1 latency_sample=prefix";
const char* kCsvHeader =
    "dataset,workload,seed,family,config,n,queries,build_ms,index_bytes,directory_bytes,"
    "repair_program_bytes,atoms,mean_ns,p95_ns,avg_repair,avg_route,avg_window,fallbacks,"
    "entropy_ratio,support,checksum";
} // namespace

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& rows) {
    os << kCsvVersion << '\n' << kCsvHeader << '\n';
    os.precision(17);
    for (const auto& r : rows) {
        os << r.dataset << ',' << r.workload << ',' << r.seed << ',' << r.family << ','
           << r.config << ',' << r.n << ',' << r.queries << ',' << r.build_ms << ','
           << r.index_bytes << ',' << r.directory_bytes << ',' << r.repair_program_bytes << ','
           << r.atoms << ',' << r.mean_ns << ',' << r.p95_ns << ',' << r.avg_repair << ','
           << r.avg_route << ',' << r.avg_window << ',' << r.fallbacks << ',';
        if (r.ratio_defined)
            os << r.entropy_ratio;
        else
            os << "NA";
        os << ',' << r.support << ',' << r.checksum << '\n';
    }
}

std::vector<BenchRecord> read_bench_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvVersion)
        throw data_error("bench csv: unknown schema version: " + line);
    if (!std::getline(is, line) || line != kCsvHeader)
        throw data_error("bench csv: unexpected header row");
    std::vector<BenchRecord> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> fields;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 21) throw data_error("bench csv: malformed row: " + line);
        BenchRecord r;
        std::size_t i = 0;
        r.dataset = fields[i++];
        r.workload = fields[i++];
        r.seed = std::stoull(fields[i++]);
        r.family = fields[i++];
        r.config = fields[i++];
        r.n = std::stoull(fields[i++]);
        r.queries = std::stoull(fields[i++]);
        r.build_ms = std::stod(fields[i++]);
        r.index_bytes = std::stoull(fields[i++]);
        r.directory_bytes = std::stoull(fields[i++]);
        r.repair_program_bytes = std::stoull(fields[i++]);
        r.atoms = std::stoull(fields[i++]);
        r.mean_ns = std::stod(fields[i++]);
        r.p95_ns = std::stod(fields[i++]);
        r.avg_repair = std::stod(fields[i++]);
        r.avg_route = std::stod(fields[i++]);
        r.avg_window = std::stod(fields[i++]);
        r.fallbacks = std::stoull(fields[i++]);
        if (fields[i] == "NA") {
            r.ratio_defined = false;
            ++i;
        } else {
            r.ratio_defined = true;
            r.entropy_ratio = std::stod(fields[i++]);
        }
        r.support = std::stod(fields[i++]);
        r.checksum = std::stoull(fields[i++]);
        rows.push_back(std::move(r));
    }
    return rows;
}

KeySet resolve_dataset(const std::string& name, const std::string& data_dir, bool verify_md5) {
    if (name.rfind("synth:", 0) == 0) {
        std::stringstream ss(name.substr(6));
        std::string kind, ns, seeds;
        std::getline(ss, kind, ':');
        std::getline(ss, ns, ':');
        std::uint64_t seed = 13;
        if (std::getline(ss, seeds, ':')) seed = std::stoull(seeds);
        if (kind.empty() || ns.empty())
            throw config_error("dataset spec must look like synth:<kind>:<n>[:<seed>]");
        return synthetic_dataset(kind, std::stoull(ns), seed);
    }
    const DatasetSpec* spec = find_dataset(name);
    DatasetSpec local;
    if (!spec) {
        local.name = name; // unknown file: trust the header, skip digest
        local.value_width = name.find("uint32") != std::string::npos ? 4 : 8;
        spec = &local;
    }
    std::string path = data_dir.empty() ? name : data_dir + "/" + name;
    return ingest_sosd(path, *spec, verify_md5);
}

} // namespace lix
