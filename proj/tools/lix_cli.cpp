// lix: routed atom-budgeted learned-index toolkit.
//
// Subcommands: profile, allocate, exact-param, bench, diagnose, dynamic-sim,
// aggregate, synth. See README.md for worked examples.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "lix/aggregate.hpp"
#include "lix/alloc.hpp"
#include "lix/bench.hpp"
#include "lix/directory.hpp"
#include "lix/dynamic.hpp"
#include "lix/engines.hpp"
#include "lix/errors.hpp"
#include "lix/keyset.hpp"
#include "lix/profile.hpp"
#include "lix/residual.hpp"
#include "lix/sosd.hpp"
#include "lix/workload_gen.hpp"

namespace {

using namespace lix;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open output file: " + path);
    return out;
}

std::ostream& out_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file = open_out(path);
    return file;
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

int cmd_profile(const std::string& dataset, const std::string& data_dir, bool verify_md5,
                std::size_t leaves, std::size_t sample_cap, bool greedy,
                const std::string& out_path) {
    KeySet ks = resolve_dataset(dataset, data_dir, verify_md5);
    Partition pi = Partition::equal_count(ks, std::min(leaves, ks.size()));
    std::uint64_t max_r = 0;
    for (const auto& leaf : pi.leaves()) max_r = std::max(max_r, rank_diameter(ks, leaf));
    auto curves = profile_curves_parallel(ks, pi, pow2_radius_grid(max_r), greedy, sample_cap);
    std::ofstream file;
    write_profile_csv(out_or_stdout(file, out_path), curves);
    std::fprintf(stderr, "profiled %zu leaves over %zu keys\n", pi.leaf_count(), ks.size());
    return 0;
}

// ---------------------------------------------------------------------------
// allocate
// ---------------------------------------------------------------------------

struct LeafSpecs {
    std::vector<ProfileCurve> profiles;
    std::vector<double> masses;
};

LeafSpecs read_leaf_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open leaf spec: " + path);
    std::string header;
    while (std::getline(in, header) && (header.empty() || header[0] == '#')) {
    }
    LeafSpecs specs;
    std::string line;
    if (header == "p,kappa,R,alpha") {
        std::size_t id = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            PowerLawLeaf leaf;
            char c;
            ss >> leaf.mass >> c >> leaf.hardness >> c >> leaf.rank_diam >> c >> leaf.alpha;
            specs.profiles.push_back(powerlaw_profile(leaf, id++));
            specs.masses.push_back(leaf.mass);
        }
        double total = 0.0;
        for (double m : specs.masses) total += m;
        for (double& m : specs.masses) m /= total;
        return specs;
    }
    bool with_mass = header == "interval_id,delta,atoms,mass";
    // the bare profile-curve CSV is accepted too, with uniform leaf masses
    if (with_mass || header == "interval_id,delta,atoms,certified") {
        std::map<std::size_t, ProfileCurve> curves;
        std::map<std::size_t, double> masses;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::size_t id, atoms;
            std::uint64_t delta;
            double tail;
            char c;
            ss >> id >> c >> delta >> c >> atoms >> c >> tail;
            curves[id].interval_id = id;
            curves[id].points.emplace_back(delta, atoms);
            masses[id] = with_mass ? tail : 1.0;
        }
        for (auto& [id, pc] : curves) {
            std::sort(pc.points.begin(), pc.points.end());
            pc.rank_diam = pc.points.back().first; // last grid entry is the diameter
            specs.profiles.push_back(pc);
            specs.masses.push_back(masses[id]);
        }
        double total = 0.0;
        for (double m : specs.masses) total += m;
        for (double& m : specs.masses) m /= total;
        return specs;
    }
    throw data_error(
        "leaf spec header must be 'p,kappa,R,alpha', 'interval_id,delta,atoms,mass', or a "
        "profile CSV");
}

int cmd_allocate(const std::string& spec_path, std::size_t budget, const std::string& out_path) {
    LeafSpecs specs = read_leaf_specs(spec_path);
    Allocation alloc = greedy_allocate(specs.profiles, specs.masses, budget);
    double def = deficiency(specs.profiles, specs.masses, budget);

    std::ofstream file;
    std::ostream& os = out_or_stdout(file, out_path);
    os << "# lix-alloc-csv v1\n";
    os.precision(12);
    os << "# budget=" << alloc.budget << " atoms_used=" << alloc.atoms_used
       << " routing_entropy_bits=" << alloc.routing_entropy_bits
       << " repair_bits=" << alloc.repair_bits << "\n";
    os << "# lambda=" << alloc.lambda << " dual_bound_bits=" << alloc.dual_bound_bits
       << " deficiency_bits=" << def << "\n";
    os << "leaf,mass,delta,atoms\n";
    for (std::size_t j = 0; j < alloc.per_leaf.size(); ++j)
        os << j << ',' << specs.masses[j] << ',' << alloc.per_leaf[j].delta << ','
           << alloc.per_leaf[j].atoms << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// exact-param
// ---------------------------------------------------------------------------

int cmd_exact_param(const std::string& dataset, const std::string& data_dir, bool verify_md5,
                    std::vector<std::string> workloads, std::size_t queries, std::size_t quantum,
                    std::vector<std::size_t> budgets, std::uint64_t seed, double zipf_s,
                    double hotspot_mass, double hotspot_width, const std::string& out_path) {
    KeySet full = resolve_dataset(dataset, data_dir, verify_md5);
    KeySet inst = extract_keys(full, 1024);
    if (workloads.empty()) workloads = {"uniform_hits", "hotspot_hits", "zipf_hits"};

    std::ofstream file;
    std::ostream& os = out_or_stdout(file, out_path);
    os << "# lix-exact-param-csv v1 keys=" << inst.size() << " queries=" << queries
       << " quantum=" << quantum << "\n";
    os << "dataset,workload,budget,rgap_bits,gap_bits,rgap_atoms,gap_atoms,program_nodes\n";
    os.precision(10);

    for (const auto& wname : workloads) {
        WorkloadSpec spec;
        spec.kind = parse_workload_kind(wname);
        spec.queries = queries;
        spec.seed = seed;
        spec.zipf_s = zipf_s;
        spec.hotspot_mass = hotspot_mass;
        spec.hotspot_width = hotspot_width;
        Workload w = empirical_workload(gen_workload(spec, inst));

        EvalConfig cfg;
        cfg.transcript.quantum = quantum;
        cfg.budgets = budgets;
        EvalResult r = exact_eval(inst, w, cfg);
        for (const auto& br : r.per_budget) {
            os << dataset << ',' << workload_kind_name(spec.kind) << ',' << br.budget << ','
               << br.rgap_bits << ',' << br.gap_bits << ',' << br.rgap_selection.atoms << ','
               << br.gap_selection.atoms << ',' << br.program_nodes << '\n';
        }
        std::fprintf(stderr, "%s/%s: answer entropy %.4f bits\n", dataset.c_str(), wname.c_str(),
                     r.answer_entropy_bits);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench / diagnose
// ---------------------------------------------------------------------------

int cmd_bench(const std::string& dataset, const std::string& data_dir, bool verify_md5,
              std::vector<std::string> workload_names, std::size_t queries,
              std::vector<std::uint64_t> seeds, std::vector<std::uint64_t> epsilons,
              std::vector<std::size_t> budgets, unsigned radix_bits, double zipf_s,
              double hotspot_mass, double hotspot_width, bool shadow_only,
              const std::string& out_path) {
    KeySet ks = resolve_dataset(dataset, data_dir, verify_md5);
    BenchConfig cfg;
    cfg.queries = queries;
    cfg.seeds = seeds;
    cfg.epsilons = epsilons;
    cfg.shadow_budgets = budgets;
    cfg.radix_bits = radix_bits;
    cfg.zipf_s = zipf_s;
    cfg.hotspot_mass = hotspot_mass;
    cfg.hotspot_width = hotspot_width;
    if (shadow_only) cfg.with_pla = cfg.with_rs = false;
    if (!workload_names.empty()) {
        cfg.workloads.clear();
        for (const auto& n : workload_names) cfg.workloads.push_back(parse_workload_kind(n));
    }
    auto rows = run_benchmark(ks, dataset, cfg);
    std::ofstream file;
    write_bench_csv(out_or_stdout(file, out_path), rows);
    std::fprintf(stderr, "wrote %zu benchmark rows\n", rows.size());
    return 0;
}

int cmd_diagnose(const std::string& dataset, const std::string& data_dir, bool verify_md5,
                 std::vector<std::string> workload_names, std::size_t queries,
                 std::vector<std::size_t> budgets, unsigned radix_bits,
                 const std::string& out_path) {
    KeySet ks = resolve_dataset(dataset, data_dir, verify_md5);
    BenchConfig cfg;
    cfg.queries = queries;
    cfg.seeds = {1};
    cfg.shadow_budgets = budgets;
    cfg.radix_bits = radix_bits;
    cfg.with_binary = cfg.with_pla = cfg.with_rs = false;
    if (!workload_names.empty()) {
        cfg.workloads.clear();
        for (const auto& n : workload_names) cfg.workloads.push_back(parse_workload_kind(n));
    }
    auto rows = run_benchmark(ks, dataset, cfg);
    std::ofstream file;
    std::ostream& os = out_or_stdout(file, out_path);
    os << "# lix-diagnose-csv v1 coarsening=(leaf,pow2(window))\n";
    os << "dataset,workload,config,entropy_ratio,support,avg_window\n";
    os.precision(6);
    for (const auto& r : rows) {
        os << r.dataset << ',' << r.workload << ',' << r.config << ',';
        if (r.ratio_defined)
            os << r.entropy_ratio;
        else
            os << "NA";
        os << ',' << r.support << ',' << r.avg_window << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// dynamic-sim
// ---------------------------------------------------------------------------

int cmd_dynamic_sim(std::size_t ops, std::size_t beta, std::uint64_t seed, Key key_space) {
    DynamicIndex dyn(beta);
    std::set<Key> oracle;
    SplitMix64 rng(seed ^ 0xd15c0b01ull);
    std::size_t mismatches = 0, inserts = 0, erases = 0, queries = 0;
    for (std::size_t i = 0; i < ops; ++i) {
        Key k = rng.next_below(key_space);
        switch (rng.next_below(3)) {
            case 0: {
                bool a = dyn.insert(k);
                bool b = oracle.insert(k).second;
                if (a != b) ++mismatches;
                ++inserts;
                break;
            }
            case 1: {
                bool a = dyn.erase(k);
                bool b = oracle.erase(k) > 0;
                if (a != b) ++mismatches;
                ++erases;
                break;
            }
            default: {
                std::size_t got = dyn.rank(k);
                std::size_t expect = static_cast<std::size_t>(
                    std::distance(oracle.begin(), oracle.upper_bound(k)));
                if (got != expect) ++mismatches;
                ++queries;
                break;
            }
        }
    }
    double logb = std::log(static_cast<double>(std::max<std::size_t>(ops, 2))) /
                  std::log(static_cast<double>(beta));
    std::printf("ops=%zu inserts=%zu erases=%zu queries=%zu live=%zu levels=%zu\n", ops, inserts,
                erases, queries, dyn.live_size(), dyn.level_count());
    std::printf("rebuild_steps=%llu bound(8*beta*log_beta(N)*N)=%.0f mismatches=%zu\n",
                static_cast<unsigned long long>(dyn.rebuild_steps()),
                8.0 * static_cast<double>(beta) * logb * static_cast<double>(ops), mismatches);
    return mismatches == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// aggregate / synth
// ---------------------------------------------------------------------------

int cmd_aggregate(const std::vector<std::string>& csv_paths, const std::string& out_dir) {
    std::vector<BenchRecord> rows;
    for (const auto& p : csv_paths) {
        std::ifstream in(p);
        if (!in) throw data_error("cannot open csv: " + p);
        auto part = read_bench_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    AggregateOutput out = aggregate(rows);
    if (out_dir.empty()) {
        std::cout << out.main_table << '\n'
                  << out.stress_table << '\n'
                  << out.diagnostics_table << '\n'
                  << out.overhead_table << '\n'
                  << out.correlation_table;
        return 0;
    }
    auto dump = [&](const std::string& name, const std::string& body) {
        std::ofstream f = open_out(out_dir + "/" + name);
        f << body;
    };
    dump("table_main.txt", out.main_table);
    dump("table_stress.txt", out.stress_table);
    dump("table_diagnostics.txt", out.diagnostics_table);
    dump("table_overhead.txt", out.overhead_table);
    dump("table_correlation.txt", out.correlation_table);
    return 0;
}

int cmd_synth(const std::string& kind, std::size_t n, std::uint64_t seed, unsigned width,
              const std::string& out_path) {
    KeySet ks = synthetic_dataset(kind, n, seed);
    write_sosd(out_path, ks.keys(), width);
    std::fprintf(stderr, "wrote %zu keys to %s\n", ks.size(), out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"routed atom-budgeted learned-index toolkit"};
    app.require_subcommand(1);

    std::string dataset = "synth:uniform:1000000";
    std::string data_dir;
    std::string out_path;
    bool verify_md5 = false;
    std::size_t queries = 200000;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::vector<std::uint64_t> epsilons = {32, 128, 512};
    std::vector<std::size_t> budgets = {256, 1024};
    unsigned radix_bits = 18;
    std::size_t quantum = 16;
    double zipf_s = 0.99, hotspot_mass = 0.9, hotspot_width = 0.1;
    std::vector<std::string> workloads;

    auto add_common = [&](CLI::App* cmd, bool with_workloads = true) {
        cmd->add_option("--dataset", dataset,
                        "SOSD file name or synth:<kind>:<n>[:<seed>] (kinds: uniform, seglin, "
                        "lognormal)");
        cmd->add_option("--data-dir", data_dir, "directory holding SOSD files");
        cmd->add_flag("--verify-md5", verify_md5, "check dataset digests before use");
        cmd->add_option("--out", out_path, "output file (default stdout)");
        if (with_workloads)
            cmd->add_option("--workload", workloads, "workload kinds (default per subcommand)");
    };

    auto* profile_cmd = app.add_subcommand("profile", "emit certified profile curves as CSV");
    std::size_t profile_leaves = 64, profile_samples = 0;
    bool profile_greedy = false;
    add_common(profile_cmd, false);
    profile_cmd->add_option("--leaves", profile_leaves, "equal-count leaves to profile");
    profile_cmd->add_option("--samples", profile_samples,
                            "sampled control points per leaf (0 = certified)");
    profile_cmd->add_flag("--greedy", profile_greedy, "greedy cover upper bound instead of DP");

    auto* alloc_cmd =
        app.add_subcommand("allocate", "shadow-price allocation with a dual certificate");
    std::string alloc_spec;
    std::size_t alloc_budget = 256;
    alloc_cmd->add_option("--spec", alloc_spec, "leaf-spec CSV (p,kappa,R,alpha or profile rows)")
        ->required();
    alloc_cmd->add_option("--budget", alloc_budget, "atom budget");
    alloc_cmd->add_option("--out", out_path, "output file (default stdout)");

    auto* exact_cmd = app.add_subcommand("exact-param", "exact finite-instance RGap/Gap table");
    std::vector<std::size_t> exact_budgets = {0, 4, 8, 16, 32, 64, 128};
    std::uint64_t exact_seed = 1;
    std::size_t exact_queries = 50000;
    add_common(exact_cmd);
    exact_cmd->add_option("--queries", exact_queries, "workload draws");
    exact_cmd->add_option("--budget", exact_budgets, "atom budgets");
    exact_cmd->add_option("--quantum", quantum, "rank quantum Q");
    exact_cmd->add_option("--seed", exact_seed, "workload seed");
    exact_cmd->add_option("--zipf-s", zipf_s, "zipf exponent");
    exact_cmd->add_option("--hotspot-mass", hotspot_mass, "hotspot mass fraction");
    exact_cmd->add_option("--hotspot-width", hotspot_width, "hotspot width fraction");

    auto* bench_cmd = app.add_subcommand("bench", "comparison-metered benchmark grid");
    bool shadow_only = false;
    add_common(bench_cmd);
    bench_cmd->add_option("--queries", queries, "measured queries per configuration");
    bench_cmd->add_option("--seeds", seeds, "query stream seeds");
    bench_cmd->add_option("--epsilon", epsilons, "pla/rs error grid");
    bench_cmd->add_option("--budget", budgets, "shadow atom budgets");
    bench_cmd->add_option("--radix-bits", radix_bits, "radix table bits");
    bench_cmd->add_option("--zipf-s", zipf_s, "zipf exponent");
    bench_cmd->add_option("--hotspot-mass", hotspot_mass, "hotspot mass fraction");
    bench_cmd->add_option("--hotspot-width", hotspot_width, "hotspot width fraction");
    bench_cmd->add_flag("--shadow-only", shadow_only, "skip the pla/rs baselines");

    auto* diag_cmd = app.add_subcommand("diagnose", "rank-spread trace diagnostics");
    add_common(diag_cmd);
    diag_cmd->add_option("--queries", queries, "measured queries per configuration");
    diag_cmd->add_option("--budget", budgets, "shadow atom budgets");
    diag_cmd->add_option("--radix-bits", radix_bits, "radix table bits");

    auto* dyn_cmd = app.add_subcommand("dynamic-sim", "levelled-index replay against an oracle");
    std::size_t dyn_ops = 100000, dyn_beta = 2;
    std::uint64_t dyn_seed = 1;
    Key dyn_space = 1u << 20;
    dyn_cmd->add_option("--ops", dyn_ops, "operation count");
    dyn_cmd->add_option("--beta", dyn_beta, "branching parameter");
    dyn_cmd->add_option("--seed", dyn_seed, "op stream seed");
    dyn_cmd->add_option("--key-space", dyn_space, "key universe size");

    auto* agg_cmd = app.add_subcommand("aggregate", "render benchmark CSVs as tables");
    std::vector<std::string> agg_paths;
    std::string agg_out_dir;
    agg_cmd->add_option("csv", agg_paths, "benchmark CSV files")->required();
    agg_cmd->add_option("--out", agg_out_dir, "output directory (default stdout)");

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic SOSD file");
    std::string synth_kind = "uniform";
    std::size_t synth_n = 1000000;
    std::uint64_t synth_seed = 13;
    unsigned synth_width = 8;
    synth_cmd->add_option("--kind", synth_kind, "uniform | seglin | lognormal");
    synth_cmd->add_option("--n", synth_n, "key count");
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--width", synth_width, "value width in bytes (4 or 8)");
    synth_cmd->add_option("--out", out_path, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (profile_cmd->parsed())
            return cmd_profile(dataset, data_dir, verify_md5, profile_leaves, profile_samples,
                               profile_greedy, out_path);
        if (alloc_cmd->parsed()) return cmd_allocate(alloc_spec, alloc_budget, out_path);
        if (exact_cmd->parsed())
            return cmd_exact_param(dataset, data_dir, verify_md5, workloads, exact_queries,
                                   quantum, exact_budgets, exact_seed, zipf_s, hotspot_mass,
                                   hotspot_width, out_path);
        if (bench_cmd->parsed())
            return cmd_bench(dataset, data_dir, verify_md5, workloads, queries, seeds, epsilons,
                             budgets, radix_bits, zipf_s, hotspot_mass, hotspot_width,
                             shadow_only, out_path);
        if (diag_cmd->parsed())
            return cmd_diagnose(dataset, data_dir, verify_md5, workloads, queries, budgets,
                                radix_bits, out_path);
        if (dyn_cmd->parsed()) return cmd_dynamic_sim(dyn_ops, dyn_beta, dyn_seed, dyn_space);
        if (agg_cmd->parsed()) return cmd_aggregate(agg_paths, agg_out_dir);
        if (synth_cmd->parsed())
            return cmd_synth(synth_kind, synth_n, synth_seed, synth_width, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
