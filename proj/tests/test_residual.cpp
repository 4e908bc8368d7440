#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "lix/keyset.hpp"
#include "lix/residual.hpp"
#include "lix/workload.hpp"

using namespace lix;

namespace {

// ---------------------------------------------------------------------------
// Independent brute-force oracle for the exact evaluator: enumerates every
// ordered partition (cut bitmask) and every chord subset within budget, and
// computes both objectives from first principles.
// ---------------------------------------------------------------------------

struct OracleLeaf {
    std::size_t first, count;
};

std::size_t oracle_chord_predict(const KeySet& ks, const OracleLeaf& lf, Key q) {
    Key k0 = ks[lf.first], k1 = ks[lf.first + lf.count - 1];
    Key x = q < k0 ? k0 : (q > k1 ? k1 : q);
    double r0 = static_cast<double>(lf.first + 1);
    double slope = lf.count > 1
                       ? static_cast<double>(lf.count - 1) / static_cast<double>(k1 - k0)
                       : 0.0;
    double r = r0 + slope * static_cast<double>(x - k0);
    if (!(r > 0.0)) return 0;
    if (r >= static_cast<double>(ks.size())) return ks.size();
    return static_cast<std::size_t>(std::llround(r));
}

double oracle_leaf_rgap(const KeySet& ks, const std::vector<double>& w, const OracleLeaf& lf,
                        bool chord, std::size_t quantum) {
    double p = 0.0;
    for (std::size_t t = lf.first; t < lf.first + lf.count; ++t) p += w[t];
    if (p <= 0.0) return 0.0;
    double routing = p * std::log2(1.0 / p);
    // conditional answer distribution grouped by transcript value
    std::map<std::uint64_t, std::vector<double>> groups;
    for (std::size_t t = lf.first; t < lf.first + lf.count; ++t) {
        std::uint64_t y = chord ? oracle_chord_predict(ks, lf, ks[t]) / quantum : 0;
        groups[y].push_back(w[t] / p);
    }
    double rep = 0.0;
    for (const auto& [y, probs] : groups) {
        double py = 0.0;
        for (double x : probs) py += x;
        if (py <= 0.0) continue;
        for (double x : probs)
            if (x > 0.0) rep += x * std::log2(py / x);
    }
    return routing + p * rep;
}

double oracle_leaf_gap(const KeySet& ks, const std::vector<double>& w, const OracleLeaf& lf,
                       bool chord) {
    double p = 0.0;
    for (std::size_t t = lf.first; t < lf.first + lf.count; ++t) p += w[t];
    if (p <= 0.0) return 0.0;
    std::uint64_t delta;
    if (chord) {
        delta = 0;
        for (std::size_t t = lf.first; t < lf.first + lf.count; ++t) {
            std::size_t pred = oracle_chord_predict(ks, lf, ks[t]);
            std::size_t truth = t + 1;
            delta = std::max<std::uint64_t>(delta, pred >= truth ? pred - truth : truth - pred);
        }
    } else {
        delta = lf.count + 1; // trivial rank diameter of the leaf
    }
    return p * (std::log2(1.0 / p) + std::log2(1.0 + static_cast<double>(delta)));
}

struct OracleValue {
    double rgap, gap;
};

OracleValue oracle_eval(const KeySet& ks, const std::vector<double>& w, std::size_t budget,
                        std::size_t quantum) {
    const std::size_t n = ks.size();
    OracleValue best{1e300, 1e300};
    for (std::size_t mask = 0; mask < (1u << (n - 1)); ++mask) {
        std::vector<OracleLeaf> leaves;
        std::size_t start = 0;
        for (std::size_t c = 0; c + 1 < n; ++c) {
            if (mask & (1u << c)) {
                leaves.push_back({start, c + 1 - start});
                start = c + 1;
            }
        }
        leaves.push_back({start, n - start});
        const std::size_t m = leaves.size();
        for (std::size_t cmask = 0; cmask < (1u << m); ++cmask) {
            std::size_t atoms = static_cast<std::size_t>(__builtin_popcountll(cmask));
            if (atoms > budget) continue;
            double rgap = 0.0, gap = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                bool chord = (cmask >> j) & 1;
                rgap += oracle_leaf_rgap(ks, w, leaves[j], chord, quantum);
                gap += oracle_leaf_gap(ks, w, leaves[j], chord);
            }
            best.rgap = std::min(best.rgap, rgap);
            best.gap = std::min(best.gap, gap);
        }
    }
    return best;
}

KeySet linear_keys(std::size_t n, Key step = 7, Key base = 100) {
    std::vector<Key> keys;
    for (std::size_t i = 0; i < n; ++i) keys.push_back(base + step * i);
    return KeySet::from_sorted(keys);
}

} // namespace

TEST_CASE("transcripts") {
    KeySet ks = linear_keys(64);
    LeafInterval leaf;
    leaf.count = 64;
    leaf.has_hi = false;

    // exact chord, Q = 1: the bucket determines the answer, singleton window
    TranscriptConfig q1{1};
    std::uint64_t delta = chord_delta(ks, leaf);
    CHECK(delta == 0);
    for (std::size_t t = 0; t < 10; ++t) {
        Transcript y = transcript_of(ks, leaf, true, delta, q1, ks[t]);
        CHECK(y.window_lo == y.window_hi);
        CHECK(y.window_lo == t + 1);
    }

    // Q = 16 groups predictions 0..15 into one bucket
    TranscriptConfig q16{16};
    Transcript a = transcript_of(ks, leaf, true, delta, q16, ks[2]);
    Transcript b = transcript_of(ks, leaf, true, delta, q16, ks[10]);
    CHECK(a.bucket == b.bucket);

    // chord buckets partition the keys of the leaf
    std::map<std::uint64_t, std::size_t> counts;
    for (std::size_t t = 0; t < 64; ++t)
        counts[transcript_of(ks, leaf, true, delta, q16, ks[t]).bucket]++;
    std::size_t total = 0;
    for (const auto& [y, c] : counts) total += c;
    CHECK(total == 64);
    CHECK(counts.size() >= 4); // 65 rank values over quantum 16

    // window always contains the true answer
    for (std::size_t t = 0; t < 64; ++t) {
        Transcript y = transcript_of(ks, leaf, true, delta, q16, ks[t]);
        CHECK(y.window_lo <= t + 1);
        CHECK(y.window_hi >= t + 1);
    }
}

TEST_CASE("rep_entropy") {
    // exact predictor: zero residual entropy
    KeySet lin = linear_keys(32);
    LeafInterval whole;
    whole.count = 32;
    Workload uw = Workload::uniform_over(lin);
    CHECK(rep_entropy(lin, whole, true, {1}, uw) == doctest::Approx(0.0));

    // empty predictor, uniform over 4 ranks: exactly 2 bits
    KeySet four = KeySet::from_sorted({50, 60, 70, 80});
    LeafInterval f;
    f.count = 4;
    CHECK(rep_entropy(four, f, false, {16}, Workload::uniform_over(four)) ==
          doctest::Approx(2.0));

    // running example I2: ranks 5..8 near-uniform under the empty predictor
    KeySet ex = KeySet::from_sorted({10, 20, 30, 40, 50, 60, 70, 80});
    LeafInterval i2;
    i2.has_lo = true;
    i2.lo = 45;
    i2.first = 4;
    i2.count = 4;
    Workload wq = Workload::from_points({{50, 0.26}, {60, 0.25}, {70, 0.25}, {80, 0.24}});
    double rep = rep_entropy(ex, i2, false, {16}, wq);
    CHECK(rep == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("parallel interval costs equal the serial reference") {
    std::mt19937_64 rng(17);
    std::vector<Key> raw(200);
    for (auto& k : raw) k = rng() % 100000;
    KeySet ks = KeySet::from_unsorted(raw);
    std::vector<double> w(ks.size(), 0.0);
    double tot = 0.0;
    for (auto& x : w) {
        x = static_cast<double>(rng() % 100);
        tot += x;
    }
    for (auto& x : w) x /= tot;
    auto a = interval_costs_serial(ks, w, {16});
    auto b = interval_costs_parallel(ks, w, {16});
    CHECK(a.chord_rgap == b.chord_rgap);
    CHECK(a.chord_gap == b.chord_gap);
}

TEST_CASE("exact_eval basics") {
    std::mt19937_64 rng(23);
    std::vector<Key> raw(256);
    for (auto& k : raw) k = rng() % (1u << 20);
    KeySet ks = KeySet::from_unsorted(raw);

    std::vector<std::pair<Key, double>> pts;
    for (std::size_t i = 0; i < ks.size(); ++i)
        pts.emplace_back(ks[i], static_cast<double>(1 + rng() % 50));
    Workload w = Workload::from_points(pts);

    EvalConfig cfg;
    cfg.budgets = {0, 4, 8, 16, 32};
    EvalResult r = exact_eval(ks, w, cfg);

    // RGap(0) equals the empirical answer entropy exactly
    CHECK(r.per_budget[0].rgap_bits == doctest::Approx(r.answer_entropy_bits).epsilon(1e-12));

    // both objectives nonincreasing in budget; atoms within budget
    for (std::size_t i = 1; i < r.per_budget.size(); ++i) {
        CHECK(r.per_budget[i].rgap_bits <= r.per_budget[i - 1].rgap_bits + 1e-12);
        CHECK(r.per_budget[i].gap_bits <= r.per_budget[i - 1].gap_bits + 1e-12);
        CHECK(r.per_budget[i].rgap_selection.atoms <= r.per_budget[i].budget);
    }

    // program nodes account one attainable answer per instance key
    for (const auto& br : r.per_budget) CHECK(br.program_nodes == ks.size());

    // complexity guard
    EvalConfig guard;
    guard.max_keys = 100;
    CHECK_THROWS_AS(exact_eval(ks, w, guard), std::invalid_argument);

    // non-instance workload key rejected
    Workload bad = Workload::from_points({{3, 1.0}});
    CHECK_THROWS_AS(exact_eval(ks, bad, cfg), std::invalid_argument);
}

TEST_CASE("exact_eval equals exhaustive enumeration on small instances") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 4 + rng() % 9; // up to 12
        std::vector<Key> raw(n);
        for (auto& k : raw) k = rng() % 4000;
        KeySet ks = KeySet::from_unsorted(raw);
        std::vector<double> weights(ks.size());
        double tot = 0.0;
        for (auto& x : weights) {
            x = static_cast<double>(1 + rng() % 20);
            tot += x;
        }
        for (auto& x : weights) x /= tot;
        std::vector<std::pair<Key, double>> pts;
        for (std::size_t i = 0; i < ks.size(); ++i) pts.emplace_back(ks[i], weights[i]);
        Workload w = Workload::from_points(pts);

        std::size_t budget = rng() % 4;
        EvalConfig cfg;
        cfg.budgets = {budget};
        cfg.transcript.quantum = 1 + rng() % 16;
        EvalResult got = exact_eval(ks, w, cfg);
        OracleValue expect = oracle_eval(ks, weights, budget, cfg.transcript.quantum);
        CHECK(got.per_budget[0].rgap_bits == doctest::Approx(expect.rgap).epsilon(1e-9));
        CHECK(got.per_budget[0].gap_bits == doctest::Approx(expect.gap).epsilon(1e-9));
    }
}

TEST_CASE("repair program accounting") {
    KeySet ks = linear_keys(64);

    // exact predictor everywhere at Q=1: every K_y = 1
    Selection exact;
    exact.use_chord = {true};
    RepairProgram p1 = repair_program(ks, exact, {1});
    CHECK(p1.total_nodes == 64);
    for (const auto& e : p1.entries) CHECK(e.nodes == 1);

    // chord at Q=16 on a 64-key leaf: buckets partition the keys
    RepairProgram p16 = repair_program(ks, exact, {16});
    CHECK(p16.total_nodes == 64);
    CHECK(p16.entries.size() >= 4);

    // empty leaf: one transcript holding every attainable answer
    Selection none;
    none.use_chord = {false};
    RepairProgram pe = repair_program(ks, none, {16});
    CHECK(pe.total_nodes == 64);
    CHECK(pe.entries.size() == 1);
    CHECK(pe.entries[0].answer_ranks.front() == 1);
    CHECK(pe.entries[0].answer_ranks.back() == 64);
}

TEST_CASE("spread diagnostics") {
    // point-mass residuals: ratio 0, support 1
    std::vector<TraceEntry> point;
    for (int i = 0; i < 1000; ++i) point.push_back({0, 8, 4, 3});
    auto dp = spread_diagnostic(point);
    CHECK(dp.defined);
    CHECK(dp.entropy_ratio == doctest::Approx(0.0));
    CHECK(dp.support == doctest::Approx(1.0));

    // uniform residual over exactly 1 + delta candidates: ratio ~ 1,
    // support ~ window size
    std::mt19937_64 rng(3);
    std::vector<TraceEntry> unif;
    const std::uint64_t delta = 63;
    for (int i = 0; i < 64 * 4000; ++i)
        unif.push_back({0, delta, delta, static_cast<std::size_t>(rng() % (delta + 1))});
    auto du = spread_diagnostic(unif);
    CHECK(du.defined);
    CHECK(du.entropy_ratio >= 0.95);
    CHECK(du.entropy_ratio <= 1.05);
    CHECK(du.support >= 60.0);

    // all singleton windows: undefined marker
    std::vector<TraceEntry> singl;
    for (int i = 0; i < 10; ++i) singl.push_back({0, 0, 0, 0});
    CHECK(!spread_diagnostic(singl).defined);
}

TEST_CASE("spread surrogate bounds") {
    // zero residual entropy at a wide radius: flagged spread failure
    auto zero = spread_surrogate_bounds(0.0, 4);
    CHECK(zero.within_bounds);
    CHECK(zero.spread_failure);

    // uniform residual: rep = log2(window), not flagged
    auto unif = spread_surrogate_bounds(std::log2(9.0), 4);
    CHECK(unif.within_bounds);
    CHECK(!unif.spread_failure);

    // out-of-range rep rejected
    auto bad = spread_surrogate_bounds(10.0, 4);
    CHECK(!bad.within_bounds);
}
