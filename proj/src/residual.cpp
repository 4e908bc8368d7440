#include "lix/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lix {

namespace {

double xlog2inv(double w) { return w > 0.0 ? -w * std::log2(w) : 0.0; }

double log2_1p_u(std::uint64_t d) { return std::log2(1.0 + static_cast<double>(d)); }

} // namespace

std::size_t ChordPredictor::predict(Key q, std::size_t n) const {
    Key x = q < k0 ? k0 : (q > k1 ? k1 : q);
    double r = rank0 + slope * static_cast<double>(x - k0);
    if (!(r > 0.0)) return 0;
    if (r >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(std::llround(r));
}

ChordPredictor chord_for(const KeySet& ks, const LeafInterval& iv) {
    if (iv.count == 0) throw std::invalid_argument("chord_for: empty leaf");
    ChordPredictor c;
    c.k0 = ks[iv.first];
    c.k1 = ks[iv.first + iv.count - 1];
    c.rank0 = static_cast<double>(iv.first + 1);
    c.slope = iv.count > 1 ? static_cast<double>(iv.count - 1) / static_cast<double>(c.k1 - c.k0)
                           : 0.0;
    return c;
}

std::uint64_t chord_delta(const KeySet& ks, const LeafInterval& iv) {
    ChordPredictor c = chord_for(ks, iv);
    std::uint64_t worst = 0;
    for (std::size_t t = 0; t < iv.count; ++t) {
        std::size_t truth = iv.first + t + 1;
        std::size_t p = c.predict(ks[iv.first + t], ks.size());
        std::uint64_t err = p >= truth ? p - truth : truth - p;
        worst = std::max(worst, err);
    }
    return worst;
}

Transcript transcript_of(const KeySet& ks, const LeafInterval& leaf, bool use_chord,
                         std::uint64_t delta, const TranscriptConfig& cfg, Key q) {
    if (!leaf.contains(q)) throw std::invalid_argument("transcript_of: query outside leaf");
    if (cfg.quantum < 1) throw std::invalid_argument("transcript_of: quantum >= 1 required");
    Transcript y;
    const std::size_t rank_lo = leaf.first;
    const std::size_t rank_hi = leaf.first + leaf.count;
    if (!use_chord || leaf.count == 0) {
        y.window_lo = rank_lo;
        y.window_hi = rank_hi;
        return y;
    }
    ChordPredictor c = chord_for(ks, leaf);
    std::size_t p = c.predict(q, ks.size());
    y.has_predictor = true;
    y.bucket = p / cfg.quantum;
    // the window is a function of the transcript: prediction lies in
    // [bucket*Q, bucket*Q + Q - 1], the answer within +-delta of it
    std::size_t base = static_cast<std::size_t>(y.bucket) * cfg.quantum;
    std::size_t lo = base > delta ? base - delta : 0;
    std::size_t hi = base + cfg.quantum - 1 + delta;
    y.window_lo = std::max(lo, rank_lo);
    y.window_hi = std::min(hi, rank_hi);
    return y;
}

double rep_entropy(const KeySet& ks, const LeafInterval& leaf, bool use_chord,
                   const TranscriptConfig& cfg, const Workload& w) {
    Workload cond = w.restrict_to(leaf);
    std::uint64_t delta = use_chord ? chord_delta(ks, leaf) : 0;
    // group conditional mass by transcript; answers are distinct per key, so
    // H(A | Y = y) is the entropy of the normalized weights in the group
    std::map<std::uint64_t, std::vector<double>> groups;
    for (const auto& [q, p] : cond.support()) {
        Transcript y = transcript_of(ks, leaf, use_chord, delta, cfg, q);
        groups[y.has_predictor ? y.bucket : ~std::uint64_t(0)].push_back(p);
    }
    double h = 0.0;
    for (const auto& [bucket, ws] : groups) {
        double py = 0.0;
        for (double x : ws) py += x;
        if (py <= 0.0) continue;
        double hy = 0.0;
        for (double x : ws)
            if (x > 0.0) hy += (x / py) * std::log2(py / x);
        h += py * hy;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Interval costs
// ---------------------------------------------------------------------------

double IntervalCosts::empty_gap(std::size_t i, std::size_t j) const {
    double p = w_prefix[j] - w_prefix[i];
    if (p <= 0.0) return 0.0;
    double diam = static_cast<double>(j - i) + 1.0; // rank diameter of the leaf
    return p * (std::log2(1.0 / p) + std::log2(1.0 + diam));
}

namespace {

IntervalCosts interval_costs_impl(const KeySet& ks, const std::vector<double>& weights,
                                  const TranscriptConfig& cfg, bool parallel) {
    const std::size_t n = ks.size();
    if (weights.size() != n) throw std::invalid_argument("interval costs: weight size mismatch");
    if (cfg.quantum < 1) throw std::invalid_argument("interval costs: quantum >= 1 required");

    IntervalCosts costs;
    costs.n = n;
    costs.w_prefix.assign(n + 1, 0.0);
    costs.wl_prefix.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        costs.w_prefix[i + 1] = costs.w_prefix[i] + weights[i];
        costs.wl_prefix[i + 1] = costs.wl_prefix[i] + xlog2inv(weights[i]);
    }
    costs.chord_rgap.assign((n + 1) * (n + 1), 0.0);
    costs.chord_gap.assign((n + 1) * (n + 1), 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
#endif
    for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
        const std::size_t i = static_cast<std::size_t>(is);
        for (std::size_t j = i + 1; j <= n; ++j) {
            const std::size_t len = j - i;
            // chord through (ks[i], i+1) and (ks[j-1], j)
            const double rank0 = static_cast<double>(i + 1);
            const double slope =
                len > 1 ? static_cast<double>(len - 1) / static_cast<double>(ks[j - 1] - ks[i])
                        : 0.0;
            std::uint64_t delta = 0;
            double bucket_sum = 0.0; // sum over buckets of W_y log2(1/W_y)
            std::uint64_t cur_bucket = 0;
            double cur_w = 0.0;
            bool open = false;
            for (std::size_t t = i; t < j; ++t) {
                double r = rank0 + slope * static_cast<double>(ks[t] - ks[i]);
                std::size_t pred;
                if (!(r > 0.0))
                    pred = 0;
                else if (r >= static_cast<double>(n))
                    pred = n;
                else
                    pred = static_cast<std::size_t>(std::llround(r));
                std::size_t truth = t + 1;
                std::uint64_t err = pred >= truth ? pred - truth : truth - pred;
                if (err > delta) delta = err;
                std::uint64_t bucket = pred / cfg.quantum;
                if (!open || bucket != cur_bucket) {
                    if (open) bucket_sum += xlog2inv(cur_w);
                    cur_bucket = bucket;
                    cur_w = 0.0;
                    open = true;
                }
                cur_w += weights[t];
            }
            if (open) bucket_sum += xlog2inv(cur_w);

            const double p = costs.w_prefix[j] - costs.w_prefix[i];
            const double wl = costs.wl_prefix[j] - costs.wl_prefix[i];
            const double plogp = xlog2inv(p);
            // routing + residual: wl - p*H(Y|leaf); p*H(Y|leaf) = bucket_sum - p log2(1/p)
            costs.chord_rgap[i * (n + 1) + j] = wl - bucket_sum + plogp;
            costs.chord_gap[i * (n + 1) + j] =
                p > 0.0 ? plogp + p * log2_1p_u(delta) : 0.0;
        }
    }
    (void)parallel;
    return costs;
}

} // namespace

IntervalCosts interval_costs_serial(const KeySet& ks, const std::vector<double>& weights,
                                    const TranscriptConfig& cfg) {
    return interval_costs_impl(ks, weights, cfg, false);
}

IntervalCosts interval_costs_parallel(const KeySet& ks, const std::vector<double>& weights,
                                      const TranscriptConfig& cfg) {
    return interval_costs_impl(ks, weights, cfg, true);
}

// ---------------------------------------------------------------------------
// Exact evaluation
// ---------------------------------------------------------------------------

namespace {

struct DpTables {
    std::size_t n = 0, bmax = 0;
    std::vector<double> g;       // [(b)*(n+1) + j]
    std::vector<std::int32_t> parent;
    std::vector<std::uint8_t> chord;

    double& at(std::size_t b, std::size_t j) { return g[b * (n + 1) + j]; }
};

// Minimize sum of leaf costs over ordered partitions with at most bmax
// chord leaves; ties prefer the empty predictor (fewer atoms).
DpTables run_dp(const IntervalCosts& costs, std::size_t bmax, bool gap_objective) {
    const std::size_t n = costs.n;
    DpTables dp;
    dp.n = n;
    dp.bmax = bmax;
    dp.g.assign((bmax + 1) * (n + 1), std::numeric_limits<double>::infinity());
    dp.parent.assign((bmax + 1) * (n + 1), -1);
    dp.chord.assign((bmax + 1) * (n + 1), 0);

    for (std::size_t b = 0; b <= bmax; ++b) {
        dp.at(b, 0) = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            double best = std::numeric_limits<double>::infinity();
            std::int32_t best_i = -1;
            std::uint8_t best_c = 0;
            for (std::size_t i = 0; i < j; ++i) {
                double base = dp.at(b, i);
                if (base < std::numeric_limits<double>::infinity()) {
                    double v = base + (gap_objective ? costs.empty_gap(i, j)
                                                     : costs.empty_rgap(i, j));
                    if (v < best - 1e-15) {
                        best = v;
                        best_i = static_cast<std::int32_t>(i);
                        best_c = 0;
                    }
                }
                if (b > 0) {
                    double base_c = dp.g[(b - 1) * (n + 1) + i];
                    if (base_c < std::numeric_limits<double>::infinity()) {
                        double v = base_c + (gap_objective ? costs.chord_gap_at(i, j)
                                                           : costs.chord_rgap_at(i, j));
                        if (v < best - 1e-15) {
                            best = v;
                            best_i = static_cast<std::int32_t>(i);
                            best_c = 1;
                        }
                    }
                }
            }
            dp.at(b, j) = best;
            dp.parent[b * (n + 1) + j] = best_i;
            dp.chord[b * (n + 1) + j] = best_c;
        }
    }
    return dp;
}

Selection reconstruct(const DpTables& dp, std::size_t budget) {
    const std::size_t n = dp.n;
    std::size_t b = std::min(budget, dp.bmax);
    // smallest atom count achieving the optimum at this budget
    double best = dp.g[b * (n + 1) + n];
    for (std::size_t bb = 0; bb <= b; ++bb) {
        if (dp.g[bb * (n + 1) + n] <= best + 1e-12) {
            b = bb;
            break;
        }
    }
    Selection sel;
    sel.bits = dp.g[b * (n + 1) + n];
    std::size_t j = n;
    std::vector<std::pair<std::size_t, bool>> leaves; // (start, chord)
    while (j > 0) {
        std::int32_t i = dp.parent[b * (n + 1) + j];
        std::uint8_t c = dp.chord[b * (n + 1) + j];
        leaves.emplace_back(static_cast<std::size_t>(i), c != 0);
        if (c) {
            ++sel.atoms;
            --b;
        }
        j = static_cast<std::size_t>(i);
    }
    std::reverse(leaves.begin(), leaves.end());
    for (std::size_t t = 0; t < leaves.size(); ++t) {
        if (t > 0) sel.cuts.push_back(leaves[t].first);
        sel.use_chord.push_back(leaves[t].second);
    }
    return sel;
}

} // namespace

EvalResult exact_eval(const KeySet& ks, const Workload& w, const EvalConfig& cfg) {
    const std::size_t n = ks.size();
    if (n == 0) throw std::invalid_argument("exact_eval: empty instance");
    if (n > cfg.max_keys)
        throw std::invalid_argument("exact_eval: instance exceeds the complexity guard");

    // workload must be supported on instance keys
    std::vector<double> weights(n, 0.0);
    for (const auto& [q, p] : w.support()) {
        std::size_t r = ks.rank(q);
        if (r == 0 || ks[r - 1] != q)
            throw std::invalid_argument("exact_eval: workload key not in the instance");
        weights[r - 1] += p;
    }

    IntervalCosts costs = cfg.parallel ? interval_costs_parallel(ks, weights, cfg.transcript)
                                       : interval_costs_serial(ks, weights, cfg.transcript);

    EvalResult out;
    out.answer_entropy_bits = costs.wl_prefix[n];

    std::size_t bmax = 0;
    for (std::size_t b : cfg.budgets) bmax = std::max(bmax, b);
    bmax = std::min(bmax, n); // extra atoms beyond one per key are useless

    DpTables rgap_dp = run_dp(costs, bmax, false);
    DpTables gap_dp = run_dp(costs, bmax, true);

    for (std::size_t budget : cfg.budgets) {
        BudgetResult br;
        br.budget = budget;
        std::size_t b = std::min(budget, bmax);
        br.rgap_bits = rgap_dp.g[b * (n + 1) + n];
        br.gap_bits = gap_dp.g[b * (n + 1) + n];
        br.rgap_selection = reconstruct(rgap_dp, budget);
        br.gap_selection = reconstruct(gap_dp, budget);
        br.program_nodes = repair_program(ks, br.rgap_selection, cfg.transcript).total_nodes;
        out.per_budget.push_back(std::move(br));
    }
    return out;
}

RepairProgram repair_program(const KeySet& ks, const Selection& sel,
                             const TranscriptConfig& cfg) {
    const std::size_t n = ks.size();
    RepairProgram prog;
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    for (std::size_t c : sel.cuts) bounds.push_back(c);
    bounds.push_back(n);
    if (bounds.size() != sel.use_chord.size() + 1)
        throw std::invalid_argument("repair_program: selection shape mismatch");

    for (std::size_t leaf = 0; leaf + 1 < bounds.size(); ++leaf) {
        std::size_t i = bounds[leaf], j = bounds[leaf + 1];
        if (i >= j) continue;
        if (!sel.use_chord[leaf]) {
            RepairProgram::Entry e;
            e.leaf = leaf;
            e.nodes = j - i;
            for (std::size_t t = i; t < j; ++t) e.answer_ranks.push_back(t + 1);
            prog.total_nodes += e.nodes;
            prog.entries.push_back(std::move(e));
            continue;
        }
        LeafInterval iv;
        iv.first = i;
        iv.count = j - i;
        ChordPredictor c = chord_for(ks, iv);
        RepairProgram::Entry cur;
        bool open = false;
        for (std::size_t t = i; t < j; ++t) {
            std::uint64_t bucket = c.predict(ks[t], n) / cfg.quantum;
            if (!open || bucket != cur.bucket) {
                if (open) {
                    cur.nodes = cur.answer_ranks.size();
                    prog.total_nodes += cur.nodes;
                    prog.entries.push_back(std::move(cur));
                }
                cur = RepairProgram::Entry{};
                cur.leaf = leaf;
                cur.bucket = bucket;
                open = true;
            }
            cur.answer_ranks.push_back(t + 1);
        }
        if (open) {
            cur.nodes = cur.answer_ranks.size();
            prog.total_nodes += cur.nodes;
            prog.entries.push_back(std::move(cur));
        }
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

SpreadDiagnostic spread_diagnostic(const std::vector<TraceEntry>& trace) {
    if (trace.empty()) throw std::invalid_argument("spread_diagnostic: empty trace");
    struct BucketStat {
        std::map<std::size_t, std::size_t> offsets; // offset -> count
        std::vector<std::uint64_t> deltas;
        std::size_t count = 0;
    };
    std::map<std::pair<std::size_t, unsigned>, BucketStat> buckets;
    for (const auto& t : trace) {
        unsigned wb = 0;
        std::uint64_t w = t.window;
        while (w > 0) {
            ++wb;
            w >>= 1;
        }
        auto& b = buckets[{t.leaf, wb}];
        b.offsets[t.offset]++;
        b.deltas.push_back(t.delta);
        b.count++;
    }

    const double total = static_cast<double>(trace.size());
    double numer = 0.0, denom = 0.0, support = 0.0;
    for (auto& [key, b] : buckets) {
        double pz = static_cast<double>(b.count) / total;
        std::sort(b.deltas.begin(), b.deltas.end());
        std::uint64_t med = b.deltas[b.deltas.size() / 2];
        double hz = 0.0;
        std::size_t supported = 0;
        double thr = 1.0 / (4.0 * (1.0 + static_cast<double>(med)));
        for (const auto& [off, cnt] : b.offsets) {
            double p = static_cast<double>(cnt) / static_cast<double>(b.count);
            hz += -p * std::log2(p);
            if (p >= thr) ++supported;
        }
        numer += pz * hz;
        denom += pz * log2_1p_u(med);
        support += pz * static_cast<double>(supported);
    }

    SpreadDiagnostic d;
    d.buckets = buckets.size();
    d.support = support;
    if (denom <= 0.0) {
        d.defined = false; // all singleton windows: the ratio is undefined
        return d;
    }
    d.defined = true;
    d.entropy_ratio = numer / denom;
    return d;
}

SpreadBoundCheck spread_surrogate_bounds(double rep_bits, std::uint64_t delta) {
    SpreadBoundCheck c;
    double cand = std::log2(2.0 * static_cast<double>(delta) + 2.0); // window candidates
    c.within_bounds = rep_bits >= -1e-9 && rep_bits <= cand + 1e-9;
    if (delta == 0) {
        c.ratio = 1.0;
        c.spread_failure = false;
    } else {
        c.ratio = rep_bits / log2_1p_u(delta);
        c.spread_failure = c.ratio < 0.25;
    }
    return c;
}

} // namespace lix
