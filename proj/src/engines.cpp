#include "lix/engines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lix/alloc.hpp"
#include "lix/errors.hpp"
#include "lix/profile.hpp"

namespace lix {

LookupResult repair_search(const KeySet& ks, std::size_t lo, std::size_t hi, Key q) {
    const std::size_t n = ks.size();
    if (hi > n || lo > hi) throw std::invalid_argument("repair_search: bad window");
    LookupResult out;
    out.metrics.window = hi - lo;
    out.metrics.window_lo = lo;
    std::size_t a = lo, b = hi;
    while (a < b) {
        std::size_t mid = a + (b - a) / 2;
        ++out.metrics.repair_comparisons;
        if (ks[mid] <= q)
            a = mid + 1;
        else
            b = mid;
    }
    // certificate check: the answer must be locally consistent
    if ((a > 0 && ks[a - 1] > q) || (a < n && ks[a] <= q))
        throw integrity_error("repair_search: true rank outside the certified window");
    out.rank = a;
    return out;
}

std::size_t Predictor::predict(Key q, std::size_t n) const {
    if (kind == Kind::Empty || segments.empty())
        throw std::logic_error("Predictor: empty predictor has no prediction");
    // locate the segment whose fitted span ends at or after q (last one
    // otherwise); intra-leaf locate is model evaluation, not routing
    std::size_t s = 0, e = segments.size() - 1;
    while (s < e) {
        std::size_t mid = (s + e) / 2;
        if (segments[mid].key_hi < q)
            s = mid + 1;
        else
            e = mid;
    }
    double r = segments[s].predict_real(q);
    if (!(r > 0.0)) return 0;
    if (r >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(std::llround(r));
}

std::uint64_t certify_predictor(const KeySet& ks, const LeafInterval& iv, const Predictor& pred) {
    if (pred.kind == Predictor::Kind::Empty)
        return rank_diameter(ks, iv) - 1;
    ControlCurve curve = certified_curve(ks, iv);
    const std::size_t n = ks.size();
    std::uint64_t worst = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::size_t r = pred.predict(curve.q[i], n);
        std::uint64_t err = r >= curve.f[i] ? r - curve.f[i] : curve.f[i] - r;
        worst = std::max(worst, err);
    }
    // Between adjacent control keys the rank moves by at most one and the
    // clamped monotone prediction stays between its endpoint values, so the
    // query-time window [pred - delta - 1, pred + delta] is certified for
    // every query in the interval.
    return worst;
}

namespace {

std::size_t now_ms() {
    return static_cast<std::size_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

AffineSegment segment_from_witness(const ControlCurve& curve, const SegmentWitness& w) {
    AffineSegment seg;
    seg.key_lo = curve.q[w.a];
    seg.key_hi = curve.q[w.b];
    seg.slope = w.slope();
    long double at_lo = (static_cast<long double>(w.u_num) * static_cast<long double>(seg.key_lo) +
                         static_cast<long double>(w.v_num)) /
                        static_cast<long double>(w.den);
    seg.intercept_at_lo = static_cast<double>(at_lo);
    return seg;
}

// A routed leaf: universe interval, predictor, certified radius.
struct BuiltLeaf {
    LeafInterval iv;
    Predictor pred;
};

// Shared lookup body once the leaf is known.
LookupResult leaf_lookup(const KeySet& ks, const BuiltLeaf& leaf, std::size_t leaf_idx, Key q) {
    const std::size_t n = ks.size();
    const std::size_t rank_lo = leaf.iv.first;
    const std::size_t rank_hi = leaf.iv.first + leaf.iv.count;
    LookupResult r;
    if (leaf.pred.kind == Predictor::Kind::Empty) {
        r = repair_search(ks, rank_lo, rank_hi, q);
        r.metrics.certified_delta = leaf.iv.count; // trivial full-leaf window
    } else {
        std::size_t p = leaf.pred.predict(q, n);
        std::uint64_t d = leaf.pred.delta;
        std::size_t lo = p > d + 1 ? p - static_cast<std::size_t>(d) - 1 : 0;
        std::size_t hi = p + static_cast<std::size_t>(d) < n ? p + static_cast<std::size_t>(d) : n;
        if (lo < rank_lo) lo = rank_lo;
        if (hi > rank_hi) hi = rank_hi;
        if (lo > hi) { // prediction drifted outside the leaf span
            lo = rank_lo;
            hi = rank_hi;
        }
        r = repair_search(ks, lo, hi, q);
        r.metrics.certified_delta = d;
    }
    r.metrics.leaf = leaf_idx;
    r.metrics.leaf_first = leaf.iv.first;
    return r;
}

// ---------------------------------------------------------------------------
// Binary search baseline: one leaf, empty predictor.
// ---------------------------------------------------------------------------

class BinaryEngine final : public Engine {
  public:
    explicit BinaryEngine(const KeySet& ks) : ks_(ks) {
        leaf_.iv.count = ks.size();
        leaf_.pred.kind = Predictor::Kind::Empty;
    }
    LookupResult lookup(Key q) const override { return leaf_lookup(ks_, leaf_, 0, q); }
    std::string family() const override { return "binary"; }
    std::string config() const override { return "binary"; }
    SizeAccount sizes() const override { return {}; }

  private:
    const KeySet& ks_;
    BuiltLeaf leaf_;
};

// ---------------------------------------------------------------------------
// Epsilon-PLA baseline.
// ---------------------------------------------------------------------------

class PlaEngine final : public Engine {
  public:
    PlaEngine(const KeySet& ks, std::uint64_t epsilon) : ks_(ks), epsilon_(epsilon) {
        if (epsilon < 1) throw std::invalid_argument("epsilon-PLA: epsilon >= 1 required");
        std::size_t t0 = now_ms();
        const std::size_t n = ks.size();
        if (n == 0) throw std::invalid_argument("epsilon-PLA: empty key set");

        // greedy maximal epsilon-feasible segments over (key, rank) points
        SlopeCone cone(epsilon);
        std::vector<std::pair<std::size_t, std::size_t>> blocks; // key index ranges
        std::size_t start = 0;
        std::vector<AffineSegment> segs;
        ControlCurve all;
        all.q.assign(ks.keys().begin(), ks.keys().end());
        all.f.resize(n);
        for (std::size_t i = 0; i < n; ++i) all.f[i] = i + 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (cone.try_append(all.q[i], all.f[i])) continue;
            SegmentWitness w = cone.witness();
            w.a = start;
            w.b = i - 1;
            blocks.emplace_back(start, i - 1);
            segs.push_back(segment_from_witness(all, w));
            cone.reset(epsilon);
            cone.try_append(all.q[i], all.f[i]);
            start = i;
        }
        SegmentWitness w = cone.witness();
        w.a = start;
        w.b = n - 1;
        blocks.emplace_back(start, n - 1);
        segs.push_back(segment_from_witness(all, w));

        leaves_.resize(blocks.size());
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            BuiltLeaf& leaf = leaves_[j];
            leaf.iv.first = blocks[j].first;
            leaf.iv.count = blocks[j].second - blocks[j].first + 1;
            if (j > 0) {
                leaf.iv.has_lo = true;
                leaf.iv.lo = ks[blocks[j].first - 1];
            }
            if (j + 1 < blocks.size()) {
                leaf.iv.has_hi = true;
                leaf.iv.hi = ks[blocks[j].second];
                splits_.push_back(leaf.iv.hi);
            }
            leaf.pred.kind = Predictor::Kind::Affine;
            leaf.pred.segments = {segs[j]};
            leaf.pred.delta = certify_predictor(ks, leaf.iv, leaf.pred);
        }
        build_ms_ = now_ms() - t0;
    }

    LookupResult lookup(Key q) const override {
        // ordered segment search: binary over segment upper boundaries
        std::size_t comps = 0;
        std::size_t s = 0, e = leaves_.size() - 1;
        while (s < e) {
            std::size_t mid = (s + e) / 2;
            ++comps;
            if (splits_[mid] < q)
                s = mid + 1;
            else
                e = mid;
        }
        LookupResult r = leaf_lookup(ks_, leaves_[s], s, q);
        r.metrics.route_comparisons = comps;
        return r;
    }
    std::string family() const override { return "pla"; }
    std::string config() const override { return "pla(" + std::to_string(epsilon_) + ")"; }
    SizeAccount sizes() const override {
        SizeAccount s;
        s.atoms = leaves_.size();
        s.model_bytes = leaves_.size() * (sizeof(AffineSegment) + sizeof(std::uint64_t));
        return s;
    }
    std::size_t build_ms() const override { return build_ms_; }

  private:
    const KeySet& ks_;
    std::uint64_t epsilon_;
    std::vector<BuiltLeaf> leaves_;
    std::vector<Key> splits_;
    std::size_t build_ms_ = 0;
};

// ---------------------------------------------------------------------------
// Radix-spline baseline.
// ---------------------------------------------------------------------------

class RadixSplineEngine final : public Engine {
  public:
    RadixSplineEngine(const KeySet& ks, std::uint64_t epsilon, unsigned radix_bits)
        : ks_(ks), epsilon_(epsilon), radix_bits_(radix_bits) {
        if (epsilon < 1) throw std::invalid_argument("radix-spline: epsilon >= 1 required");
        std::size_t t0 = now_ms();
        const std::size_t n = ks.size();
        if (n == 0) throw std::invalid_argument("radix-spline: empty key set");

        // greedy corridor knot selection over (key, rank)
        std::vector<std::pair<Key, std::size_t>> knots;
        knots.emplace_back(ks[0], 1);
        if (n > 1) {
            double slo = -std::numeric_limits<double>::infinity();
            double shi = std::numeric_limits<double>::infinity();
            std::size_t base = 0;
            for (std::size_t i = 1; i < n; ++i) {
                double dx = static_cast<double>(ks[i] - ks[base]);
                double dy = static_cast<double>(i + 1) - static_cast<double>(base + 1);
                double s = dy / dx;
                if (s < slo || s > shi) {
                    knots.emplace_back(ks[i - 1], i);
                    base = i - 1;
                    dx = static_cast<double>(ks[i] - ks[base]);
                    dy = static_cast<double>(i + 1) - static_cast<double>(base + 1);
                    slo = (dy - static_cast<double>(epsilon)) / dx;
                    shi = (dy + static_cast<double>(epsilon)) / dx;
                } else {
                    slo = std::max(slo, (dy - static_cast<double>(epsilon)) / dx);
                    shi = std::min(shi, (dy + static_cast<double>(epsilon)) / dx);
                }
            }
            knots.emplace_back(ks[n - 1], n);
        }
        knot_count_ = knots.size();

        // one leaf per inter-knot span; the outer spans clamp to the end knots
        std::size_t leaf_count = knots.size() >= 2 ? knots.size() - 1 : 1;
        leaves_.resize(leaf_count);
        for (std::size_t j = 0; j < leaf_count; ++j) {
            BuiltLeaf& leaf = leaves_[j];
            if (knots.size() < 2) {
                leaf.pred.kind = Predictor::Kind::Empty;
                continue;
            }
            const auto& [k0, r0] = knots[j];
            const auto& [k1, r1] = knots[j + 1];
            // span (k0, k1]; the first leaf reaches -inf, the last +inf
            if (j > 0) {
                leaf.iv.has_lo = true;
                leaf.iv.lo = k0;
            }
            if (j + 1 < leaf_count) {
                leaf.iv.has_hi = true;
                leaf.iv.hi = k1;
                splits_.push_back(k1);
            }
            AffineSegment seg;
            seg.key_lo = k0;
            seg.key_hi = k1;
            seg.slope = (static_cast<double>(r1) - static_cast<double>(r0)) /
                        static_cast<double>(k1 - k0);
            seg.intercept_at_lo = static_cast<double>(r0);
            leaf.pred.kind = Predictor::Kind::Affine;
            leaf.pred.segments = {seg};
        }
        fix_leaf_index_ranges();
        for (auto& leaf : leaves_)
            if (leaf.pred.kind != Predictor::Kind::Empty)
                leaf.pred.delta = certify_predictor(ks, leaf.iv, leaf.pred);
        router_ = RadixRouter::build(splits_, ks[0], ks[n - 1], radix_bits_);
        build_ms_ = now_ms() - t0;
    }

    LookupResult lookup(Key q) const override {
        auto route = router_.route(q);
        LookupResult r = leaf_lookup(ks_, leaves_[route.leaf], route.leaf, q);
        r.metrics.route_comparisons = route.comparisons;
        r.metrics.fallback = route.fallback;
        return r;
    }
    std::string family() const override { return "rs"; }
    std::string config() const override {
        return "rs(" + std::to_string(epsilon_) + ":" + std::to_string(radix_bits_) + ")";
    }
    SizeAccount sizes() const override {
        SizeAccount s;
        s.atoms = knot_count_;
        s.model_bytes = knot_count_ * (sizeof(Key) + sizeof(std::uint64_t));
        s.directory_bytes = router_.size_bytes();
        return s;
    }
    std::size_t build_ms() const override { return build_ms_; }

  private:
    void fix_leaf_index_ranges() {
        // recompute exact owned-key ranges from the universe intervals
        for (auto& leaf : leaves_) {
            std::size_t lo_rank = leaf.iv.has_lo ? ks_.rank(leaf.iv.lo) : 0;
            std::size_t hi_rank = leaf.iv.has_hi ? ks_.rank(leaf.iv.hi) : ks_.size();
            leaf.iv.first = lo_rank;
            leaf.iv.count = hi_rank - lo_rank;
        }
    }

    const KeySet& ks_;
    std::uint64_t epsilon_;
    unsigned radix_bits_;
    std::vector<BuiltLeaf> leaves_;
    std::vector<Key> splits_;
    RadixRouter router_;
    std::size_t knot_count_ = 0;
    std::size_t build_ms_ = 0;
};

// ---------------------------------------------------------------------------
// Shadow-allocation prototypes.
// ---------------------------------------------------------------------------

class ShadowEngine final : public Engine {
  public:
    ShadowEngine(const KeySet& ks, const Workload& train, const ShadowConfig& cfg)
        : ks_(ks), cfg_(cfg) {
        std::size_t t0 = now_ms();
        const std::size_t n = ks.size();
        if (n == 0) throw std::invalid_argument("shadow: empty key set");

        // coarse start: equal-count leaves, count ~ sqrt(n) rounded to a
        // power of two, capped; no atoms means nothing to allocate, so a
        // zero budget degrades to plain windowed search over one leaf
        std::size_t target = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
        std::size_t m = 1;
        while (m * 2 <= target) m *= 2;
        m = std::min({m, cfg.max_leaves, n});
        if (cfg.budget == 0) m = 1;
        Partition pi = Partition::equal_count(ks_, m);
        masses_ = train.leaf_masses(pi);

        std::uint64_t max_r = 0;
        for (const auto& leaf : pi.leaves()) max_r = std::max(max_r, rank_diameter(ks_, leaf));
        bool exact_profiles = cfg.profile_samples == 0;
        auto profiles = profile_curves_parallel(ks_, pi, pow2_radius_grid(max_r),
                                                /*use_greedy=*/!exact_profiles,
                                                /*sample_cap=*/cfg.profile_samples);
        alloc_ = greedy_allocate(profiles, masses_, cfg.budget);

        leaves_.resize(pi.leaf_count());
        for (std::size_t j = 0; j < pi.leaf_count(); ++j) {
            BuiltLeaf& leaf = leaves_[j];
            leaf.iv = pi.leaf(j);
            const auto& choice = alloc_.per_leaf[j];
            if (choice.atoms == 0 || choice.delta >= profiles[j].rank_diam) {
                leaf.pred.kind = Predictor::Kind::Empty;
            } else {
                ControlCurve curve = exact_profiles
                                         ? certified_curve(ks_, leaf.iv)
                                         : sampled_curve(ks_, leaf.iv, cfg.profile_samples);
                SegmentCover cover = exact_profiles ? min_segment_cover(curve, choice.delta)
                                                    : greedy_cover(curve, choice.delta);
                leaf.pred.kind = cover.blocks.size() == 1 ? Predictor::Kind::Affine
                                                          : Predictor::Kind::SegmentSet;
                for (const auto& w : cover.blocks)
                    leaf.pred.segments.push_back(segment_from_witness(curve, w));
                leaf.pred.delta = certify_predictor(ks_, leaf.iv, leaf.pred);
                segment_records_ += cover.blocks.size();
            }
            if (j + 1 < pi.leaf_count()) splits_.push_back(leaf.iv.hi);
        }
        if (cfg.radix)
            radix_ = RadixRouter::build(splits_, ks_[0], ks_[n - 1], cfg.radix_bits);
        else
            tree_ = DirectoryTree::build(masses_, splits_);
        build_ms_ = now_ms() - t0;
    }

    LookupResult lookup(Key q) const override {
        std::size_t leaf_idx, comps;
        bool fallback = false;
        if (cfg_.radix) {
            auto route = radix_.route(q);
            leaf_idx = route.leaf;
            comps = route.comparisons;
            fallback = route.fallback;
        } else {
            auto [l, c] = tree_.route(q);
            leaf_idx = l;
            comps = c;
        }
        LookupResult r = leaf_lookup(ks_, leaves_[leaf_idx], leaf_idx, q);
        r.metrics.route_comparisons = comps;
        r.metrics.fallback = fallback;
        return r;
    }
    std::string family() const override { return cfg_.radix ? "shadow_r" : "shadow_o"; }
    std::string config() const override {
        return std::string(cfg_.radix ? "shadow_r(" : "shadow_o(") + std::to_string(cfg_.budget) +
               ")";
    }
    SizeAccount sizes() const override {
        SizeAccount s;
        s.atoms = alloc_.atoms_used;
        s.model_bytes = segment_records_ * (sizeof(AffineSegment)) +
                        leaves_.size() * 2 * sizeof(std::uint64_t);
        s.directory_bytes = cfg_.radix ? radix_.size_bytes() : tree_.size_bytes();
        return s;
    }
    std::size_t build_ms() const override { return build_ms_; }

    const Allocation& allocation() const { return alloc_; }

  private:
    const KeySet& ks_;
    ShadowConfig cfg_;
    std::vector<double> masses_;
    Allocation alloc_;
    std::vector<BuiltLeaf> leaves_;
    std::vector<Key> splits_;
    DirectoryTree tree_;
    RadixRouter radix_;
    std::size_t segment_records_ = 0;
    std::size_t build_ms_ = 0;
};

} // namespace

std::unique_ptr<Engine> build_binary(const KeySet& ks) {
    return std::make_unique<BinaryEngine>(ks);
}

std::unique_ptr<Engine> build_epsilon_pla(const KeySet& ks, std::uint64_t epsilon) {
    return std::make_unique<PlaEngine>(ks, epsilon);
}

std::unique_ptr<Engine> build_radix_spline(const KeySet& ks, std::uint64_t epsilon,
                                           unsigned radix_bits) {
    return std::make_unique<RadixSplineEngine>(ks, epsilon, radix_bits);
}

std::unique_ptr<Engine> build_shadow(const KeySet& ks, const Workload& train,
                                     const ShadowConfig& cfg) {
    return std::make_unique<ShadowEngine>(ks, train, cfg);
}

} // namespace lix
