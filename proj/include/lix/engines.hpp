#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lix/directory.hpp"
#include "lix/keyset.hpp"
#include "lix/workload.hpp"

namespace lix {

// Per-lookup meters. window is the candidate span u - lo of the clipped
// repair window, so repair_comparisons <= ceil(log2(window + 2)) always.
struct LookupMetrics {
    std::size_t route_comparisons = 0;
    std::size_t repair_comparisons = 0;
    std::uint64_t window = 0;
    std::size_t window_lo = 0;
    std::uint64_t certified_delta = 0;
    std::size_t leaf = 0;
    std::size_t leaf_first = 0; // rank of the leaf's first owned key
    bool fallback = false;
};

struct LookupResult {
    std::size_t rank = 0;
    LookupMetrics metrics;
};

// Exact rank by binary search over the certified rank window [lo, hi].
// Throws integrity_error when the true rank lies outside the window; the
// comparison count is at most ceil(log2(hi - lo + 2)).
LookupResult repair_search(const KeySet& ks, std::size_t lo, std::size_t hi, Key q);

// One affine segment record: one charged atom. Evaluation is clamped to the
// fitted key span so certificates stay valid between control points.
struct AffineSegment {
    Key key_lo = 0;
    Key key_hi = 0;
    double slope = 0.0;
    double intercept_at_lo = 0.0; // prediction at key_lo

    double predict_real(Key q) const {
        Key x = q < key_lo ? key_lo : (q > key_hi ? key_hi : q);
        return slope * static_cast<double>(x - key_lo) + intercept_at_lo;
    }
};

// Leaf predictor: Empty (full-leaf repair window) or an ordered set of
// affine segments with a certified worst-case rank error.
struct Predictor {
    enum class Kind { Empty, Affine, SegmentSet };
    Kind kind = Kind::Empty;
    std::vector<AffineSegment> segments;
    std::uint64_t delta = 0; // certified radius, replay-verified

    std::size_t atoms() const { return segments.size(); }
    // Clamped prediction rounded into [0, n].
    std::size_t predict(Key q, std::size_t n) const;
};

// Exact certification: max integer replay error of the predictor over the
// interval's certified control keys, plus one for the between-control-point
// slack of monotone clamped evaluation.
std::uint64_t certify_predictor(const KeySet& ks, const LeafInterval& iv, const Predictor& pred);

struct SizeAccount {
    std::size_t model_bytes = 0;
    std::size_t directory_bytes = 0;
    std::size_t repair_program_bytes = 0;
    std::size_t atoms = 0;
};

// Exact comparison-metered query engine over an externally owned KeySet.
class Engine {
  public:
    virtual ~Engine() = default;
    virtual LookupResult lookup(Key q) const = 0;
    virtual std::string family() const = 0; // binary | pla | rs | shadow_o | shadow_r
    virtual std::string config() const = 0;
    virtual SizeAccount sizes() const = 0;
    virtual std::size_t build_ms() const { return 0; }
};

std::unique_ptr<Engine> build_binary(const KeySet& ks);

// Error-bounded piecewise-linear baseline: greedy maximal epsilon-feasible
// segments, ordered segment search, window repair.
std::unique_ptr<Engine> build_epsilon_pla(const KeySet& ks, std::uint64_t epsilon);

// Spline-knot baseline: greedy corridor knots with interpolation error <=
// epsilon at stored keys, radix dispatch over knots, window repair.
std::unique_ptr<Engine> build_radix_spline(const KeySet& ks, std::uint64_t epsilon,
                                           unsigned radix_bits = 18);

struct ShadowConfig {
    std::size_t budget = 256;
    bool radix = false;          // ordered directory vs radix dispatch
    unsigned radix_bits = 18;
    std::size_t profile_samples = 8192; // control-curve cap per leaf; 0 = certified
    std::size_t max_leaves = 4096;
};

// Atom-budgeted prototype: coarse equal-count partition, per-leaf profile
// curves, greedy shadow-price allocation, segment-cover predictors at the
// allocated radii, ordered or radix routing.
std::unique_ptr<Engine> build_shadow(const KeySet& ks, const Workload& train,
                                     const ShadowConfig& cfg);

} // namespace lix
