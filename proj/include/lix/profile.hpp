#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "lix/keyset.hpp"

namespace lix {

// Local rank curve on control keys: strictly increasing keys q, nondecreasing
// global ranks f. Certified curves carry every stored key of the interval
// plus its boundary gap endpoints; sampled curves are trace subsets and must
// never feed the exact evaluator.
struct ControlCurve {
    std::vector<Key> q;
    std::vector<std::uint64_t> f;
    bool certified = true;
    std::size_t size() const { return q.size(); }
};

ControlCurve certified_curve(const KeySet& ks, const LeafInterval& iv);
ControlCurve sampled_curve(const KeySet& ks, const LeafInterval& iv, std::size_t max_points);

// Exact rational affine witness for one cover block: slope = u_num/den,
// intercept = v_num/den with den > 0. Over the block's control points the
// line satisfies |u*q + v - f| <= delta exactly.
struct SegmentWitness {
    std::size_t a = 0, b = 0; // control-point index block [a, b], inclusive
    __int128 u_num = 0;
    __int128 v_num = 0;
    __int128 den = 1;
    double slope() const { return static_cast<double>(u_num) / static_cast<double>(den); }
    double intercept() const { return static_cast<double>(v_num) / static_cast<double>(den); }
};

// Incremental feasibility of |u*x + v - y| <= delta over appended points,
// maintained exactly via the feasible slope interval (Fourier-Motzkin
// projection) with convex-hull tangent updates. Points must arrive with
// strictly increasing x.
class SlopeCone {
  public:
    explicit SlopeCone(std::uint64_t delta) { reset(delta); }
    void reset(std::uint64_t delta);

    // Appends (x, y) when the window stays feasible; returns false (state
    // unchanged) otherwise.
    bool try_append(Key x, std::uint64_t y);

    std::size_t size() const { return xs_.size(); }

    // Exact witness for the current window; requires size() >= 1.
    SegmentWitness witness() const;

  private:
    struct Frac {
        __int128 num;
        __int128 den; // > 0
    };
    static bool frac_le(const Frac& a, const Frac& b);

    __int128 max_slope_to(__int128 px, __int128 py, const std::vector<std::size_t>& hull,
                          bool maximize, Frac* out) const;

    std::uint64_t delta_ = 0;
    std::vector<Key> xs_;
    std::vector<std::uint64_t> ys_;
    std::vector<std::size_t> lower_hull_;
    std::vector<std::size_t> upper_hull_;
    bool has_lo_ = false, has_hi_ = false;
    Frac lo_{0, 1}, hi_{0, 1};
};

struct FeasibilityResult {
    bool feasible = false;
    SegmentWitness witness;
};

// Exact decision: is the control block [a, b] delta-linear? Witness returned
// when feasible. Indices are 0-based and inclusive; throws on a > b.
FeasibilityResult is_delta_linear(const ControlCurve& curve, std::size_t a, std::size_t b,
                                  std::uint64_t delta);

struct SegmentCover {
    std::size_t count = 0;
    std::vector<SegmentWitness> blocks; // ordered, contiguous, covering [0, N)
};

// Exact minimum number of contiguous delta-linear blocks covering the curve,
// by the prefix dynamic program with a monotone feasibility window.
SegmentCover min_segment_cover(const ControlCurve& curve, std::uint64_t delta);

// Left-to-right maximal greedy cover; at most a constant factor above the
// minimum, O(N log N), used as the sandwich upper bound on large intervals.
SegmentCover greedy_cover(const ControlCurve& curve, std::uint64_t delta);

// Map delta -> minimum charged atom count, with the convention entry
// Comp(R_I) = 0 for the empty predictor.
struct ProfileCurve {
    std::size_t interval_id = 0;
    bool certified = true;
    std::uint64_t rank_diam = 0; // R_I
    std::vector<std::pair<std::uint64_t, std::size_t>> points; // (delta, atoms) ascending in delta

    // Atoms at a grid delta; exact grid lookup.
    std::size_t comp_at(std::uint64_t delta) const;
    // Smallest grid delta whose atom cost is <= atoms; rank_diam if none.
    std::uint64_t delta_for_atoms(std::size_t atoms) const;
};

// Certified profile over the given radius grid: Comp(d) = N^Lin(d) for
// d < R_I and 0 beyond. The grid is augmented with R_I. use_greedy selects
// the O(N log N) greedy cover (sandwich upper bound) instead of the exact DP;
// sample_cap > 0 subsamples the control curve and tags the result sampled.
ProfileCurve profile_curve(const KeySet& ks, const LeafInterval& iv,
                           std::vector<std::uint64_t> grid, bool use_greedy = false,
                           std::size_t sample_cap = 0);

// Power-of-two radius grid {0, 1, 2, 4, ...} up to and including rank_diam.
std::vector<std::uint64_t> pow2_radius_grid(std::uint64_t rank_diam);

// Per-leaf profile curves for a whole partition. The serial and the
// OpenMP-parallel kernel compute identical results; the serial one is the
// reference kept for testing.
std::vector<ProfileCurve> profile_curves_serial(const KeySet& ks, const Partition& pi,
                                                const std::vector<std::uint64_t>& grid,
                                                bool use_greedy = false,
                                                std::size_t sample_cap = 0);
std::vector<ProfileCurve> profile_curves_parallel(const KeySet& ks, const Partition& pi,
                                                  const std::vector<std::uint64_t>& grid,
                                                  bool use_greedy = false,
                                                  std::size_t sample_cap = 0);

// Sandwich quality gamma = max over the shared grid of U / max{1, L}; throws
// certificate_error when L > U somewhere.
double sandwich_quality(const ProfileCurve& lower, const ProfileCurve& upper);

// CSV rows: interval_id,delta,atoms,certified_flag.
void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves);

} // namespace lix
