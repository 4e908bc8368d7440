#include "lix/profile.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lix/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lix {

namespace {

using i128 = __int128;

i128 to_i128(Key x) { return static_cast<i128>(x); }

} // namespace

ControlCurve certified_curve(const KeySet& ks, const LeafInterval& iv) {
    ControlCurve c;
    c.certified = true;
    auto push = [&c](Key q, std::uint64_t f) {
        if (!c.q.empty() && c.q.back() == q) return; // boundary endpoint collides with a key
        c.q.push_back(q);
        c.f.push_back(f);
    };
    Key lo_pt = iv.has_lo ? iv.lo + 1 : 0;
    push(lo_pt, ks.rank(lo_pt));
    for (std::size_t i = iv.first; i < iv.first + iv.count; ++i) push(ks[i], i + 1);
    Key hi_pt = iv.has_hi ? iv.hi : std::numeric_limits<Key>::max();
    push(hi_pt, ks.rank(hi_pt));
    return c;
}

ControlCurve sampled_curve(const KeySet& ks, const LeafInterval& iv, std::size_t max_points) {
    ControlCurve full = certified_curve(ks, iv);
    if (max_points < 2) max_points = 2;
    if (full.size() <= max_points) return full; // nothing dropped: still certified
    ControlCurve c;
    c.certified = false;
    std::size_t n = full.size();
    for (std::size_t i = 0; i < max_points; ++i) {
        std::size_t idx = i * (n - 1) / (max_points - 1);
        if (!c.q.empty() && c.q.back() == full.q[idx]) continue;
        c.q.push_back(full.q[idx]);
        c.f.push_back(full.f[idx]);
    }
    return c;
}

// ---------------------------------------------------------------------------
// SlopeCone
// ---------------------------------------------------------------------------

void SlopeCone::reset(std::uint64_t delta) {
    delta_ = delta;
    xs_.clear();
    ys_.clear();
    lower_hull_.clear();
    upper_hull_.clear();
    has_lo_ = has_hi_ = false;
}

bool SlopeCone::frac_le(const Frac& a, const Frac& b) {
    return a.num * b.den <= b.num * a.den;
}

// Extreme slope from hull points to the external point (px, py), px strictly
// right of every hull x. maximize=true -> max slope over a lower hull;
// maximize=false -> min slope over an upper hull. The sequence of slopes along
// the hull is unimodal, so adjacent comparison peak search applies.
__int128 SlopeCone::max_slope_to(i128 px, i128 py, const std::vector<std::size_t>& hull,
                                 bool maximize, Frac* out) const {
    auto slope_cmp = [&](std::size_t i, std::size_t j) {
        // sign of g(i) - g(j) with positive denominators
        i128 lhs = (py - static_cast<i128>(ys_[i])) * (px - to_i128(xs_[j]));
        i128 rhs = (py - static_cast<i128>(ys_[j])) * (px - to_i128(xs_[i]));
        return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    };
    std::size_t lo = 0, hi = hull.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        int c = slope_cmp(hull[mid], hull[mid + 1]);
        bool next_better = maximize ? (c < 0) : (c > 0);
        if (next_better)
            lo = mid + 1;
        else
            hi = mid;
    }
    std::size_t best = hull[lo];
    out->num = py - static_cast<i128>(ys_[best]);
    out->den = px - to_i128(xs_[best]);
    return 0;
}

bool SlopeCone::try_append(Key x, std::uint64_t y) {
    if (!xs_.empty() && x <= xs_.back())
        throw std::invalid_argument("SlopeCone: control keys must be strictly increasing");

    Frac new_lo = lo_, new_hi = hi_;
    bool new_has_lo = has_lo_, new_has_hi = has_hi_;
    if (!xs_.empty()) {
        const i128 two_delta = static_cast<i128>(delta_) * 2;
        Frac cand;
        max_slope_to(to_i128(x), static_cast<i128>(y) - two_delta, lower_hull_, true, &cand);
        if (!new_has_lo || frac_le(new_lo, cand)) {
            new_lo = cand;
            new_has_lo = true;
        }
        max_slope_to(to_i128(x), static_cast<i128>(y) + two_delta, upper_hull_, false, &cand);
        if (!new_has_hi || frac_le(cand, new_hi)) {
            new_hi = cand;
            new_has_hi = true;
        }
        if (new_has_lo && new_has_hi && !frac_le(new_lo, new_hi)) return false;
    }
    lo_ = new_lo;
    hi_ = new_hi;
    has_lo_ = new_has_lo;
    has_hi_ = new_has_hi;

    std::size_t idx = xs_.size();
    xs_.push_back(x);
    ys_.push_back(y);
    // lower hull: edge slopes strictly increasing
    auto slope_ge = [&](std::size_t a, std::size_t b, std::size_t c) {
        // slope(a->b) >= slope(b->c)
        i128 lhs = (static_cast<i128>(ys_[b]) - ys_[a]) * (to_i128(xs_[c]) - to_i128(xs_[b]));
        i128 rhs = (static_cast<i128>(ys_[c]) - ys_[b]) * (to_i128(xs_[b]) - to_i128(xs_[a]));
        return lhs >= rhs;
    };
    while (lower_hull_.size() >= 2 &&
           slope_ge(lower_hull_[lower_hull_.size() - 2], lower_hull_.back(), idx))
        lower_hull_.pop_back();
    lower_hull_.push_back(idx);
    // upper hull: edge slopes strictly decreasing
    auto slope_le = [&](std::size_t a, std::size_t b, std::size_t c) {
        i128 lhs = (static_cast<i128>(ys_[b]) - ys_[a]) * (to_i128(xs_[c]) - to_i128(xs_[b]));
        i128 rhs = (static_cast<i128>(ys_[c]) - ys_[b]) * (to_i128(xs_[b]) - to_i128(xs_[a]));
        return lhs <= rhs;
    };
    while (upper_hull_.size() >= 2 &&
           slope_le(upper_hull_[upper_hull_.size() - 2], upper_hull_.back(), idx))
        upper_hull_.pop_back();
    upper_hull_.push_back(idx);
    return true;
}

SegmentWitness SlopeCone::witness() const {
    if (xs_.empty()) throw std::logic_error("SlopeCone: witness of an empty window");
    SegmentWitness w;
    if (has_lo_ && lo_.num > 0) {
        w.u_num = lo_.num;
        w.den = lo_.den;
    } else if (has_hi_ && hi_.num < 0) {
        w.u_num = hi_.num;
        w.den = hi_.den;
    } else {
        w.u_num = 0;
        w.den = 1;
    }
    const i128 d = static_cast<i128>(delta_);
    i128 vlo = std::numeric_limits<std::int64_t>::min(); // refined below
    i128 vhi = 0;
    bool first = true;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        i128 base = static_cast<i128>(ys_[i]) * w.den - w.u_num * to_i128(xs_[i]);
        i128 lo_i = base - d * w.den;
        i128 hi_i = base + d * w.den;
        if (first) {
            vlo = lo_i;
            vhi = hi_i;
            first = false;
        } else {
            if (lo_i > vlo) vlo = lo_i;
            if (hi_i < vhi) vhi = hi_i;
        }
    }
    if (vlo > vhi) throw certificate_error("SlopeCone: witness extraction on infeasible window");
    w.v_num = vlo + (vhi - vlo) / 2;
    // exact replay of the certificate
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        i128 err = w.u_num * to_i128(xs_[i]) + w.v_num - static_cast<i128>(ys_[i]) * w.den;
        if (err < 0) err = -err;
        if (err > d * w.den) throw certificate_error("SlopeCone: witness replay exceeded delta");
    }
    return w;
}

// ---------------------------------------------------------------------------
// Feasibility and covers
// ---------------------------------------------------------------------------

FeasibilityResult is_delta_linear(const ControlCurve& curve, std::size_t a, std::size_t b,
                                  std::uint64_t delta) {
    if (a > b || b >= curve.size())
        throw std::invalid_argument("is_delta_linear: bad block indices");
    SlopeCone cone(delta);
    for (std::size_t i = a; i <= b; ++i) {
        if (!cone.try_append(curve.q[i], curve.f[i])) return {false, {}};
    }
    FeasibilityResult r;
    r.feasible = true;
    r.witness = cone.witness();
    r.witness.a = a;
    r.witness.b = b;
    return r;
}

SegmentCover min_segment_cover(const ControlCurve& curve, std::uint64_t delta) {
    const std::size_t n = curve.size();
    if (n == 0) throw std::invalid_argument("min_segment_cover: empty curve");

    std::vector<std::size_t> dp(n + 1, 0), parent(n + 1, 0);
    SlopeCone cone(delta);
    std::size_t window_start = 0; // 0-based index of the leftmost point in the cone
    std::deque<std::size_t> mins; // prefix indices, dp values nondecreasing

    auto rebuild = [&](std::size_t from, std::size_t upto) {
        cone.reset(delta);
        for (std::size_t i = from; i <= upto; ++i)
            if (!cone.try_append(curve.q[i], curve.f[i])) return false;
        return true;
    };

    for (std::size_t b = 0; b < n; ++b) {
        if (!cone.try_append(curve.q[b], curve.f[b])) {
            do {
                ++window_start;
            } while (!rebuild(window_start, b));
        }
        // feasible blocks ending at b start anywhere in [window_start, b];
        // dp[b+1] = 1 + min dp[j] over j in [window_start, b]
        while (!mins.empty() && dp[mins.back()] >= dp[b]) mins.pop_back();
        mins.push_back(b);
        while (mins.front() < window_start) mins.pop_front();
        dp[b + 1] = 1 + dp[mins.front()];
        parent[b + 1] = mins.front();
    }

    SegmentCover cover;
    cover.count = dp[n];
    std::size_t pos = n;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    while (pos > 0) {
        blocks.emplace_back(parent[pos], pos - 1);
        pos = parent[pos];
    }
    std::reverse(blocks.begin(), blocks.end());
    for (auto [a, b] : blocks) {
        FeasibilityResult r = is_delta_linear(curve, a, b, delta);
        if (!r.feasible) throw certificate_error("min_segment_cover: reconstructed block infeasible");
        cover.blocks.push_back(r.witness);
    }
    return cover;
}

SegmentCover greedy_cover(const ControlCurve& curve, std::uint64_t delta) {
    const std::size_t n = curve.size();
    if (n == 0) throw std::invalid_argument("greedy_cover: empty curve");
    SegmentCover cover;
    SlopeCone cone(delta);
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cone.try_append(curve.q[i], curve.f[i])) continue;
        SegmentWitness w = cone.witness();
        w.a = start;
        w.b = i - 1;
        cover.blocks.push_back(w);
        cone.reset(delta);
        cone.try_append(curve.q[i], curve.f[i]);
        start = i;
    }
    SegmentWitness w = cone.witness();
    w.a = start;
    w.b = n - 1;
    cover.blocks.push_back(w);
    cover.count = cover.blocks.size();
    return cover;
}

// ---------------------------------------------------------------------------
// Profile curves
// ---------------------------------------------------------------------------

std::size_t ProfileCurve::comp_at(std::uint64_t delta) const {
    if (delta >= rank_diam) return 0; // empty-predictor convention
    auto it = std::lower_bound(points.begin(), points.end(), delta,
                               [](const auto& p, std::uint64_t d) { return p.first < d; });
    if (it == points.end() || it->first != delta)
        throw std::invalid_argument("ProfileCurve: delta not on the grid");
    return it->second;
}

std::uint64_t ProfileCurve::delta_for_atoms(std::size_t atoms) const {
    for (const auto& [d, a] : points)
        if (a <= atoms) return d;
    return rank_diam;
}

std::vector<std::uint64_t> pow2_radius_grid(std::uint64_t rank_diam) {
    std::vector<std::uint64_t> grid;
    grid.push_back(0);
    for (std::uint64_t d = 1; d < rank_diam; d *= 2) grid.push_back(d);
    grid.push_back(rank_diam);
    return grid;
}

ProfileCurve profile_curve(const KeySet& ks, const LeafInterval& iv,
                           std::vector<std::uint64_t> grid, bool use_greedy,
                           std::size_t sample_cap) {
    ProfileCurve pc;
    pc.rank_diam = rank_diameter(ks, iv);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    // entries past the diameter collapse into the convention point (R_I, 0)
    while (!grid.empty() && grid.back() > pc.rank_diam) grid.pop_back();
    if (grid.empty() || grid.back() < pc.rank_diam) grid.push_back(pc.rank_diam);

    ControlCurve curve =
        sample_cap > 0 ? sampled_curve(ks, iv, sample_cap) : certified_curve(ks, iv);
    pc.certified = curve.certified;

    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::uint64_t d : grid) {
        std::size_t atoms;
        if (d >= pc.rank_diam)
            atoms = 0;
        else
            atoms = use_greedy ? greedy_cover(curve, d).count : min_segment_cover(curve, d).count;
        if (atoms > prev)
            throw certificate_error("profile_curve: atom counts must be nonincreasing in delta");
        prev = atoms;
        pc.points.emplace_back(d, atoms);
    }
    return pc;
}

namespace {

std::vector<ProfileCurve> profile_curves_impl(const KeySet& ks, const Partition& pi,
                                              const std::vector<std::uint64_t>& grid,
                                              bool use_greedy, std::size_t sample_cap,
                                              bool parallel) {
    std::vector<ProfileCurve> out(pi.leaf_count());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(pi.leaf_count()); ++j) {
        out[j] = profile_curve(ks, pi.leaf(j), grid, use_greedy, sample_cap);
        out[j].interval_id = static_cast<std::size_t>(j);
    }
    (void)parallel;
    return out;
}

} // namespace

std::vector<ProfileCurve> profile_curves_serial(const KeySet& ks, const Partition& pi,
                                                const std::vector<std::uint64_t>& grid,
                                                bool use_greedy, std::size_t sample_cap) {
    return profile_curves_impl(ks, pi, grid, use_greedy, sample_cap, false);
}

std::vector<ProfileCurve> profile_curves_parallel(const KeySet& ks, const Partition& pi,
                                                  const std::vector<std::uint64_t>& grid,
                                                  bool use_greedy, std::size_t sample_cap) {
    return profile_curves_impl(ks, pi, grid, use_greedy, sample_cap, true);
}

double sandwich_quality(const ProfileCurve& lower, const ProfileCurve& upper) {
    if (lower.points.size() != upper.points.size())
        throw std::invalid_argument("sandwich_quality: grids differ");
    double gamma = 1.0;
    for (std::size_t i = 0; i < lower.points.size(); ++i) {
        if (lower.points[i].first != upper.points[i].first)
            throw std::invalid_argument("sandwich_quality: grids differ");
        double l = static_cast<double>(lower.points[i].second);
        double u = static_cast<double>(upper.points[i].second);
        if (l > u) throw certificate_error("sandwich_quality: lower exceeds upper");
        gamma = std::max(gamma, u / std::max(1.0, l));
    }
    return gamma;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves) {
    os << "# lix-profile-csv v1\n";
    os << "interval_id,delta,atoms,certified\n";
    for (const auto& pc : curves)
        for (const auto& [d, a] : pc.points)
            os << pc.interval_id << ',' << d << ',' << a << ',' << (pc.certified ? 1 : 0) << '\n';
}

} // namespace lix
