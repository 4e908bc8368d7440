#include "doctest.h"

#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "lix/errors.hpp"
#include "lix/keyset.hpp"
#include "lix/profile.hpp"

using namespace lix;

namespace {

using i128 = __int128;

// Independent feasibility oracle: Fourier-Motzkin projection of the (u, v)
// constraint system onto u via all point pairs, in exact rationals.
bool fm_feasible(const ControlCurve& c, std::size_t a, std::size_t b, std::uint64_t delta) {
    struct Frac {
        i128 num, den;
    };
    bool has_lo = false, has_hi = false;
    Frac lo{0, 1}, hi{0, 1};
    for (std::size_t s = a; s <= b; ++s) {
        for (std::size_t t = s + 1; t <= b; ++t) {
            i128 dx = static_cast<i128>(c.q[t]) - static_cast<i128>(c.q[s]);
            i128 dy = static_cast<i128>(c.f[t]) - static_cast<i128>(c.f[s]);
            i128 two_d = static_cast<i128>(delta) * 2;
            Frac l{dy - two_d, dx}, h{dy + two_d, dx};
            if (!has_lo || l.num * lo.den > lo.num * l.den) {
                lo = l;
                has_lo = true;
            }
            if (!has_hi || h.num * hi.den < hi.num * h.den) {
                hi = h;
                has_hi = true;
            }
        }
    }
    if (!has_lo || !has_hi) return true; // zero or one point
    return lo.num * hi.den <= hi.num * lo.den;
}

// Exhaustive minimum contiguous cover using the oracle feasibility.
std::size_t exhaustive_min_cover(const ControlCurve& c, std::uint64_t delta) {
    const std::size_t n = c.size();
    std::vector<std::size_t> best(n + 1, static_cast<std::size_t>(-1));
    best[0] = 0;
    for (std::size_t end = 1; end <= n; ++end)
        for (std::size_t start = 0; start < end; ++start)
            if (best[start] != static_cast<std::size_t>(-1) &&
                fm_feasible(c, start, end - 1, delta))
                best[end] = std::min(best[end], best[start] + 1);
    return best[n];
}

// Exact witness replay in integer arithmetic.
std::uint64_t replay_error_times_den(const ControlCurve& c, const SegmentWitness& w,
                                     i128* den_out) {
    i128 worst = 0;
    for (std::size_t i = w.a; i <= w.b; ++i) {
        i128 err = w.u_num * static_cast<i128>(c.q[i]) + w.v_num -
                   static_cast<i128>(c.f[i]) * w.den;
        if (err < 0) err = -err;
        if (err > worst) worst = err;
    }
    *den_out = w.den;
    return static_cast<std::uint64_t>(worst / w.den) + ((worst % w.den) ? 1 : 0);
}

ControlCurve make_curve(std::vector<Key> q, std::vector<std::uint64_t> f) {
    ControlCurve c;
    c.q = std::move(q);
    c.f = std::move(f);
    return c;
}

ControlCurve random_curve(std::mt19937_64& rng, std::size_t n, Key key_span,
                          std::uint64_t max_jump) {
    std::vector<Key> q;
    std::vector<std::uint64_t> f;
    Key x = rng() % 100;
    std::uint64_t y = rng() % 10;
    for (std::size_t i = 0; i < n; ++i) {
        q.push_back(x);
        f.push_back(y);
        x += 1 + rng() % key_span;
        y += rng() % (max_jump + 1);
    }
    return make_curve(std::move(q), std::move(f));
}

} // namespace

TEST_CASE("is_delta_linear basics") {
    // collinear points are feasible at delta 0
    ControlCurve lin = make_curve({0, 10, 20, 30}, {0, 1, 2, 3});
    auto r = is_delta_linear(lin, 0, 3, 0);
    CHECK(r.feasible);

    // a single point is feasible at delta 0
    ControlCurve one = make_curve({42}, {7});
    CHECK(is_delta_linear(one, 0, 0, 0).feasible);

    // two-plateau staircase with jump > 2 delta is infeasible over the span
    ControlCurve stair = make_curve({0, 1, 2, 3}, {0, 0, 10, 10});
    CHECK(!is_delta_linear(stair, 0, 3, 1).feasible);
    CHECK(is_delta_linear(stair, 0, 1, 1).feasible);
    CHECK(is_delta_linear(stair, 2, 3, 1).feasible);

    CHECK_THROWS_AS(is_delta_linear(stair, 2, 1, 1), std::invalid_argument);
}

TEST_CASE("is_delta_linear matches the pairwise oracle on random curves") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + rng() % 14;
        ControlCurve c = random_curve(rng, n, 50, 12);
        std::uint64_t delta = rng() % 8;
        std::size_t a = rng() % n;
        std::size_t b = a + rng() % (n - a);
        bool expect = fm_feasible(c, a, b, delta);
        auto got = is_delta_linear(c, a, b, delta);
        CHECK(got.feasible == expect);
        if (got.feasible) {
            i128 den = 1;
            std::uint64_t err = replay_error_times_den(c, got.witness, &den);
            CHECK(err <= delta);
        }
    }
}

TEST_CASE("min_segment_cover basics") {
    ControlCurve lin = make_curve({0, 10, 20, 30, 40}, {0, 1, 2, 3, 4});
    CHECK(min_segment_cover(lin, 0).count == 1);

    ControlCurve stair = make_curve({0, 1, 2, 3}, {0, 0, 10, 10});
    auto cover = min_segment_cover(stair, 1);
    CHECK(cover.count == 2);
    CHECK(cover.blocks.size() == 2);
    CHECK(cover.blocks[0].a == 0);
    CHECK(cover.blocks[1].b == 3);
}

TEST_CASE("min_segment_cover equals the exhaustive oracle") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 20;
        ControlCurve c = random_curve(rng, n, 30, 9);
        std::uint64_t delta = rng() % 6;
        auto cover = min_segment_cover(c, delta);
        CHECK(cover.count == exhaustive_min_cover(c, delta));
        // blocks tile [0, n) and replay within delta
        std::size_t pos = 0;
        for (const auto& blk : cover.blocks) {
            CHECK(blk.a == pos);
            i128 den = 1;
            CHECK(replay_error_times_den(c, blk, &den) <= delta);
            pos = blk.b + 1;
        }
        CHECK(pos == n);
    }
}

TEST_CASE("cover counts are nonincreasing in delta") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 50; ++trial) {
        ControlCurve c = random_curve(rng, 3 + rng() % 40, 40, 10);
        std::size_t prev_dp = static_cast<std::size_t>(-1);
        std::size_t prev_greedy = static_cast<std::size_t>(-1);
        for (std::uint64_t delta : {0, 1, 2, 4, 8, 16}) {
            auto dp = min_segment_cover(c, delta);
            auto gr = greedy_cover(c, delta);
            CHECK(dp.count <= prev_dp);
            CHECK(gr.count <= prev_greedy);
            CHECK(dp.count <= gr.count);
            prev_dp = dp.count;
            prev_greedy = gr.count;
        }
    }
}

TEST_CASE("certified curve of the running example") {
    KeySet ks = KeySet::from_sorted({10, 20, 30, 40, 50, 60, 70, 80});

    LeafInterval i1; // (-inf, 45]
    i1.has_hi = true;
    i1.hi = 45;
    i1.first = 0;
    i1.count = 4;
    ControlCurve c1 = certified_curve(ks, i1);
    REQUIRE(c1.size() == 6); // 0, 10, 20, 30, 40, 45
    CHECK(c1.q.front() == 0);
    CHECK(c1.q.back() == 45);
    CHECK(c1.f.back() == 4);

    // one counted segment certifies radius 1 on I1
    auto cover1 = min_segment_cover(c1, 1);
    CHECK(cover1.count == 1);

    LeafInterval i2; // (45, inf)
    i2.has_lo = true;
    i2.lo = 45;
    i2.first = 4;
    i2.count = 4;
    ControlCurve c2 = certified_curve(ks, i2);
    CHECK(c2.q.front() == 46);
    CHECK(c2.f.front() == 4);
}

TEST_CASE("profile_curve conventions") {
    KeySet ks = KeySet::from_sorted({10, 20, 30, 40, 50, 60, 70, 80});

    LeafInterval i1;
    i1.has_hi = true;
    i1.hi = 45;
    i1.first = 0;
    i1.count = 4;
    std::uint64_t r1 = rank_diameter(ks, i1);
    CHECK(r1 == 5);
    ProfileCurve pc = profile_curve(ks, i1, pow2_radius_grid(r1));
    CHECK(pc.comp_at(1) == 1);    // the running example's counted segment
    CHECK(pc.comp_at(r1) == 0);   // convention entry
    CHECK(pc.comp_at(0) >= 1);
    CHECK(pc.delta_for_atoms(0) == r1);

    // tight single-key interval: Comp(0) = 1, Comp(R) = 0
    KeySet single = KeySet::from_sorted({100});
    LeafInterval tight;
    tight.has_lo = true;
    tight.lo = 99;
    tight.has_hi = true;
    tight.hi = 100;
    tight.count = 1;
    std::uint64_t r = rank_diameter(single, tight);
    CHECK(r == 2);
    ProfileCurve spc = profile_curve(single, tight, pow2_radius_grid(r));
    CHECK(spc.comp_at(0) == 1);
    CHECK(spc.comp_at(r) == 0);
}

TEST_CASE("profile_curve matches exhaustive cover on a random interval") {
    std::mt19937_64 rng(404);
    std::vector<Key> keys;
    Key x = 5;
    for (int i = 0; i < 20; ++i) {
        keys.push_back(x);
        x += 1 + rng() % 1000;
    }
    KeySet ks = KeySet::from_sorted(keys);
    LeafInterval iv;
    iv.count = ks.size();
    std::uint64_t r = rank_diameter(ks, iv);
    ControlCurve curve = certified_curve(ks, iv);
    ProfileCurve pc = profile_curve(ks, iv, pow2_radius_grid(r));
    for (const auto& [d, atoms] : pc.points) {
        if (d >= r)
            CHECK(atoms == 0);
        else
            CHECK(atoms == exhaustive_min_cover(curve, d));
    }
}

TEST_CASE("sampled curves are tagged sampled") {
    std::vector<Key> keys;
    for (int i = 0; i < 200; ++i) keys.push_back(10 * i + 1);
    KeySet ks = KeySet::from_sorted(keys);
    LeafInterval iv;
    iv.count = ks.size();
    ProfileCurve pc = profile_curve(ks, iv, {0, 4, 16}, true, 32);
    CHECK(!pc.certified);
    ProfileCurve full = profile_curve(ks, iv, {0, 4, 16});
    CHECK(full.certified);
}

TEST_CASE("parallel profile kernel equals the serial reference") {
    std::mt19937_64 rng(505);
    std::vector<Key> raw(4096);
    for (auto& k : raw) k = rng();
    KeySet ks = KeySet::from_unsorted(raw);
    Partition pi = Partition::equal_count(ks, 64);
    auto grid = pow2_radius_grid(rank_diameter(ks, pi.leaf(0)));
    auto serial = profile_curves_serial(ks, pi, grid, true);
    auto parallel = profile_curves_parallel(ks, pi, grid, true);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t j = 0; j < serial.size(); ++j) {
        CHECK(serial[j].points == parallel[j].points);
        CHECK(serial[j].rank_diam == parallel[j].rank_diam);
    }
}

TEST_CASE("sandwich quality") {
    ProfileCurve l, u;
    l.rank_diam = u.rank_diam = 8;
    l.points = {{0, 4}, {2, 2}, {8, 0}};
    u.points = {{0, 8}, {2, 4}, {8, 0}};
    CHECK(sandwich_quality(l, l) == doctest::Approx(1.0));
    CHECK(sandwich_quality(l, u) == doctest::Approx(2.0));
    ProfileCurve bad = l;
    bad.points[0].second = 16;
    CHECK_THROWS_AS(sandwich_quality(bad, u), certificate_error);
}

TEST_CASE("DP-exact versus greedy cover gives a finite quality on random data") {
    std::mt19937_64 rng(606);
    std::vector<Key> raw(512);
    for (auto& k : raw) k = rng() % 100000;
    KeySet ks = KeySet::from_unsorted(raw);
    LeafInterval iv;
    iv.count = ks.size();
    std::uint64_t r = rank_diameter(ks, iv);
    auto grid = pow2_radius_grid(r);
    ProfileCurve exact = profile_curve(ks, iv, grid, false);
    ProfileCurve upper = profile_curve(ks, iv, grid, true);
    double gamma = sandwich_quality(exact, upper);
    CHECK(gamma >= 1.0);
    CHECK(gamma < 1e9);
}

TEST_CASE("profile CSV serialization") {
    ProfileCurve pc;
    pc.interval_id = 3;
    pc.certified = true;
    pc.rank_diam = 4;
    pc.points = {{0, 2}, {4, 0}};
    std::ostringstream os;
    write_profile_csv(os, {pc});
    CHECK(os.str() == "# lix-profile-csv v1\ninterval_id,delta,atoms,certified\n3,0,2,1\n3,4,0,1\n");
}
