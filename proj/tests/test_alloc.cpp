#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "lix/alloc.hpp"
#include "lix/keyset.hpp"
#include "lix/profile.hpp"
#include "lix/workload.hpp"

using namespace lix;

namespace {

std::vector<PowerLawLeaf> uniform_instance() {
    std::vector<PowerLawLeaf> ls(32);
    for (auto& l : ls) l = {1.0 / 32.0, 256.0, 256, 1.0};
    return ls;
}

std::vector<PowerLawLeaf> zipf_instance() {
    std::vector<PowerLawLeaf> ls(32);
    double z = 0.0;
    for (int j = 1; j <= 32; ++j) z += std::pow(j, -1.2);
    for (int j = 1; j <= 32; ++j) ls[j - 1] = {std::pow(j, -1.2) / z, 256.0, 256, 1.0};
    return ls;
}

std::vector<PowerLawLeaf> hard_leaf_instance() {
    std::vector<PowerLawLeaf> ls(32);
    ls[0] = {0.25, 4096.0, 256, 1.0};
    for (int j = 1; j < 32; ++j) ls[j] = {0.75 / 31.0, 64.0, 256, 1.0};
    return ls;
}

// Exhaustive minimizer over all radius tuples on the profile grids.
double brute_deficiency(const std::vector<ProfileCurve>& profiles,
                        const std::vector<double>& masses, std::size_t budget) {
    double best = 1e300;
    std::vector<std::size_t> pick(profiles.size(), 0);
    while (true) {
        std::size_t atoms = 0;
        double cost = 0.0;
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            const auto& [d, a] = profiles[j].points[pick[j]];
            atoms += a;
            cost += masses[j] * std::log2(1.0 + static_cast<double>(d));
        }
        if (atoms <= budget) best = std::min(best, cost);
        std::size_t j = 0;
        for (; j < profiles.size(); ++j) {
            if (++pick[j] < profiles[j].points.size()) break;
            pick[j] = 0;
        }
        if (j == profiles.size()) break;
    }
    return best;
}

std::vector<ProfileCurve> random_profiles(std::mt19937_64& rng, std::size_t m) {
    std::vector<ProfileCurve> ps;
    for (std::size_t j = 0; j < m; ++j) {
        PowerLawLeaf leaf;
        leaf.mass = 1.0;
        leaf.hardness = 1.0 + static_cast<double>(rng() % 64);
        leaf.rank_diam = 2 + rng() % 62;
        leaf.alpha = 0.5 + 0.25 * static_cast<double>(rng() % 7);
        ps.push_back(powerlaw_profile(leaf, j));
    }
    return ps;
}

std::vector<double> random_masses(std::mt19937_64& rng, std::size_t m) {
    std::vector<double> ms(m);
    double total = 0.0;
    for (auto& p : ms) {
        p = 1.0 + static_cast<double>(rng() % 1000);
        total += p;
    }
    for (auto& p : ms) p /= total;
    return ms;
}

} // namespace

TEST_CASE("power-law closed form reproduces the miniature calculation") {
    const std::vector<std::size_t> budgets = {32, 64, 128, 256};

    auto unif = uniform_instance();
    CHECK(powerlaw_cost(unif, 32).entropy_bits == doctest::Approx(5.00).epsilon(1e-6));
    const double unif_expect[] = {7.01, 6.43, 5.71, 4.88};
    for (std::size_t i = 0; i < budgets.size(); ++i)
        CHECK(powerlaw_cost(unif, budgets[i]).repair_bits ==
              doctest::Approx(unif_expect[i]).epsilon(0.0015));

    auto zipf = zipf_instance();
    CHECK(powerlaw_cost(zipf, 32).entropy_bits == doctest::Approx(3.75).epsilon(0.003));
    const double zipf_expect[] = {5.66, 5.18, 4.54, 3.78};
    for (std::size_t i = 0; i < budgets.size(); ++i)
        CHECK(powerlaw_cost(zipf, budgets[i]).repair_bits ==
              doctest::Approx(zipf_expect[i]).epsilon(0.004));

    auto hard = hard_leaf_instance();
    CHECK(powerlaw_cost(hard, 32).entropy_bits == doctest::Approx(4.53).epsilon(0.002));
    const double hard_expect[] = {6.05, 5.48, 4.77, 3.98};
    for (std::size_t i = 0; i < budgets.size(); ++i)
        CHECK(powerlaw_cost(hard, budgets[i]).repair_bits ==
              doctest::Approx(hard_expect[i]).epsilon(0.002));
}

TEST_CASE("water-filling radii") {
    // kappa/(B_eff p) = 256 * 32 / 64 = 128 -> 1 + delta = 128
    std::vector<PowerLawLeaf> ls(32);
    for (auto& l : ls) l = {1.0 / 32.0, 256.0, 100000, 1.0};
    auto radii = powerlaw_radii(ls, 32);
    CHECK(radii[0] == 127);

    // atom-floor: ratio <= 1 -> delta = 0
    std::vector<PowerLawLeaf> floor_ls = {{0.9, 0.5, 64, 1.0}};
    CHECK(powerlaw_radii(floor_ls, 4)[0] == 0);

    // full-repair cap: ratio >= 1 + R -> delta = R
    std::vector<PowerLawLeaf> cap_ls = {{1e-6, 1e9, 16, 1.0}};
    CHECK(powerlaw_radii(cap_ls, 0)[0] == 16);
}

TEST_CASE("shadow envelope") {
    PowerLawLeaf leaf{0.25, 64.0, 64, 1.0};
    ProfileCurve pc = powerlaw_profile(leaf);

    // lambda = 0: atoms are free, the smallest radius wins with Psi = p log2(1+d_min)
    auto free_atoms = shadow_envelope(pc, 0.25, 0.0);
    CHECK(free_atoms.delta == 0);
    CHECK(free_atoms.psi_bits == doctest::Approx(0.0));

    // lambda huge: the empty predictor wins, Psi -> p log2(1+R)
    auto costly = shadow_envelope(pc, 0.25, 1e9);
    CHECK(costly.delta == 64);
    CHECK(costly.psi_bits == doctest::Approx(0.25 * std::log2(65.0)));

    // interior lambda agrees with a grid-search oracle
    double lambda = 0.01;
    double best = 1e300;
    std::uint64_t best_d = 0;
    for (const auto& [d, a] : pc.points) {
        double v = 0.25 * std::log2(1.0 + static_cast<double>(d)) + lambda * a;
        if (v <= best) {
            best = v;
            best_d = d;
        }
    }
    auto mid = shadow_envelope(pc, 0.25, lambda);
    CHECK(mid.delta == best_d);
    CHECK(mid.psi_bits == doctest::Approx(best));
}

TEST_CASE("potential and separability") {
    std::mt19937_64 rng(42);
    auto profiles = random_profiles(rng, 4);
    auto masses = random_masses(rng, 4);

    // all radii zero at lambda 0 -> Phi = H + sum p*log2(1) + 0
    std::vector<std::uint64_t> zeros(4, 0);
    CHECK(potential(masses, zeros, profiles, 0.0) == doctest::Approx(leaf_entropy(masses)));

    // one leaf at full repair: H = 0 and Comp(R) = 0
    std::vector<double> one_mass = {1.0};
    std::vector<ProfileCurve> one_prof = {profiles[0]};
    std::vector<std::uint64_t> full = {profiles[0].rank_diam};
    CHECK(potential(one_mass, full, one_prof, 3.0) ==
          doctest::Approx(std::log2(1.0 + static_cast<double>(profiles[0].rank_diam))));

    // coordinatewise envelope minimization equals joint minimization
    for (double lambda : {0.0, 0.003, 0.05, 0.7}) {
        double joint = 1e300;
        std::vector<std::size_t> pick(4, 0);
        while (true) {
            std::vector<std::uint64_t> radii(4);
            for (std::size_t j = 0; j < 4; ++j) radii[j] = profiles[j].points[pick[j]].first;
            joint = std::min(joint, potential(masses, radii, profiles, lambda));
            std::size_t j = 0;
            for (; j < 4; ++j) {
                if (++pick[j] < profiles[j].points.size()) break;
                pick[j] = 0;
            }
            if (j == 4) break;
        }
        double separable = leaf_entropy(masses);
        for (std::size_t j = 0; j < 4; ++j)
            separable += shadow_envelope(profiles[j], masses[j], lambda).psi_bits;
        CHECK(joint == doctest::Approx(separable).epsilon(1e-12));
    }
}

TEST_CASE("greedy allocation on the running example") {
    KeySet ks = KeySet::from_sorted({10, 20, 30, 40, 50, 60, 70, 80});
    // the example's split point 45 falls inside the gap between 40 and 50
    LeafInterval i1;
    i1.has_hi = true;
    i1.hi = 45;
    i1.first = 0;
    i1.count = 4;
    LeafInterval i2;
    i2.has_lo = true;
    i2.lo = 45;
    i2.first = 4;
    i2.count = 4;
    std::vector<ProfileCurve> profiles;
    std::size_t j = 0;
    for (const auto& iv : {i1, i2}) {
        auto pc = profile_curve(ks, iv, pow2_radius_grid(rank_diameter(ks, iv)));
        pc.interval_id = j++;
        profiles.push_back(pc);
    }
    std::vector<double> masses = {0.75, 0.25};

    // B = 0: all leaves at full repair
    Allocation none = greedy_allocate(profiles, masses, 0);
    CHECK(none.atoms_used == 0);
    double full_repair = 0.0;
    for (std::size_t j = 0; j < 2; ++j)
        full_repair += masses[j] * std::log2(1.0 + static_cast<double>(profiles[j].rank_diam));
    CHECK(none.repair_bits == doctest::Approx(full_repair));

    // B = 1: the atom goes to the high-mass leaf, reaching radius 1
    Allocation one = greedy_allocate(profiles, masses, 1);
    CHECK(one.atoms_used == 1);
    CHECK(one.per_leaf[0].delta == 1);
    CHECK(one.per_leaf[0].atoms == 1);
    CHECK(one.per_leaf[1].delta == profiles[1].rank_diam);
}

TEST_CASE("greedy objective within the dual gap of the closed form") {
    auto leaves = uniform_instance();
    std::vector<ProfileCurve> profiles;
    std::vector<double> masses;
    for (std::size_t j = 0; j < leaves.size(); ++j) {
        profiles.push_back(powerlaw_profile(leaves[j], j));
        masses.push_back(leaves[j].mass);
    }
    for (std::size_t budget : {32u, 64u, 128u}) {
        Allocation a = greedy_allocate(profiles, masses, budget);
        CHECK(a.atoms_used <= budget);
        double lower = a.dual_bound_bits;
        double closed = powerlaw_cost(leaves, budget).repair_bits;
        // greedy is feasible, so it sits above the dual bound; the closed form
        // describes the same instance up to the profile grid granularity
        CHECK(a.repair_bits + 1e-12 >= lower);
        CHECK(std::abs(a.repair_bits - closed) <= 1.0);
    }
}

TEST_CASE("weak duality and deficiency") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t m = 2 + rng() % 4;
        auto profiles = random_profiles(rng, m);
        auto masses = random_masses(rng, m);
        std::size_t budget = rng() % 7;

        double def = deficiency(profiles, masses, budget);
        CHECK(def == doctest::Approx(brute_deficiency(profiles, masses, budget)).epsilon(1e-12));

        for (int i = 0; i < 20; ++i) {
            double lambda = std::pow(2.0, -10.0 + i);
            CHECK(dual_certificate(profiles, masses, budget, lambda) <= def + 1e-9);
        }

        // deficiency is nonincreasing in budget, greedy stays feasible above it
        double def2 = deficiency(profiles, masses, budget + 3);
        CHECK(def2 <= def + 1e-12);
        Allocation g = greedy_allocate(profiles, masses, budget);
        CHECK(g.repair_bits + 1e-9 >= def);
    }
}

TEST_CASE("deficiency edge cases") {
    std::mt19937_64 rng(77);
    auto profiles = random_profiles(rng, 3);
    auto masses = random_masses(rng, 3);

    // budget covering every useful atom: all minimum radii
    std::size_t huge = 0;
    double min_cost = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        std::size_t most = 0;
        for (const auto& [d, a] : profiles[j].points) most = std::max(most, a);
        huge += most;
        min_cost += masses[j] * std::log2(1.0 + static_cast<double>(profiles[j].points[0].first));
    }
    CHECK(deficiency(profiles, masses, huge + 100) == doctest::Approx(min_cost));

    // budget 0: all leaves at full repair
    double full = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        full += masses[j] * std::log2(1.0 + static_cast<double>(profiles[j].rank_diam));
    CHECK(deficiency(profiles, masses, 0) == doctest::Approx(full));
}

TEST_CASE("layer-cake identity") {
    // trivial: every ratio <= 1
    std::vector<PowerLawLeaf> easy = {{0.5, 0.1, 8, 1.0}, {0.5, 0.2, 8, 1.0}};
    auto easy_r = hard_mass(easy, 10);
    CHECK(easy_r.direct_sum_bits == doctest::Approx(0.0));
    CHECK(easy_r.layer_cake_bits == doctest::Approx(0.0));

    // single leaf with ratio 8: both sides log2 8 = 3
    std::vector<PowerLawLeaf> single = {{1.0, 16.0, 64, 1.0}};
    auto single_r = hard_mass(single, 1); // B_eff = 2, ratio = 16/2 = 8
    CHECK(single_r.direct_sum_bits == doctest::Approx(3.0));
    CHECK(single_r.layer_cake_bits == doctest::Approx(3.0));

    // random instances agree within 1e-9
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t m = 1 + rng() % 50;
        std::vector<PowerLawLeaf> ls(m);
        double total = 0.0;
        for (auto& l : ls) {
            l.mass = 1.0 + static_cast<double>(rng() % 1000);
            total += l.mass;
            l.hardness = std::pow(2.0, static_cast<double>(rng() % 16));
            l.rank_diam = 64;
            l.alpha = 1.0;
        }
        for (auto& l : ls) l.mass /= total;
        auto r = hard_mass(ls, rng() % 64);
        CHECK(r.direct_sum_bits == doctest::Approx(r.layer_cake_bits).epsilon(1e-10));
        CHECK(r.profile.mass_at(0.0 + 1e-300) <= 1.0 + 1e-12);
    }
}

TEST_CASE("capacity-concentration bound from the hard-mass profile") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t m = 2 + rng() % 30;
        std::vector<PowerLawLeaf> ls(m);
        double total = 0.0;
        for (auto& l : ls) {
            l.mass = 1.0 + static_cast<double>(rng() % 100);
            total += l.mass;
            l.hardness = 1.0 + static_cast<double>(rng() % 100000);
            l.rank_diam = 1u << 30; // caps never bind
            l.alpha = 1.0;
        }
        for (auto& l : ls) l.mass /= total;
        std::size_t budget = rng() % 256;
        double b_eff = static_cast<double>(budget) + static_cast<double>(m);
        double repair = powerlaw_cost(ls, budget).repair_bits;
        for (double rho : {2.0, 4.0, 16.0}) {
            double p_rho = 0.0;
            for (const auto& l : ls)
                if (l.hardness / (b_eff * l.mass) >= rho) p_rho += l.mass;
            CHECK(repair + 1e-9 >= p_rho * std::log2(rho));
        }
    }
}

TEST_CASE("equal-mass hard instance matches the non-uniform bound's formula") {
    for (std::size_t m : {8u, 32u}) {
        for (double kappa : {64.0, 4096.0}) {
            for (std::size_t budget : {0u, 16u, 256u}) {
                std::vector<PowerLawLeaf> ls(m);
                for (auto& l : ls) l = {1.0 / static_cast<double>(m), kappa, 1u << 30, 1.0};
                auto cost = powerlaw_cost(ls, budget);
                double b_eff = static_cast<double>(budget + m);
                double expect_repair =
                    std::log2(1.0 + std::max(1.0, kappa * static_cast<double>(m) / b_eff));
                CHECK(cost.entropy_bits ==
                      doctest::Approx(std::log2(static_cast<double>(m))).epsilon(1e-9));
                CHECK(cost.repair_bits == doctest::Approx(expect_repair).epsilon(1e-9));
                CHECK(cost.entropy_bits + cost.repair_bits + 1e-9 >=
                      std::log2(static_cast<double>(m)) +
                          std::max(0.0, std::log2(kappa * static_cast<double>(m) / b_eff)));
            }
        }
    }
}

TEST_CASE("powerlaw repair is nonincreasing in budget") {
    auto zipf = zipf_instance();
    double prev = 1e300;
    for (std::size_t b = 0; b <= 512; b += 16) {
        double r = powerlaw_cost(zipf, b).repair_bits;
        CHECK(r <= prev + 1e-12);
        prev = r;
    }
}
