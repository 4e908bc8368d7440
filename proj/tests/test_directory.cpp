#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "lix/directory.hpp"
#include "lix/errors.hpp"
#include "lix/keyset.hpp"
#include "lix/workload.hpp"

using namespace lix;

namespace {

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t m) {
    std::vector<double> p(m);
    double total = 0.0;
    for (auto& x : p) {
        x = std::pow(static_cast<double>(1 + rng() % 1000), 1.0 + (rng() % 3));
        total += x;
    }
    for (auto& x : p) x /= total;
    return p;
}

std::vector<Key> even_splits(std::size_t m, Key step = 100) {
    std::vector<Key> s(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) s[j] = step * (j + 1);
    return s;
}

} // namespace

TEST_CASE("single leaf routes with zero comparisons") {
    DirectoryTree t = DirectoryTree::build({1.0}, {});
    CHECK(t.depth(0) == 0);
    auto [leaf, comps] = t.route(12345);
    CHECK(leaf == 0);
    CHECK(comps == 0);
    CHECK(t.expected_depth({1.0}) == doctest::Approx(0.0));
}

TEST_CASE("uniform four leaves become a balanced depth-2 tree") {
    std::vector<double> p(4, 0.25);
    DirectoryTree t = DirectoryTree::build(p, even_splits(4));
    for (std::size_t j = 0; j < 4; ++j) CHECK(t.depth(j) == 2);
    CHECK(t.expected_depth(p) == doctest::Approx(2.0));
    CHECK(t.kraft_sum() == doctest::Approx(1.0));
}

TEST_CASE("two equal leaves use one comparison") {
    DirectoryTree t = DirectoryTree::build({0.5, 0.5}, {100});
    CHECK(t.route(50).second == 1);
    CHECK(t.route(200).second == 1);
}

TEST_CASE("expected depth within [H, H+2] and Kraft <= 1 on random distributions") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t m = 1 + rng() % 256;
        auto p = random_distribution(rng, m);
        DirectoryTree t = DirectoryTree::build(p, even_splits(m));
        double h = leaf_entropy(p);
        double e = t.expected_depth(p);
        CHECK(e >= h - 1e-9);
        CHECK(e <= h + 2.0 + 1e-9);
        CHECK(t.kraft_sum() <= 1.0 + 1e-12);
    }
}

TEST_CASE("route returns the containing leaf with comparisons equal to depth") {
    std::mt19937_64 rng(55);
    std::size_t m = 37;
    auto p = random_distribution(rng, m);
    auto splits = even_splits(m, 1000);
    DirectoryTree t = DirectoryTree::build(p, splits);
    for (int i = 0; i < 2000; ++i) {
        Key q = rng() % (1000 * (m + 2));
        auto [leaf, comps] = t.route(q);
        // linear-scan oracle over boundaries
        std::size_t expect = 0;
        while (expect + 1 < m && q > splits[expect]) ++expect;
        CHECK(leaf == expect);
        CHECK(comps == t.depth(leaf));
    }
}

TEST_CASE("degenerate chain depths give Kraft sum 1") {
    // masses forcing depths (1, 2, 2)
    DirectoryTree t = DirectoryTree::build({0.5, 0.25, 0.25}, even_splits(3));
    CHECK(t.depth(0) == 1);
    CHECK(t.depth(1) == 2);
    CHECK(t.depth(2) == 2);
    CHECK(t.kraft_sum() == doctest::Approx(1.0));
}

TEST_CASE("zero-mass leaves stay routable") {
    DirectoryTree t = DirectoryTree::build({0.5, 0.0, 0.5}, even_splits(3));
    auto [leaf, comps] = t.route(150);
    CHECK(leaf == 1);
    CHECK(comps >= 1);
}

TEST_CASE("radix router basics") {
    // r=1 over an even key domain: two ranges split at the top bit
    std::vector<Key> splits = {511};
    RadixRouter r = RadixRouter::build(splits, 0, 1023, 1);
    CHECK(r.route(10).leaf == 0);
    CHECK(r.route(512).leaf == 1);
    CHECK(r.route(10).comparisons <= 1);

    CHECK_THROWS_AS(RadixRouter::build(splits, 0, 1023, 0), config_error);
    CHECK_THROWS_AS(RadixRouter::build(splits, 0, 1023, 31), config_error);

    RadixRouter wide = RadixRouter::build(splits, 0, 1023, 18);
    CHECK(wide.size_bytes() == wide.table_entries() * sizeof(std::uint32_t));
}

TEST_CASE("radix and alphabetic routers agree on every query") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t m = 2 + rng() % 64;
        // adversarially skewed boundaries: clustered low plus a huge outlier
        std::vector<Key> splits;
        Key x = 0;
        for (std::size_t j = 0; j + 1 < m; ++j) {
            x += 1 + rng() % 5;
            splits.push_back(x);
        }
        if (!splits.empty()) splits.back() = (Key(1) << 60) + (rng() % 1000);
        std::sort(splits.begin(), splits.end());
        splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
        m = splits.size() + 1;

        auto p = random_distribution(rng, m);
        DirectoryTree tree = DirectoryTree::build(p, splits);
        RadixRouter radix = RadixRouter::build(splits, 0, Key(1) << 61, 10);
        for (int i = 0; i < 500; ++i) {
            Key q = rng() % ((Key(1) << 61) + 5);
            CHECK(tree.route(q).first == radix.route(q).leaf);
        }
    }
}
