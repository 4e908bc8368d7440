#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lix {

using Key = std::uint64_t;

// Strictly increasing set of 64-bit keys with the exact rank/predecessor
// oracle every engine is checked against.
class KeySet {
  public:
    KeySet() = default;

    // Takes an already strictly increasing vector; throws std::invalid_argument
    // on duplicates or disorder.
    static KeySet from_sorted(std::vector<Key> keys);

    // Sorts and collapses duplicates; the number of collapsed entries is
    // written to dup_count when non-null.
    static KeySet from_unsorted(std::vector<Key> keys, std::size_t* dup_count = nullptr);

    std::size_t size() const { return keys_.size(); }
    bool empty() const { return keys_.empty(); }
    Key operator[](std::size_t i) const { return keys_[i]; }
    std::span<const Key> keys() const { return keys_; }

    // rank(q) = |{x in S : x <= q}|, in [0, size()].
    std::size_t rank(Key q) const;

    // Largest key <= q, or nullopt when q precedes every key.
    std::optional<Key> predecessor(Key q) const;

  private:
    explicit KeySet(std::vector<Key> keys) : keys_(std::move(keys)) {}
    std::vector<Key> keys_;
};

// Contiguous key-aligned universe interval (lo, hi], with sentinel flags for
// the unbounded ends, plus the index range of the keys it owns.
struct LeafInterval {
    bool has_lo = false;
    Key lo = 0; // exclusive lower boundary, meaningful when has_lo
    bool has_hi = false;
    Key hi = 0; // inclusive upper boundary, meaningful when has_hi

    std::size_t first = 0; // index of the first owned key
    std::size_t count = 0; // number of owned keys

    bool contains(Key q) const {
        if (has_lo && q <= lo) return false;
        if (has_hi && q > hi) return false;
        return true;
    }
};

// 1 + max |rank(q) - rank(q')| over q, q' in the interval.
std::size_t rank_diameter(const KeySet& ks, const LeafInterval& iv);

// Ordered partition of the universe into key-aligned leaves. Built from cut
// positions in the key array; boundaries sit on the last key of each leaf.
class Partition {
  public:
    // cuts are interior cut positions (0 < c < n, strictly increasing); the
    // resulting leaves are [0,c1), [c1,c2), ..., [ck,n). Every leaf must own
    // at least one key.
    static Partition from_cuts(const KeySet& ks, const std::vector<std::size_t>& cuts);

    // Equal-count partition with m leaves (m <= n).
    static Partition equal_count(const KeySet& ks, std::size_t m);

    std::size_t leaf_count() const { return leaves_.size(); }
    const LeafInterval& leaf(std::size_t j) const { return leaves_[j]; }
    const std::vector<LeafInterval>& leaves() const { return leaves_; }

    // Index of the unique leaf containing q (binary search over boundaries).
    std::size_t locate(Key q) const;

  private:
    std::vector<LeafInterval> leaves_;
};

} // namespace lix
