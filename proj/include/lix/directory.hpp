#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lix/keyset.hpp"

namespace lix {

// Order-preserving binary directory over partition leaves. Built by
// Gilbert-Moore midpoint coding of the cumulative leaf masses (bisection on
// exact integer mass grids), which keeps leaves in key order and guarantees
// expected depth <= H(p) + 2.
class DirectoryTree {
  public:
    struct Node {
        Key split = 0;      // route left when q <= split
        int left = -1;      // child node index, or ~leaf when negative
        int right = -1;     // encoding: child < 0 means leaf index = -child - 1
    };

    // masses: one nonnegative weight per leaf (zero-mass leaves get a 2^-40
    // floor); splits[j] = inclusive upper key boundary of leaf j (size m-1).
    static DirectoryTree build(const std::vector<double>& masses,
                               const std::vector<Key>& splits);

    std::size_t leaf_count() const { return depths_.size(); }
    std::size_t depth(std::size_t leaf) const { return depths_[leaf]; }

    // Expected routing comparisons under the given masses.
    double expected_depth(const std::vector<double>& masses) const;

    // Kraft sum over leaf depths; <= 1 for every well-formed tree.
    double kraft_sum() const;

    // (leaf index, comparisons used). Comparisons equal the leaf depth.
    std::pair<std::size_t, std::size_t> route(Key q) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t size_bytes() const;

  private:
    std::vector<Node> nodes_;
    int root_enc_ = -1; // encoded root: >= 0 node index, < 0 leaf as -(leaf+1)
    std::vector<std::size_t> depths_;
};

// Radix dispatch table over the key prefix bits: maps a prefix to the first
// candidate leaf, with a bounded ordered scan as fallback. Table bytes are
// reported as directory bytes, never charged to the atom budget.
class RadixRouter {
  public:
    // bits in [1, 30]; splits as in DirectoryTree::build; key_lo/key_hi bound
    // the key domain used to size the prefix shift.
    static RadixRouter build(const std::vector<Key>& splits, Key key_lo, Key key_hi,
                             unsigned bits);

    // (leaf index, comparisons used, used_fallback_scan)
    struct Route {
        std::size_t leaf = 0;
        std::size_t comparisons = 0;
        bool fallback = false;
    };
    Route route(Key q) const;

    std::size_t table_entries() const { return table_.size(); }
    std::size_t size_bytes() const { return table_.size() * sizeof(std::uint32_t); }

  private:
    std::vector<std::uint32_t> table_; // prefix -> first candidate leaf
    std::vector<Key> splits_;
    Key base_ = 0;
    unsigned shift_ = 0;
};

} // namespace lix
