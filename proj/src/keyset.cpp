#include "lix/keyset.hpp"

#include <algorithm>
#include <stdexcept>

namespace lix {

KeySet KeySet::from_sorted(std::vector<Key> keys) {
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] <= keys[i - 1])
            throw std::invalid_argument("KeySet: keys must be strictly increasing");
    }
    return KeySet(std::move(keys));
}

KeySet KeySet::from_unsorted(std::vector<Key> keys, std::size_t* dup_count) {
    std::sort(keys.begin(), keys.end());
    auto last = std::unique(keys.begin(), keys.end());
    if (dup_count) *dup_count = static_cast<std::size_t>(keys.end() - last);
    keys.erase(last, keys.end());
    return KeySet(std::move(keys));
}

std::size_t KeySet::rank(Key q) const {
    return static_cast<std::size_t>(std::upper_bound(keys_.begin(), keys_.end(), q) - keys_.begin());
}

std::optional<Key> KeySet::predecessor(Key q) const {
    std::size_t r = rank(q);
    if (r == 0) return std::nullopt;
    return keys_[r - 1];
}

std::size_t rank_diameter(const KeySet& ks, const LeafInterval& iv) {
    // Rank ranges over [rank at the open lower end, rank at the upper end].
    std::size_t lo_rank = iv.has_lo ? ks.rank(iv.lo) : 0;
    std::size_t hi_rank = iv.has_hi ? ks.rank(iv.hi) : ks.size();
    return 1 + (hi_rank - lo_rank);
}

Partition Partition::from_cuts(const KeySet& ks, const std::vector<std::size_t>& cuts) {
    const std::size_t n = ks.size();
    if (n == 0) throw std::invalid_argument("Partition: empty key set");
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    for (std::size_t c : cuts) {
        if (c == 0 || c >= n || c <= bounds.back())
            throw std::invalid_argument("Partition: cuts must be interior and strictly increasing");
        bounds.push_back(c);
    }
    bounds.push_back(n);

    Partition pi;
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        LeafInterval iv;
        iv.first = bounds[j];
        iv.count = bounds[j + 1] - bounds[j];
        if (j > 0) {
            iv.has_lo = true;
            iv.lo = ks[bounds[j] - 1]; // boundary on the last key of the previous leaf
        }
        if (j + 2 < bounds.size()) {
            iv.has_hi = true;
            iv.hi = ks[bounds[j + 1] - 1];
        }
        pi.leaves_.push_back(iv);
    }
    return pi;
}

Partition Partition::equal_count(const KeySet& ks, std::size_t m) {
    const std::size_t n = ks.size();
    if (m == 0 || m > n) throw std::invalid_argument("Partition: bad leaf count");
    std::vector<std::size_t> cuts;
    for (std::size_t j = 1; j < m; ++j) {
        std::size_t c = j * n / m;
        if (!cuts.empty() && c <= cuts.back()) continue;
        if (c == 0 || c >= n) continue;
        cuts.push_back(c);
    }
    return from_cuts(ks, cuts);
}

std::size_t Partition::locate(Key q) const {
    // First leaf whose (inclusive) upper boundary is >= q; the last leaf is
    // unbounded above.
    std::size_t lo = 0, hi = leaves_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (leaves_[mid].has_hi && leaves_[mid].hi < q)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

} // namespace lix
