#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lix/keyset.hpp"

namespace lix {

// Finite empirical query distribution: (query key, weight) points sorted by
// key, normalized to total mass 1.
class Workload {
  public:
    Workload() = default;

    // Sorts by key, merges equal keys, normalizes. Throws on negative weights
    // or zero total mass.
    static Workload from_points(std::vector<std::pair<Key, double>> points);

    // Uniform over the stored keys of a key set.
    static Workload uniform_over(const KeySet& ks);

    const std::vector<std::pair<Key, double>>& support() const { return pts_; }
    std::size_t size() const { return pts_.size(); }

    // Probability mass of the interval.
    double mass(const LeafInterval& iv) const;

    // Conditional workload given the interval; throws std::domain_error when
    // the interval carries zero mass.
    Workload restrict_to(const LeafInterval& iv) const;

    // Per-leaf masses for a partition (sums to 1).
    std::vector<double> leaf_masses(const Partition& pi) const;

  private:
    std::vector<std::pair<Key, double>> pts_;
};

// Shannon entropy in bits of a normalized mass vector; zero-mass entries
// contribute nothing. Throws std::invalid_argument when the masses do not sum
// to 1 within 1e-9 or contain negatives.
double leaf_entropy(const std::vector<double>& masses);

// Entropy of an unnormalized nonnegative weight vector after normalization;
// no sum check (internal helper, exposed for tests).
double entropy_of_weights(const std::vector<double>& weights);

} // namespace lix
