#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lix/engines.hpp"
#include "lix/keyset.hpp"

namespace lix {

// Levelled dynamization: insertions carry like a base-beta counter, each
// level holding static runs with their own routed engines; deletions are
// tombstones reconciled at merges or when a level turns half stale.
// Single-writer; readers must not overlap an update.
class DynamicIndex {
  public:
    explicit DynamicIndex(std::size_t beta, std::uint64_t level_epsilon = 64);

    bool insert(Key k); // false = duplicate, no-op
    bool erase(Key k);  // false = absent, no-op

    std::size_t rank(Key q) const;
    std::optional<Key> predecessor(Key q) const;
    bool contains(Key k) const;

    std::size_t live_size() const { return live_; }
    std::size_t level_count() const { return levels_.size(); }

    // elementary merge steps: elements written during carries, level
    // rebuilds, and per-run engine rebuilds
    std::uint64_t rebuild_steps() const { return rebuild_steps_; }
    std::uint64_t ops() const { return ops_; }

  private:
    struct Run {
        std::shared_ptr<KeySet> keys;
        std::unique_ptr<Engine> engine; // built for runs past the engine floor
        std::size_t rank(Key q) const;
    };
    struct Level {
        std::vector<Run> runs;
        std::vector<Key> tombs; // sorted; each cancels one copy in this level
        std::size_t elements() const;
    };

    Run make_run(std::vector<Key> keys);
    void carry(std::size_t level);
    void rebuild_level(std::size_t level);
    // net copies of k at a level (run copies minus tombstones)
    std::size_t net_count(const Level& lv, Key k) const;

    std::size_t beta_;
    std::uint64_t epsilon_;
    std::vector<Level> levels_;
    std::size_t live_ = 0;
    std::uint64_t rebuild_steps_ = 0;
    std::uint64_t ops_ = 0;
};

} // namespace lix
