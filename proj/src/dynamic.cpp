#include "lix/dynamic.hpp"

#include <algorithm>
#include <stdexcept>

namespace lix {

namespace {
constexpr std::size_t kEngineFloor = 64; // runs below this search directly
}

DynamicIndex::DynamicIndex(std::size_t beta, std::uint64_t level_epsilon)
    : beta_(beta), epsilon_(level_epsilon) {
    if (beta < 2) throw std::invalid_argument("DynamicIndex: beta >= 2 required");
}

std::size_t DynamicIndex::Run::rank(Key q) const {
    if (engine) return engine->lookup(q).rank;
    return keys->rank(q);
}

std::size_t DynamicIndex::Level::elements() const {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.keys->size();
    return n;
}

DynamicIndex::Run DynamicIndex::make_run(std::vector<Key> keys) {
    Run run;
    run.keys = std::make_shared<KeySet>(KeySet::from_sorted(std::move(keys)));
    if (run.keys->size() >= kEngineFloor) {
        run.engine = build_epsilon_pla(*run.keys, epsilon_);
        rebuild_steps_ += run.keys->size(); // linear static rebuild
    }
    return run;
}

std::size_t DynamicIndex::net_count(const Level& lv, Key k) const {
    std::size_t copies = 0;
    for (const auto& r : lv.runs) copies += r.keys->rank(k) - (k ? r.keys->rank(k - 1) : 0);
    auto [tb, te] = std::equal_range(lv.tombs.begin(), lv.tombs.end(), k);
    std::size_t tombs = static_cast<std::size_t>(te - tb);
    if (copies < tombs) throw std::logic_error("DynamicIndex: negative net count");
    return copies - tombs;
}

bool DynamicIndex::insert(Key k) {
    ++ops_;
    if (contains(k)) return false;
    if (levels_.empty()) levels_.emplace_back();
    levels_[0].runs.push_back(make_run({k}));
    ++live_;
    carry(0);
    return true;
}

void DynamicIndex::carry(std::size_t level) {
    while (level < levels_.size() && levels_[level].runs.size() >= beta_) {
        Level& lv = levels_[level];
        // k-way merge of all runs, cancelling this level's tombstones
        std::vector<Key> merged;
        merged.reserve(lv.elements());
        for (const auto& r : lv.runs)
            merged.insert(merged.end(), r.keys->keys().begin(), r.keys->keys().end());
        std::sort(merged.begin(), merged.end());
        std::vector<Key> out;
        out.reserve(merged.size());
        std::size_t ti = 0;
        for (std::size_t i = 0; i < merged.size(); ++i) {
            while (ti < lv.tombs.size() && lv.tombs[ti] < merged[i]) ++ti;
            if (ti < lv.tombs.size() && lv.tombs[ti] == merged[i]) {
                ++ti; // tombstone consumes one copy
                continue;
            }
            if (!out.empty() && out.back() == merged[i])
                throw std::logic_error("DynamicIndex: duplicate survived reconciliation");
            out.push_back(merged[i]);
        }
        rebuild_steps_ += merged.size();
        lv.runs.clear();
        lv.tombs.clear();
        if (level + 1 >= levels_.size()) levels_.emplace_back();
        if (!out.empty()) levels_[level + 1].runs.push_back(make_run(std::move(out)));
        ++level;
    }
}

bool DynamicIndex::erase(Key k) {
    ++ops_;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        Level& lv = levels_[i];
        if (net_count(lv, k) == 0) continue;
        lv.tombs.insert(std::upper_bound(lv.tombs.begin(), lv.tombs.end(), k), k);
        --live_;
        std::size_t elems = lv.elements();
        std::size_t livekeys = elems - lv.tombs.size();
        if (lv.tombs.size() > livekeys / 2) rebuild_level(i);
        return true;
    }
    return false;
}

void DynamicIndex::rebuild_level(std::size_t level) {
    Level& lv = levels_[level];
    std::vector<Key> merged;
    merged.reserve(lv.elements());
    for (const auto& r : lv.runs)
        merged.insert(merged.end(), r.keys->keys().begin(), r.keys->keys().end());
    std::sort(merged.begin(), merged.end());
    std::vector<Key> out;
    out.reserve(merged.size());
    std::size_t ti = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        while (ti < lv.tombs.size() && lv.tombs[ti] < merged[i]) ++ti;
        if (ti < lv.tombs.size() && lv.tombs[ti] == merged[i]) {
            ++ti;
            continue;
        }
        out.push_back(merged[i]);
    }
    rebuild_steps_ += merged.size();
    lv.runs.clear();
    lv.tombs.clear();
    if (!out.empty()) lv.runs.push_back(make_run(std::move(out)));
}

std::size_t DynamicIndex::rank(Key q) const {
    std::size_t r = 0;
    for (const auto& lv : levels_) {
        for (const auto& run : lv.runs) r += run.rank(q);
        r -= static_cast<std::size_t>(
            std::upper_bound(lv.tombs.begin(), lv.tombs.end(), q) - lv.tombs.begin());
    }
    return r;
}

bool DynamicIndex::contains(Key k) const {
    std::size_t r = rank(k);
    std::size_t before = k ? rank(k - 1) : 0;
    return r > before;
}

std::optional<Key> DynamicIndex::predecessor(Key q) const {
    std::optional<Key> best;
    for (const auto& lv : levels_) {
        for (const auto& run : lv.runs) {
            std::optional<Key> p = run.keys->predecessor(q);
            // skip candidates whose copies are all cancelled at this level
            while (p && net_count(lv, *p) == 0) {
                if (*p == 0) {
                    p.reset();
                    break;
                }
                p = run.keys->predecessor(*p - 1);
            }
            if (p && (!best || *p > *best)) best = p;
        }
    }
    return best;
}

} // namespace lix
