#include "lix/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "lix/workload.hpp"

namespace lix {

namespace {

double log2_1p(std::uint64_t delta) {
    return std::log2(1.0 + static_cast<double>(delta));
}

// Distinct atom counts of a profile with the best (smallest) radius each.
std::vector<std::pair<std::size_t, std::uint64_t>> atom_options(const ProfileCurve& pc) {
    std::vector<std::pair<std::size_t, std::uint64_t>> opts; // (atoms, delta)
    for (auto it = pc.points.rbegin(); it != pc.points.rend(); ++it) {
        // points ascend in delta and descend in atoms; reverse walk ascends in atoms
        if (!opts.empty() && it->second == opts.back().first) {
            opts.back().second = it->first; // smaller delta at same cost
        } else {
            opts.emplace_back(it->second, it->first);
        }
    }
    return opts;
}

} // namespace

EnvelopeResult shadow_envelope(const ProfileCurve& profile, double mass, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("shadow_envelope: negative lambda");
    EnvelopeResult best;
    bool first = true;
    for (const auto& [d, a] : profile.points) {
        double v = mass * log2_1p(d) + lambda * static_cast<double>(a);
        if (first || v <= best.psi_bits) { // ties toward larger delta
            best.psi_bits = v;
            best.delta = d;
            first = false;
        }
    }
    if (first) throw std::invalid_argument("shadow_envelope: empty profile");
    return best;
}

double potential(const std::vector<double>& masses, const std::vector<std::uint64_t>& radii,
                 const std::vector<ProfileCurve>& profiles, double lambda) {
    if (masses.size() != radii.size() || masses.size() != profiles.size())
        throw std::invalid_argument("potential: size mismatch");
    double phi = leaf_entropy(masses);
    for (std::size_t j = 0; j < masses.size(); ++j) {
        if (radii[j] > profiles[j].rank_diam)
            throw std::invalid_argument("potential: radius exceeds leaf diameter");
        phi += masses[j] * log2_1p(radii[j]);
        phi += lambda * static_cast<double>(profiles[j].comp_at(radii[j]));
    }
    return phi;
}

Allocation greedy_allocate(const std::vector<ProfileCurve>& profiles,
                           const std::vector<double>& masses, std::size_t budget) {
    if (profiles.size() != masses.size())
        throw std::invalid_argument("greedy_allocate: size mismatch");
    const std::size_t m = profiles.size();

    Allocation alloc;
    alloc.budget = budget;
    alloc.per_leaf.resize(m);

    // Start from full repair; a zero-cost refinement (same atoms, smaller
    // delta) is folded in by always taking the best delta for the current
    // atom count.
    std::vector<std::size_t> cur_atoms(m, 0);
    std::vector<std::uint64_t> cur_delta(m);
    std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> opts(m);
    for (std::size_t j = 0; j < m; ++j) {
        opts[j] = atom_options(profiles[j]);
        cur_delta[j] = profiles[j].delta_for_atoms(0);
    }

    struct Cand {
        double score;
        std::size_t leaf;
        std::size_t atoms;
        std::uint64_t delta;
    };
    auto worse = [](const Cand& a, const Cand& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.leaf > b.leaf; // lowest leaf index wins ties
    };
    std::priority_queue<Cand, std::vector<Cand>, decltype(worse)> heap(worse);

    std::size_t remaining = budget;
    auto push_best = [&](std::size_t j) {
        Cand best{0.0, j, 0, 0};
        bool found = false;
        for (const auto& [a, d] : opts[j]) {
            if (a <= cur_atoms[j] || d >= cur_delta[j]) continue;
            std::size_t cost = a - cur_atoms[j];
            if (cost > remaining) continue;
            double gain = masses[j] * (log2_1p(cur_delta[j]) - log2_1p(d));
            double score = gain / static_cast<double>(cost);
            if (score <= 0.0) continue;
            if (!found || score > best.score ||
                (score == best.score && (a < best.atoms || (a == best.atoms && d < best.delta)))) {
                best = {score, j, a, d};
                found = true;
            }
        }
        if (found) heap.push(best);
    };
    for (std::size_t j = 0; j < m; ++j) push_best(j);

    double last_score = 0.0;
    bool any_accepted = false;
    while (!heap.empty() && remaining > 0) {
        Cand c = heap.top();
        heap.pop();
        // stale entries: state moved since push
        if (c.atoms <= cur_atoms[c.leaf] || c.atoms - cur_atoms[c.leaf] > remaining) {
            push_best(c.leaf);
            continue;
        }
        double gain = masses[c.leaf] * (log2_1p(cur_delta[c.leaf]) - log2_1p(c.delta));
        double score = gain / static_cast<double>(c.atoms - cur_atoms[c.leaf]);
        if (score != c.score) { // recompute after a partial application
            push_best(c.leaf);
            continue;
        }
        remaining -= c.atoms - cur_atoms[c.leaf];
        cur_atoms[c.leaf] = c.atoms;
        cur_delta[c.leaf] = c.delta;
        last_score = score;
        any_accepted = true;
        push_best(c.leaf);
    }

    alloc.lambda = any_accepted ? last_score : 0.0;
    alloc.atoms_used = budget - remaining;
    alloc.routing_entropy_bits = leaf_entropy(masses);
    for (std::size_t j = 0; j < m; ++j) {
        alloc.per_leaf[j] = {cur_delta[j], cur_atoms[j]};
        alloc.repair_bits += masses[j] * log2_1p(cur_delta[j]);
    }
    alloc.dual_bound_bits = dual_certificate(profiles, masses, budget, alloc.lambda);
    return alloc;
}

double dual_certificate(const std::vector<ProfileCurve>& profiles,
                        const std::vector<double>& masses, std::size_t budget, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("dual_certificate: negative lambda");
    double bound = -lambda * static_cast<double>(budget);
    for (std::size_t j = 0; j < profiles.size(); ++j)
        bound += shadow_envelope(profiles[j], masses[j], lambda).psi_bits;
    return bound;
}

double deficiency(const std::vector<ProfileCurve>& profiles, const std::vector<double>& masses,
                  std::size_t budget) {
    if (profiles.size() != masses.size())
        throw std::invalid_argument("deficiency: size mismatch");
    std::size_t useful = 0;
    for (const auto& pc : profiles) {
        std::size_t most = 0;
        for (const auto& [d, a] : pc.points) most = std::max(most, a);
        useful += most;
    }
    const std::size_t cap = std::min(budget, useful);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(cap + 1, 0.0);
    for (std::size_t j = 0; j < profiles.size(); ++j) {
        std::vector<double> next(cap + 1, inf);
        auto opts = atom_options(profiles[j]);
        for (std::size_t b = 0; b <= cap; ++b) {
            if (dp[b] == inf) continue;
            for (const auto& [a, d] : opts) {
                if (b + a > cap) break; // options ascend in atoms
                double v = dp[b] + masses[j] * log2_1p(d);
                if (v < next[b + a]) next[b + a] = v;
            }
        }
        dp = std::move(next);
    }
    double best = inf;
    for (double v : dp) best = std::min(best, v);
    return best;
}

namespace {

double waterfill_scale(const PowerLawLeaf& leaf, double b_eff) {
    double ratio = leaf.hardness / (b_eff * leaf.mass);
    double y = std::pow(ratio, 1.0 / leaf.alpha);
    y = std::max(1.0, y);
    y = std::min(static_cast<double>(leaf.rank_diam) + 1.0, y);
    return y; // = 1 + delta before rounding
}

} // namespace

std::vector<std::uint64_t> powerlaw_radii(const std::vector<PowerLawLeaf>& leaves,
                                          std::size_t budget) {
    const double b_eff = static_cast<double>(budget) + static_cast<double>(leaves.size());
    std::vector<std::uint64_t> radii;
    radii.reserve(leaves.size());
    for (const auto& leaf : leaves) {
        double y = waterfill_scale(leaf, b_eff);
        auto one_plus = static_cast<std::uint64_t>(std::llround(y));
        if (one_plus < 1) one_plus = 1;
        std::uint64_t d = one_plus - 1;
        if (d > leaf.rank_diam) d = leaf.rank_diam;
        radii.push_back(d);
    }
    return radii;
}

PowerLawCost powerlaw_cost(const std::vector<PowerLawLeaf>& leaves, std::size_t budget) {
    const double b_eff = static_cast<double>(budget) + static_cast<double>(leaves.size());
    PowerLawCost cost;
    std::vector<double> masses;
    masses.reserve(leaves.size());
    for (const auto& leaf : leaves) masses.push_back(leaf.mass);
    cost.entropy_bits = leaf_entropy(masses);
    for (const auto& leaf : leaves) {
        double ratio = std::pow(leaf.hardness / (b_eff * leaf.mass), 1.0 / leaf.alpha);
        double d = std::min(static_cast<double>(leaf.rank_diam), std::max(1.0, ratio));
        cost.repair_bits += leaf.mass * std::log2(1.0 + d);
    }
    return cost;
}

double HardMassProfile::mass_at(double t) const {
    // steps hold (threshold ascending, W at >= threshold); W(t) = mass of
    // leaves with ratio >= t
    double w = 0.0;
    for (const auto& [thr, m] : steps)
        if (thr >= t) w = std::max(w, m);
    return w;
}

HardMassResult hard_mass(const std::vector<PowerLawLeaf>& leaves, std::size_t budget) {
    const double b_eff = static_cast<double>(budget) + static_cast<double>(leaves.size());
    HardMassResult r;

    std::vector<std::pair<double, double>> items; // (u_j = log2(ratio), p_j)
    for (const auto& leaf : leaves) {
        double ratio = leaf.hardness / (b_eff * leaf.mass);
        double u = std::log2(ratio);
        items.emplace_back(u, leaf.mass);
        if (u > 0.0) r.direct_sum_bits += leaf.mass * u;
        r.profile.steps.emplace_back(leaf.hardness / leaf.mass, 0.0);
    }
    std::sort(r.profile.steps.begin(), r.profile.steps.end());
    {
        // fill W at each threshold (mass with ratio >= threshold)
        for (auto& [thr, w] : r.profile.steps) {
            double sum = 0.0;
            for (const auto& leaf : leaves)
                if (leaf.hardness / leaf.mass >= thr) sum += leaf.mass;
            w = sum;
        }
    }

    // integral over u >= 0 of W(B_eff 2^u) du via exact step areas: between
    // consecutive positive breakpoints the integrand is the mass above the
    // upper breakpoint
    std::sort(items.begin(), items.end());
    std::vector<double> breaks;
    breaks.push_back(0.0);
    for (const auto& [u, p] : items)
        if (u > 0.0) breaks.push_back(u);
    double integral = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        double width = breaks[i] - breaks[i - 1];
        if (width <= 0.0) continue;
        double mass_above = 0.0;
        for (const auto& [u, p] : items)
            if (u >= breaks[i]) mass_above += p;
        integral += width * mass_above;
    }
    r.layer_cake_bits = integral;
    return r;
}

ProfileCurve powerlaw_profile(const PowerLawLeaf& leaf, std::size_t interval_id) {
    ProfileCurve pc;
    pc.interval_id = interval_id;
    pc.certified = true;
    pc.rank_diam = leaf.rank_diam;
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::uint64_t d : pow2_radius_grid(leaf.rank_diam)) {
        std::size_t atoms = 0;
        if (d < leaf.rank_diam) {
            double c = leaf.hardness * std::pow(1.0 + static_cast<double>(d), -leaf.alpha);
            atoms = static_cast<std::size_t>(std::max<long long>(1, std::llround(c)));
        }
        atoms = std::min(atoms, prev);
        prev = atoms;
        pc.points.emplace_back(d, atoms);
    }
    return pc;
}

} // namespace lix
