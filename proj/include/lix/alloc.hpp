#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "lix/profile.hpp"

namespace lix {

// One leaf of a normalized discrete power-law instance.
struct PowerLawLeaf {
    double mass = 0.0;            // p in (0, 1]
    double hardness = 1.0;        // kappa > 0
    std::uint64_t rank_diam = 1;  // R >= 1
    double alpha = 1.0;           // profile exponent > 0
};

struct EnvelopeResult {
    double psi_bits = 0.0;   // min over the grid of p log2(1+d) + lambda Comp(d)
    std::uint64_t delta = 0; // argmin radius, ties broken toward larger delta
};

EnvelopeResult shadow_envelope(const ProfileCurve& profile, double mass, double lambda);

// Phi_lambda = H(masses) + sum p_j log2(1+delta_j) + lambda * sum Comp_j(delta_j).
double potential(const std::vector<double>& masses, const std::vector<std::uint64_t>& radii,
                 const std::vector<ProfileCurve>& profiles, double lambda);

struct LeafChoice {
    std::uint64_t delta = 0;
    std::size_t atoms = 0;
};

struct Allocation {
    std::vector<LeafChoice> per_leaf;
    std::size_t atoms_used = 0;
    std::size_t budget = 0;
    double routing_entropy_bits = 0.0;
    double repair_bits = 0.0;
    double lambda = 0.0;          // certifying shadow price: last accepted score
    double dual_bound_bits = 0.0; // sum Psi_j(lambda) - lambda * budget
};

// Greedy refinement from full-repair radii, taking the feasible refinement of
// highest score p * (log2(1+d_old) - log2(1+d_new)) / (atoms_new - atoms_old)
// until the budget is exhausted or no positive-score refinement remains.
// Deterministic: among equal scores the lowest leaf index wins.
Allocation greedy_allocate(const std::vector<ProfileCurve>& profiles,
                           const std::vector<double>& masses, std::size_t budget);

// Weak-duality lower bound sum_j Psi_j(lambda) - lambda * budget; valid for
// every lambda >= 0 against every feasible radius vector.
double dual_certificate(const std::vector<ProfileCurve>& profiles,
                        const std::vector<double>& masses, std::size_t budget, double lambda);

// Exact minimum of sum p_j log2(1+delta_j) over grid radii with total atom
// cost <= budget, by a knapsack dynamic program.
double deficiency(const std::vector<ProfileCurve>& profiles, const std::vector<double>& masses,
                  std::size_t budget);

// Water-filling radii: 1+delta_j = round(min{1+R_j, max{1, (k_j/(B_eff p_j))^(1/a)}}),
// B_eff = budget + m.
std::vector<std::uint64_t> powerlaw_radii(const std::vector<PowerLawLeaf>& leaves,
                                          std::size_t budget);

struct PowerLawCost {
    double entropy_bits = 0.0;
    double repair_bits = 0.0;
};

// Closed-form fixed-partition cost of the discrete power-law instance.
PowerLawCost powerlaw_cost(const std::vector<PowerLawLeaf>& leaves, std::size_t budget);

// Nonincreasing step function t -> W(t) = mass of leaves with hardness/mass >= t.
struct HardMassProfile {
    std::vector<std::pair<double, double>> steps; // (threshold ascending, mass at >= threshold)
    double mass_at(double t) const;
};

struct HardMassResult {
    HardMassProfile profile;
    double direct_sum_bits = 0.0; // sum p_j log2+(k_j / (B_eff p_j))
    double layer_cake_bits = 0.0; // integral of W(B_eff 2^u) du as exact step areas
};

HardMassResult hard_mass(const std::vector<PowerLawLeaf>& leaves, std::size_t budget);

// Synthetic profile curve realizing the power-law envelope on the pow2 grid:
// Comp(d) = max(1, round(k (1+d)^-a)) below R, and 0 at R.
ProfileCurve powerlaw_profile(const PowerLawLeaf& leaf, std::size_t interval_id = 0);

} // namespace lix
