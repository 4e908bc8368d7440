#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lix/keyset.hpp"
#include "lix/workload.hpp"

namespace lix {

// Finite transcript model: one affine chord predictor (or none) per leaf,
// predicted ranks rounded to a rank quantum before entering the transcript.
struct TranscriptConfig {
    std::size_t quantum = 16; // Q >= 1
};

// Affine chord through the leaf's first and last (key, rank) control points.
struct ChordPredictor {
    Key k0 = 0;
    Key k1 = 0;
    double rank0 = 0.0;
    double slope = 0.0;
    // Clamped rounded rank prediction.
    std::size_t predict(Key q, std::size_t n) const;
};

ChordPredictor chord_for(const KeySet& ks, const LeafInterval& iv);

// Pre-repair transcript: leaf identity, predictor presence, quantized
// prediction bucket, and the certified rank window derived from the bucket.
struct Transcript {
    std::size_t leaf = 0;
    bool has_predictor = false;
    std::uint64_t bucket = 0;
    std::size_t window_lo = 0;
    std::size_t window_hi = 0; // inclusive
};

// q must lie in the leaf; delta is the chord's certified radius over the
// instance keys of the leaf (ignored for the empty predictor).
Transcript transcript_of(const KeySet& ks, const LeafInterval& leaf, bool use_chord,
                         std::uint64_t delta, const TranscriptConfig& cfg, Key q);

// Certified chord radius over the instance keys of the leaf.
std::uint64_t chord_delta(const KeySet& ks, const LeafInterval& iv);

// Conditional repair entropy H(A | Y) of the exact answer given the
// transcript, over the leaf-conditional workload.
double rep_entropy(const KeySet& ks, const LeafInterval& leaf, bool use_chord,
                   const TranscriptConfig& cfg, const Workload& w);

// ---------------------------------------------------------------------------
// Exact finite-instance evaluation
// ---------------------------------------------------------------------------

// Per-interval leaf costs for the partition dynamic program. Chord costs are
// precomputed for every contiguous interval [i, j); empty-predictor costs
// follow from prefix identities. The serial kernel is the reference; the
// OpenMP kernel computes identical values.
struct IntervalCosts {
    std::size_t n = 0;
    std::vector<double> chord_rgap; // [i * (n + 1) + j]
    std::vector<double> chord_gap;
    std::vector<double> w_prefix;  // prefix masses
    std::vector<double> wl_prefix; // prefix sum of w * log2(1/w)

    double empty_rgap(std::size_t i, std::size_t j) const {
        return wl_prefix[j] - wl_prefix[i];
    }
    double empty_gap(std::size_t i, std::size_t j) const;
    double chord_rgap_at(std::size_t i, std::size_t j) const {
        return chord_rgap[i * (n + 1) + j];
    }
    double chord_gap_at(std::size_t i, std::size_t j) const {
        return chord_gap[i * (n + 1) + j];
    }
};

IntervalCosts interval_costs_serial(const KeySet& ks, const std::vector<double>& weights,
                                    const TranscriptConfig& cfg);
IntervalCosts interval_costs_parallel(const KeySet& ks, const std::vector<double>& weights,
                                      const TranscriptConfig& cfg);

struct Selection {
    std::vector<std::size_t> cuts;  // interior cut indices of the partition
    std::vector<bool> use_chord;    // per leaf
    std::size_t atoms = 0;
    double bits = 0.0;
};

struct BudgetResult {
    std::size_t budget = 0;
    double rgap_bits = 0.0;
    double gap_bits = 0.0;
    Selection rgap_selection;
    Selection gap_selection;
    std::size_t program_nodes = 0; // sum over transcripts of attainable answers
};

struct EvalResult {
    double answer_entropy_bits = 0.0; // empirical entropy of the answer distribution
    std::vector<BudgetResult> per_budget;
};

struct EvalConfig {
    TranscriptConfig transcript;
    std::vector<std::size_t> budgets = {0, 4, 8, 16, 32, 64, 128};
    bool parallel = true;
    std::size_t max_keys = 2048; // complexity guard
};

// Exact minimization of both objectives over ordered partitions where each
// leaf uses either no predictor (0 atoms, trivial radius) or one affine chord
// (1 atom, radius certified against every instance key in the leaf).
// The workload must be supported on instance keys.
EvalResult exact_eval(const KeySet& ks, const Workload& w, const EvalConfig& cfg);

// Transcript-indexed repair-program accounting for a selection: K_y counts
// the instance answers attainable under each transcript value, including
// zero-mass ones.
struct RepairProgram {
    struct Entry {
        std::size_t leaf = 0;
        std::uint64_t bucket = 0;
        std::size_t nodes = 0;                // K_y
        std::vector<std::size_t> answer_ranks; // attainable answers
    };
    std::vector<Entry> entries;
    std::size_t total_nodes = 0;
};

RepairProgram repair_program(const KeySet& ks, const Selection& sel, const TranscriptConfig& cfg);

// ---------------------------------------------------------------------------
// Rank-spread diagnostics
// ---------------------------------------------------------------------------

struct TraceEntry {
    std::size_t leaf = 0;
    std::uint64_t window = 0; // repair window span u - lo
    std::uint64_t delta = 0;  // certified radius of the lookup
    std::size_t offset = 0;   // answer rank relative to a per-bucket base
};

// Documented coarsening: (leaf id, power-of-two window-size bucket).
struct SpreadDiagnostic {
    bool defined = false;   // false when every window is a singleton
    double entropy_ratio = 0.0;
    double support = 0.0;   // mass-weighted average residual support count
    std::size_t buckets = 0;
    std::string coarsening = "(leaf,pow2(window))";
    double support_threshold_scale = 0.25; // 1 / (4 (1 + median delta))
};

SpreadDiagnostic spread_diagnostic(const std::vector<TraceEntry>& trace);

// Surrogate sanity bounds for one leaf: 0 <= rep <= log2(candidate count);
// a leaf with rep far below log2(1+delta) is a rank-spread failure.
struct SpreadBoundCheck {
    bool within_bounds = false;
    bool spread_failure = false;
    double ratio = 0.0; // rep / log2(1+delta); 1 when delta = 0
};

SpreadBoundCheck spread_surrogate_bounds(double rep_bits, std::uint64_t delta);

} // namespace lix
