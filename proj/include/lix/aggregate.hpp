#pragma once

#include <string>
#include <vector>

#include "lix/bench.hpp"

namespace lix {

// Plain-text table renderings of the benchmark CSV, one string per table:
// the per-dataset successful-lookup summary, the stress-workload latency
// grid, the rank-spread diagnostics, the shadow routing overhead, and the
// repair-vs-latency Pearson correlations.
struct AggregateOutput {
    std::string main_table;
    std::string stress_table;
    std::string diagnostics_table;
    std::string overhead_table;
    std::string correlation_table;
};

AggregateOutput aggregate(const std::vector<BenchRecord>& rows);

// Pearson correlation; defined = false when either side has zero variance.
struct Correlation {
    bool defined = false;
    double value = 0.0;
};
Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// mean +- half-width of a 95% Student-t confidence interval
struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t samples = 0;
};
MeanCi mean_ci95(const std::vector<double>& xs);

} // namespace lix
