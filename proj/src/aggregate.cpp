#include "lix/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace lix {

Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    Correlation c;
    if (xs.size() != ys.size() || xs.size() < 2) return c;
    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return c; // zero variance: undefined
    c.defined = true;
    c.value = sxy / std::sqrt(sxx * syy);
    return c;
}

MeanCi mean_ci95(const std::vector<double>& xs) {
    MeanCi m;
    m.samples = xs.size();
    if (xs.empty()) return m;
    double n = static_cast<double>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= n;
    if (xs.size() < 2) return m;
    double var = 0.0;
    for (double x : xs) var += (x - m.mean) * (x - m.mean);
    var /= (n - 1.0);
    // two-sided 95% t quantiles for small df, 1.960 beyond
    static const double t95[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                 2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                 2.131,  2.120, 2.110, 2.101, 2.093, 2.086};
    std::size_t df = xs.size() - 1;
    double t = df <= 20 ? t95[df - 1] : 1.960;
    m.half_width = t * std::sqrt(var / n);
    return m;
}

namespace {

struct GroupKey {
    std::string dataset, workload, family, config;
    bool operator<(const GroupKey& o) const {
        return std::tie(dataset, workload, family, config) <
               std::tie(o.dataset, o.workload, o.family, o.config);
    }
};

struct Group {
    std::vector<double> mean_ns, p95_ns, build_ms, repair, route, window, ratio, support;
    const BenchRecord* sample = nullptr;
};

std::map<GroupKey, Group> group_rows(const std::vector<BenchRecord>& rows) {
    std::map<GroupKey, Group> groups;
    for (const auto& r : rows) {
        Group& g = groups[{r.dataset, r.workload, r.family, r.config}];
        g.mean_ns.push_back(r.mean_ns);
        g.p95_ns.push_back(r.p95_ns);
        g.build_ms.push_back(r.build_ms);
        g.repair.push_back(r.avg_repair);
        g.route.push_back(r.avg_route);
        g.window.push_back(r.avg_window);
        if (r.ratio_defined) g.ratio.push_back(r.entropy_ratio);
        g.support.push_back(r.support);
        g.sample = &r;
    }
    return groups;
}

std::string fmt_ci(const MeanCi& m, int prec = 1) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << m.mean;
    if (m.samples >= 2) os << "+-" << m.half_width;
    return os.str();
}

std::string fmt_mb(std::size_t bytes) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << static_cast<double>(bytes) / (1024.0 * 1024.0);
    return os.str();
}

void row(std::ostringstream& os, const std::vector<std::string>& cells,
         const std::vector<int>& widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        os << cells[i];
        int pad = widths[i] - static_cast<int>(cells[i].size());
        for (int p = 0; p < std::max(pad, 1); ++p) os << ' ';
    }
    os << '\n';
}

bool learned(const std::string& family) { return family != "binary"; }

} // namespace

AggregateOutput aggregate(const std::vector<BenchRecord>& rows) {
    AggregateOutput out;
    auto groups = group_rows(rows);

    std::set<std::string> datasets, workloads, families;
    for (const auto& r : rows) {
        datasets.insert(r.dataset);
        workloads.insert(r.workload);
        families.insert(r.family);
    }

    const std::vector<int> w8 = {26, 18, 10, 10, 18, 20, 20, 14};

    // main: fastest successful-lookup (uniform_hits) config per family
    {
        std::ostringstream os;
        os << "Successful-lookup summary (fastest config per family; mean+-95% CI over seeds)\n";
        row(os, {"Dataset", "Index", "Size MB", "Dir MB", "Build ms", "Mean ns", "p95 ns",
                 "Repair"},
            w8);
        for (const auto& ds : datasets) {
            for (const auto& fam : families) {
                const Group* best = nullptr;
                const GroupKey* bestk = nullptr;
                for (const auto& [k, g] : groups) {
                    if (k.dataset != ds || k.family != fam || k.workload != "uniform_hits")
                        continue;
                    if (!best || mean_ci95(g.mean_ns).mean < mean_ci95(best->mean_ns).mean) {
                        best = &g;
                        bestk = &k;
                    }
                }
                if (!best) continue;
                row(os,
                    {ds, bestk->config, fmt_mb(best->sample->index_bytes),
                     fmt_mb(best->sample->directory_bytes), fmt_ci(mean_ci95(best->build_ms)),
                     fmt_ci(mean_ci95(best->mean_ns)), fmt_ci(mean_ci95(best->p95_ns)),
                     fmt_ci(mean_ci95(best->repair), 2)},
                    w8);
            }
        }
        out.main_table = os.str();
    }

    // stress: per workload, fastest config per family
    {
        std::ostringstream os;
        os << "Stress-workload mean lookup latency in ns (fastest config per family)\n";
        std::vector<int> w = {26, 16};
        std::vector<std::string> head = {"Dataset", "Workload"};
        for (const auto& fam : families) {
            head.push_back(fam);
            w.push_back(20);
        }
        row(os, head, w);
        for (const auto& ds : datasets) {
            for (const auto& wl : workloads) {
                std::vector<std::string> cells = {ds, wl};
                for (const auto& fam : families) {
                    const Group* best = nullptr;
                    for (const auto& [k, g] : groups) {
                        if (k.dataset != ds || k.family != fam || k.workload != wl) continue;
                        if (!best || mean_ci95(g.mean_ns).mean < mean_ci95(best->mean_ns).mean)
                            best = &g;
                    }
                    cells.push_back(best ? fmt_ci(mean_ci95(best->mean_ns)) : "-");
                }
                row(os, cells, w);
            }
        }
        out.stress_table = os.str();
    }

    // diagnostics: shadow rank-spread trace statistics
    {
        std::ostringstream os;
        os << "Coarsened rank-spread diagnostics (shadow configurations)\n";
        std::vector<int> w = {26, 16, 18, 10, 12, 14};
        row(os, {"Dataset", "Workload", "Index", "Ratio", "Support", "Window"}, w);
        for (const auto& [k, g] : groups) {
            if (k.family != "shadow_o" && k.family != "shadow_r") continue;
            std::ostringstream ratio;
            if (g.ratio.empty())
                ratio << "undef";
            else {
                ratio.setf(std::ios::fixed);
                ratio.precision(2);
                ratio << mean_ci95(g.ratio).mean;
            }
            std::ostringstream supp, win;
            supp.setf(std::ios::fixed);
            supp.precision(1);
            supp << mean_ci95(g.support).mean;
            win.setf(std::ios::fixed);
            win.precision(1);
            win << mean_ci95(g.window).mean;
            row(os, {k.dataset, k.workload, k.config, ratio.str(), supp.str(), win.str()}, w);
        }
        out.diagnostics_table = os.str();
    }

    // overhead: ordered vs radix shadow routing on uniform hits
    {
        std::ostringstream os;
        os << "Shadow routing overhead on successful lookups\n";
        std::vector<int> w = {26, 10, 10, 18, 18, 12, 12};
        row(os, {"Dataset", "Ord MB", "Rad MB", "Ordered ns", "Radix ns", "Ord rt", "Rad rt"}, w);
        for (const auto& ds : datasets) {
            const Group* ord = nullptr;
            const Group* rad = nullptr;
            for (const auto& [k, g] : groups) {
                if (k.dataset != ds || k.workload != "uniform_hits") continue;
                if (k.family == "shadow_o" &&
                    (!ord || mean_ci95(g.mean_ns).mean < mean_ci95(ord->mean_ns).mean))
                    ord = &g;
                if (k.family == "shadow_r" &&
                    (!rad || mean_ci95(g.mean_ns).mean < mean_ci95(rad->mean_ns).mean))
                    rad = &g;
            }
            if (!ord && !rad) continue;
            auto route_str = [](const Group* g) {
                if (!g) return std::string("-");
                std::ostringstream s;
                s.setf(std::ios::fixed);
                s.precision(1);
                s << mean_ci95(g->route).mean;
                return s.str();
            };
            row(os,
                {ds, ord ? fmt_mb(ord->sample->index_bytes) : "-",
                 rad ? fmt_mb(rad->sample->index_bytes) : "-",
                 ord ? fmt_ci(mean_ci95(ord->mean_ns)) : "-",
                 rad ? fmt_ci(mean_ci95(rad->mean_ns)) : "-", route_str(ord), route_str(rad)},
                w);
        }
        out.overhead_table = os.str();
    }

    // correlations: avg repair comparisons vs mean latency across configs
    {
        std::ostringstream os;
        os << "Pearson correlation between average repair comparisons and mean latency\n";
        std::vector<int> w = {26, 16, 16};
        row(os, {"Dataset", "Hits learned", "All workloads"}, w);
        for (const auto& ds : datasets) {
            std::vector<double> hx, hy, ax, ay;
            for (const auto& [k, g] : groups) {
                if (k.dataset != ds) continue;
                double repair = mean_ci95(g.repair).mean;
                double lat = mean_ci95(g.mean_ns).mean;
                ax.push_back(repair);
                ay.push_back(lat);
                if (k.workload == "uniform_hits" && learned(k.family)) {
                    hx.push_back(repair);
                    hy.push_back(lat);
                }
            }
            auto fmt = [](const Correlation& c) {
                if (!c.defined) return std::string("undef");
                std::ostringstream s;
                s.setf(std::ios::fixed);
                s.precision(2);
                s << c.value;
                return s.str();
            };
            row(os, {ds, fmt(pearson(hx, hy)), fmt(pearson(ax, ay))}, w);
        }
        out.correlation_table = os.str();
    }
    return out;
}

} // namespace lix
