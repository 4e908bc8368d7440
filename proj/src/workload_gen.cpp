#include "lix/workload_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lix/errors.hpp"

namespace lix {

WorkloadKind parse_workload_kind(const std::string& name) {
    if (name == "uniform_hits" || name == "hits") return WorkloadKind::UniformHits;
    if (name == "misses") return WorkloadKind::Misses;
    if (name == "mixed") return WorkloadKind::Mixed;
    if (name == "zipf_hits" || name == "zipf") return WorkloadKind::ZipfHits;
    if (name == "hotspot_hits" || name == "hotspot") return WorkloadKind::HotspotHits;
    if (name == "gaps") return WorkloadKind::Gaps;
    throw config_error("unknown workload kind: " + name);
}

std::string workload_kind_name(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::UniformHits: return "uniform_hits";
        case WorkloadKind::Misses: return "misses";
        case WorkloadKind::Mixed: return "mixed";
        case WorkloadKind::ZipfHits: return "zipf_hits";
        case WorkloadKind::HotspotHits: return "hotspot_hits";
        case WorkloadKind::Gaps: return "gaps";
    }
    return "?";
}

const std::vector<std::string>& all_workload_names() {
    static const std::vector<std::string> names = {"uniform_hits", "misses",       "mixed",
                                                   "zipf_hits",    "hotspot_hits", "gaps"};
    return names;
}

namespace {

std::uint64_t kind_tag(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::UniformHits: return 0x75686974ull; // "uhit"
        case WorkloadKind::Misses: return 0x6d697373ull;      // "miss"
        case WorkloadKind::Mixed: return 0x6d697865ull;       // "mixe"
        case WorkloadKind::ZipfHits: return 0x7a697066ull;    // "zipf"
        case WorkloadKind::HotspotHits: return 0x686f7473ull; // "hots"
        case WorkloadKind::Gaps: return 0x67617073ull;        // "gaps"
    }
    return 0;
}

// One midpoint probe from a gap of width >= 2 chosen uniformly among gaps,
// by rejection over the gap index; falls back to a forward scan when the key
// set is locally dense.
Key miss_probe(SplitMix64& rng, const KeySet& ks) {
    const std::size_t n = ks.size();
    if (n >= 2) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::size_t i = static_cast<std::size_t>(rng.next_below(n - 1));
            if (ks[i + 1] - ks[i] >= 2) return ks[i] + (ks[i + 1] - ks[i]) / 2;
        }
        std::size_t start = static_cast<std::size_t>(rng.next_below(n - 1));
        for (std::size_t step = 0; step + 1 < n; ++step) {
            std::size_t i = (start + step) % (n - 1);
            if (ks[i + 1] - ks[i] >= 2) return ks[i] + (ks[i + 1] - ks[i]) / 2;
        }
    }
    if (ks[0] > 0) return ks[0] / 2;
    if (ks[n - 1] < ~Key(0)) return ks[n - 1] + 1;
    throw config_error("misses workload: the key set has no gaps");
}

// Truncated Zipf over {1..n} by rejection inversion (Hoermann-Derflinger),
// exact for any exponent s > 0.
class ZipfSampler {
  public:
    ZipfSampler(std::size_t n, double s) : n_(static_cast<double>(n)), s_(s) {
        h_x1_ = h_integral(1.5) - 1.0;
        h_n_ = h_integral(n_ + 0.5);
        threshold_ = 2.0 - h_integral_inv(h_integral(2.5) - h(2.0));
    }

    std::size_t sample(SplitMix64& rng) const {
        while (true) {
            double u = h_n_ + rng.next_unit() * (h_x1_ - h_n_);
            double x = h_integral_inv(u);
            double k = std::floor(x + 0.5);
            if (k < 1.0) k = 1.0;
            if (k > n_) k = n_;
            if (k - x <= threshold_ || u >= h_integral(k + 0.5) - h(k))
                return static_cast<std::size_t>(k);
        }
    }

  private:
    double h(double x) const { return std::exp(-s_ * std::log(x)); }
    double h_integral(double x) const {
        double logx = std::log(x);
        return helper2((1.0 - s_) * logx) * logx;
    }
    double h_integral_inv(double x) const {
        double t = x * (1.0 - s_);
        if (t < -1.0) t = -1.0;
        return std::exp(helper1(t) * x);
    }
    // (exp(x)-1)/x and log1p(x)/x with stable small-x behavior
    static double helper1(double x) {
        return std::abs(x) > 1e-8 ? std::log1p(x) / x : 1.0 - x / 2.0 + x * x / 3.0;
    }
    static double helper2(double x) {
        return std::abs(x) > 1e-8 ? std::expm1(x) / x : 1.0 + x / 2.0 + x * x / 6.0;
    }

    double n_, s_, h_x1_, h_n_, threshold_;
};

} // namespace

std::vector<Key> gen_workload(const WorkloadSpec& spec, const KeySet& ks) {
    if (ks.empty()) throw std::invalid_argument("gen_workload: empty key set");
    const std::size_t n = ks.size();
    SplitMix64 rng(spec.seed * 0x9e3779b97f4a7c15ull ^ kind_tag(spec.kind));
    std::vector<Key> out;
    out.reserve(spec.queries);

    switch (spec.kind) {
        case WorkloadKind::UniformHits: {
            for (std::size_t i = 0; i < spec.queries; ++i)
                out.push_back(ks[rng.next_below(n)]);
            break;
        }
        case WorkloadKind::Misses: {
            for (std::size_t i = 0; i < spec.queries; ++i) out.push_back(miss_probe(rng, ks));
            break;
        }
        case WorkloadKind::Mixed: {
            for (std::size_t i = 0; i < spec.queries; ++i) {
                if (i % 2 == 0)
                    out.push_back(ks[rng.next_below(n)]);
                else
                    out.push_back(miss_probe(rng, ks));
            }
            break;
        }
        case WorkloadKind::ZipfHits: {
            ZipfSampler zipf(n, spec.zipf_s);
            for (std::size_t i = 0; i < spec.queries; ++i)
                out.push_back(ks[zipf.sample(rng) - 1]);
            break;
        }
        case WorkloadKind::HotspotHits: {
            std::size_t width = std::max<std::size_t>(
                1, static_cast<std::size_t>(spec.hotspot_width * static_cast<double>(n)));
            std::size_t anchor = static_cast<std::size_t>(0.45 * static_cast<double>(n));
            if (anchor + width > n) anchor = n - width;
            for (std::size_t i = 0; i < spec.queries; ++i) {
                if (rng.next_unit() < spec.hotspot_mass)
                    out.push_back(ks[anchor + rng.next_below(width)]);
                else
                    out.push_back(ks[rng.next_below(n)]);
            }
            break;
        }
        case WorkloadKind::Gaps: {
            if (n < 2) throw config_error("gaps workload: need at least two keys");
            // top 1% of gaps by successor distance (at least one), cycled
            std::size_t want = std::max<std::size_t>(1, (n - 1) / 100);
            std::vector<std::pair<Key, std::size_t>> widths; // (width, gap index)
            widths.reserve(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                Key w = ks[i + 1] - ks[i];
                if (w >= 2) widths.emplace_back(w, i);
            }
            if (widths.empty()) throw config_error("gaps workload: no gap is wide enough");
            if (widths.size() > want) {
                std::nth_element(widths.begin(), widths.begin() + static_cast<std::ptrdiff_t>(want),
                                 widths.end(), std::greater<>());
                widths.resize(want);
            }
            std::sort(widths.begin(), widths.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (std::size_t i = 0; i < spec.queries; ++i) {
                const auto& [w, gi] = widths[i % widths.size()];
                out.push_back(ks[gi] + 1 + rng.next_below(w - 1));
            }
            break;
        }
    }
    return out;
}

Workload empirical_workload(const std::vector<Key>& queries) {
    std::map<Key, double> counts;
    for (Key q : queries) counts[q] += 1.0;
    std::vector<std::pair<Key, double>> pts(counts.begin(), counts.end());
    return Workload::from_points(std::move(pts));
}

KeySet synthetic_dataset(const std::string& kind, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw config_error("synthetic dataset: n must be positive");
    SplitMix64 rng(seed ^ 0x5e71ab1e5e71ab1eull);
    std::vector<Key> keys;
    if (kind == "uniform") {
        keys.reserve(n + n / 8);
        while (true) {
            while (keys.size() < n + n / 8 + 8) keys.push_back(rng.next() >> 1);
            std::sort(keys.begin(), keys.end());
            keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
            if (keys.size() >= n) {
                keys.resize(n);
                return KeySet::from_sorted(std::move(keys));
            }
        }
    }
    if (kind == "seglin") {
        // piecewise-linear rank curve: constant gap within each of 64 pieces
        const std::size_t pieces = std::min<std::size_t>(64, n);
        Key x = 1000;
        for (std::size_t p = 0; p < pieces; ++p) {
            Key gap = 1 + rng.next_below(1 << 14);
            std::size_t len = n / pieces + (p < n % pieces ? 1 : 0);
            for (std::size_t i = 0; i < len; ++i) {
                keys.push_back(x);
                x += gap;
            }
        }
        return KeySet::from_sorted(std::move(keys));
    }
    if (kind == "lognormal") {
        // lognormally spaced gaps, Box-Muller normals
        Key x = 1000;
        while (keys.size() < n) {
            double u1 = rng.next_unit();
            double u2 = rng.next_unit();
            if (u1 <= 0.0) continue;
            double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
            double gap = std::exp(2.0 + 1.2 * z);
            Key g = static_cast<Key>(std::max(1.0, std::min(gap, 1e15)));
            keys.push_back(x);
            x += g;
        }
        return KeySet::from_sorted(std::move(keys));
    }
    throw config_error("synthetic dataset: unknown kind " + kind);
}

} // namespace lix
