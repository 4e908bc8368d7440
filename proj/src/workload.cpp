#include "lix/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lix {

namespace {

// Neumaier-compensated sum; the entropy identities downstream are asserted at
// 1e-9 so plain accumulation is not good enough at large support sizes.
double kahan_sum(const std::vector<double>& xs) {
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

} // namespace

Workload Workload::from_points(std::vector<std::pair<Key, double>> points) {
    if (points.empty()) throw std::invalid_argument("Workload: empty support");
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Key, double>> merged;
    merged.reserve(points.size());
    for (const auto& [k, w] : points) {
        if (w < 0.0) throw std::invalid_argument("Workload: negative weight");
        if (!merged.empty() && merged.back().first == k)
            merged.back().second += w;
        else
            merged.emplace_back(k, w);
    }
    std::vector<double> ws;
    ws.reserve(merged.size());
    for (const auto& p : merged) ws.push_back(p.second);
    double total = kahan_sum(ws);
    if (!(total > 0.0)) throw std::invalid_argument("Workload: total weight must be positive");
    for (auto& p : merged) p.second /= total;

    Workload w;
    w.pts_ = std::move(merged);
    return w;
}

Workload Workload::uniform_over(const KeySet& ks) {
    if (ks.empty()) throw std::invalid_argument("Workload: empty key set");
    std::vector<std::pair<Key, double>> pts;
    pts.reserve(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) pts.emplace_back(ks[i], 1.0);
    return from_points(std::move(pts));
}

double Workload::mass(const LeafInterval& iv) const {
    std::vector<double> in;
    for (const auto& [k, w] : pts_)
        if (iv.contains(k)) in.push_back(w);
    return kahan_sum(in);
}

Workload Workload::restrict_to(const LeafInterval& iv) const {
    std::vector<std::pair<Key, double>> pts;
    for (const auto& [k, w] : pts_)
        if (iv.contains(k) && w > 0.0) pts.emplace_back(k, w);
    if (pts.empty()) throw std::domain_error("Workload: conditional on a zero-mass interval");
    return from_points(std::move(pts));
}

std::vector<double> Workload::leaf_masses(const Partition& pi) const {
    std::vector<double> masses(pi.leaf_count(), 0.0);
    std::vector<std::vector<double>> per_leaf(pi.leaf_count());
    for (const auto& [k, w] : pts_) per_leaf[pi.locate(k)].push_back(w);
    for (std::size_t j = 0; j < masses.size(); ++j) masses[j] = kahan_sum(per_leaf[j]);
    return masses;
}

double leaf_entropy(const std::vector<double>& masses) {
    double total = 0.0;
    for (double p : masses) {
        if (p < 0.0) throw std::invalid_argument("leaf_entropy: negative mass");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("leaf_entropy: masses not normalized");
    double h = 0.0, c = 0.0;
    for (double p : masses) {
        if (p <= 0.0) continue;
        double term = -p * std::log2(p);
        double t = h + term;
        c += (std::abs(h) >= std::abs(term)) ? (h - t) + term : (term - t) + h;
        h = t;
    }
    return h + c;
}

double entropy_of_weights(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return 0.0;
    double h = 0.0, c = 0.0;
    for (double w : weights) {
        if (w <= 0.0) continue;
        double p = w / total;
        double term = -p * std::log2(p);
        double t = h + term;
        c += (std::abs(h) >= std::abs(term)) ? (h - t) + term : (term - t) + h;
        h = t;
    }
    return h + c;
}

} // namespace lix
