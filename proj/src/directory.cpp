#include "lix/directory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lix/errors.hpp"

namespace lix {

namespace {

using u128 = unsigned __int128;

struct TrieNode {
    int child[2] = {-1, -1};
    int leaf = -1;
};

} // namespace

DirectoryTree DirectoryTree::build(const std::vector<double>& masses,
                                   const std::vector<Key>& splits) {
    const std::size_t m = masses.size();
    if (m == 0) throw std::invalid_argument("DirectoryTree: no leaves");
    if (splits.size() + 1 != m)
        throw std::invalid_argument("DirectoryTree: need m-1 split keys");

    DirectoryTree tree;
    tree.depths_.assign(m, 0);
    if (m == 1) return tree;

    // Exact integer mass grid; zero-mass leaves get a 2^-40 floor so they
    // remain routable.
    const double scale = static_cast<double>(1ull << 50);
    const double floor_mass = std::ldexp(1.0, -40);
    std::vector<std::uint64_t> w(m);
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < m; ++j) {
        double p = std::max(masses[j], floor_mass);
        w[j] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(p * scale)));
        total += w[j];
    }

    // Gilbert-Moore: codeword_j = first l_j bits of the cumulative midpoint
    // (2*prefix + w_j) / (2*total), l_j = ceil(log2(total/w_j)) + 1.
    std::vector<TrieNode> trie(1);
    std::uint64_t prefix = 0;
    for (std::size_t j = 0; j < m; ++j) {
        unsigned l = 1;
        while ((u128(w[j]) << l) < u128(total) * 2) ++l; // smallest l with 2^l >= 2T/w
        u128 num = u128(2) * prefix + w[j];
        u128 den = u128(2) * total;
        u128 code = (num << l) / den;

        int node = 0;
        for (unsigned k = 0; k < l; ++k) {
            if (trie[node].leaf >= 0)
                throw std::logic_error("DirectoryTree: Gilbert-Moore prefix collision");
            int bit = static_cast<int>((code >> (l - 1 - k)) & 1);
            if (trie[node].child[bit] < 0) {
                trie[node].child[bit] = static_cast<int>(trie.size());
                trie.emplace_back();
            }
            node = trie[node].child[bit];
        }
        if (trie[node].leaf >= 0 || trie[node].child[0] >= 0 || trie[node].child[1] >= 0)
            throw std::logic_error("DirectoryTree: Gilbert-Moore prefix collision");
        trie[node].leaf = static_cast<int>(j);
        prefix += w[j];
    }

    // Compress unary chains and emit Node records. Returns an encoded child:
    // >= 0 internal node index, < 0 leaf as -(leaf+1).
    std::vector<Node>& nodes = tree.nodes_;
    auto rightmost_leaf = [&](int encoded, auto&& self) -> std::size_t {
        if (encoded < 0) return static_cast<std::size_t>(-encoded - 1);
        return self(nodes[static_cast<std::size_t>(encoded)].right, self);
    };
    auto compress = [&](int t, auto&& self) -> int {
        const TrieNode& tn = trie[static_cast<std::size_t>(t)];
        if (tn.leaf >= 0) return -(tn.leaf + 1);
        if (tn.child[0] < 0) return self(tn.child[1], self);
        if (tn.child[1] < 0) return self(tn.child[0], self);
        int left = self(tn.child[0], self);
        int right = self(tn.child[1], self);
        Node n;
        n.left = left;
        n.right = right;
        n.split = splits[rightmost_leaf(left, rightmost_leaf)];
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    };
    tree.root_enc_ = compress(0, compress);

    // leaf depths by traversal
    auto walk = [&](int encoded, std::size_t depth, auto&& self) -> void {
        if (encoded < 0) {
            tree.depths_[static_cast<std::size_t>(-encoded - 1)] = depth;
            return;
        }
        const Node& n = nodes[static_cast<std::size_t>(encoded)];
        self(n.left, depth + 1, self);
        self(n.right, depth + 1, self);
    };
    walk(tree.root_enc_, 0, walk);
    return tree;
}

double DirectoryTree::expected_depth(const std::vector<double>& masses) const {
    if (masses.size() != depths_.size())
        throw std::invalid_argument("DirectoryTree: mass vector size mismatch");
    double e = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j)
        e += masses[j] * static_cast<double>(depths_[j]);
    return e;
}

double DirectoryTree::kraft_sum() const {
    long double s = 0.0L;
    for (std::size_t d : depths_) s += std::ldexp(1.0L, -static_cast<int>(d));
    return static_cast<double>(s);
}

std::pair<std::size_t, std::size_t> DirectoryTree::route(Key q) const {
    if (nodes_.empty()) return {0, 0};
    int enc = root_enc_;
    std::size_t comparisons = 0;
    while (enc >= 0) {
        const Node& n = nodes_[static_cast<std::size_t>(enc)];
        ++comparisons;
        enc = (q <= n.split) ? n.left : n.right;
    }
    return {static_cast<std::size_t>(-enc - 1), comparisons};
}

std::size_t DirectoryTree::size_bytes() const {
    return nodes_.size() * (sizeof(Key) + 2 * sizeof(int));
}

RadixRouter RadixRouter::build(const std::vector<Key>& splits, Key key_lo, Key key_hi,
                               unsigned bits) {
    if (bits < 1 || bits > 30) throw config_error("RadixRouter: bits must be in [1, 30]");
    if (key_hi < key_lo) throw std::invalid_argument("RadixRouter: bad key range");

    RadixRouter r;
    r.splits_ = splits;
    r.base_ = key_lo;
    Key range = key_hi - key_lo;
    unsigned width = range == 0 ? 0 : static_cast<unsigned>(std::bit_width(range));
    r.shift_ = width > bits ? width - bits : 0;
    std::uint64_t entries = (range >> r.shift_) + 2;
    if (entries > (1ull << 30)) throw config_error("RadixRouter: table exceeds memory cap");

    const std::size_t m = splits.size() + 1;
    r.table_.assign(entries, 0);
    std::size_t j = 0;
    for (std::uint64_t p = 0; p < entries; ++p) {
        Key first_key_with_prefix;
        if (p >= (range >> r.shift_) + 1)
            first_key_with_prefix = key_hi; // sentinel entry
        else
            first_key_with_prefix = key_lo + (static_cast<Key>(p) << r.shift_);
        while (j + 1 < m && splits[j] < first_key_with_prefix) ++j;
        r.table_[p] = static_cast<std::uint32_t>(j);
    }
    return r;
}

RadixRouter::Route RadixRouter::route(Key q) const {
    Route out;
    std::uint64_t p = 0;
    if (q > base_) {
        p = (q - base_) >> shift_;
        if (p >= table_.size()) p = table_.size() - 1;
    }
    std::size_t j = table_[p];
    const std::size_t m = splits_.size() + 1;
    while (j + 1 < m) {
        ++out.comparisons;
        if (q <= splits_[j]) break;
        ++j;
        out.fallback = true;
    }
    out.leaf = j;
    return out;
}

} // namespace lix
