#pragma once

// Merkle trees with tear-off views. Hashing is domain-separated
// (0x00 leaf prefix, 0x01 node prefix) and an unpaired node at any
// level is promoted unchanged to the next level. A tear-off view
// reveals a subset of leaves and replaces every maximal fully-hidden
// subtree with its single cover digest, which is enough to recompute
// the root without the hidden bytes.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ledgerlab/bytes.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"

namespace ledgerlab::merkle {

using crypto::Digest;

inline Digest leaf_digest(const Bytes& leaf) {
    Bytes input;
    input.reserve(leaf.size() + 1);
    input.push_back(0x00);
    input.insert(input.end(), leaf.begin(), leaf.end());
    return crypto::hash(input);
}

inline Digest node_digest(const Digest& left, const Digest& right) {
    Bytes input;
    input.reserve(65);
    input.push_back(0x01);
    input.insert(input.end(), left.bytes.begin(), left.bytes.end());
    input.insert(input.end(), right.bytes.begin(), right.bytes.end());
    return crypto::hash(input);
}

struct NodePos {
    std::uint32_t level = 0;
    std::uint32_t index = 0;

    bool operator<(const NodePos& other) const {
        if (level != other.level) return level < other.level;
        return index < other.index;
    }
    bool operator==(const NodePos& other) const {
        return level == other.level && index == other.index;
    }
};

class MerkleTree {
public:
    static MerkleTree build(const std::vector<Bytes>& leaves) {
        if (leaves.empty()) throw LabError(ErrorCode::EmptyLeaves, "merkle tree needs at least one leaf");
        MerkleTree tree;
        tree.leaves_ = leaves;
        std::vector<Digest> level;
        level.reserve(leaves.size());
        for (const Bytes& leaf : leaves) level.push_back(leaf_digest(leaf));
        tree.levels_.push_back(level);
        while (tree.levels_.back().size() > 1) {
            const std::vector<Digest>& prev = tree.levels_.back();
            std::vector<Digest> next;
            next.reserve((prev.size() + 1) / 2);
            for (std::size_t i = 0; i < prev.size(); i += 2) {
                if (i + 1 < prev.size()) {
                    next.push_back(node_digest(prev[i], prev[i + 1]));
                } else {
                    next.push_back(prev[i]);  // promote unpaired node
                }
            }
            tree.levels_.push_back(std::move(next));
        }
        return tree;
    }

    std::size_t leaf_count() const { return leaves_.size(); }
    const std::vector<Bytes>& leaves() const { return leaves_; }
    std::uint32_t top_level() const { return static_cast<std::uint32_t>(levels_.size() - 1); }
    const Digest& root() const { return levels_.back()[0]; }
    const Digest& node(NodePos pos) const { return levels_[pos.level][pos.index]; }
    std::size_t level_width(std::uint32_t level) const { return levels_[level].size(); }

    // Leaf range [lo, hi) under node (level, index); promotion keeps the
    // positional arithmetic exact.
    std::pair<std::size_t, std::size_t> span(NodePos pos) const {
        std::size_t unit = static_cast<std::size_t>(1) << pos.level;
        std::size_t lo = pos.index * unit;
        std::size_t hi = std::min(leaves_.size(), (pos.index + 1) * unit);
        return {lo, hi};
    }

private:
    std::vector<Bytes> leaves_;
    std::vector<std::vector<Digest>> levels_;
};

struct TearOffView {
    std::uint32_t leaf_count = 0;
    std::map<std::uint32_t, Bytes> revealed;  // leaf index -> leaf bytes
    std::map<NodePos, Digest> covers;         // maximal hidden subtree digests

    Bytes serialize() const {
        Encoder enc("ledgerlab.tearoff.v1");
        enc.u32(leaf_count);
        enc.u32(static_cast<std::uint32_t>(revealed.size()));
        for (const auto& [idx, bytes] : revealed) {
            enc.u32(idx);
            enc.field(bytes);
        }
        enc.u32(static_cast<std::uint32_t>(covers.size()));
        for (const auto& [pos, digest] : covers) {
            enc.u32(pos.level);
            enc.u32(pos.index);
            enc.raw(digest.to_bytes());
        }
        return enc.bytes();
    }
};

inline TearOffView tear_off(const MerkleTree& tree, const std::set<std::size_t>& hidden) {
    for (std::size_t idx : hidden) {
        if (idx >= tree.leaf_count())
            throw LabError(ErrorCode::IndexOutOfRange, "hidden leaf index out of range");
    }
    TearOffView view;
    view.leaf_count = static_cast<std::uint32_t>(tree.leaf_count());
    for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
        if (!hidden.count(i)) view.revealed[static_cast<std::uint32_t>(i)] = tree.leaves()[i];
    }

    // Top-down: emit a node as a cover when its whole span is hidden,
    // recurse when the span is mixed. Emitting at the first (highest)
    // fully-hidden node makes covers maximal.
    std::vector<NodePos> stack{NodePos{tree.top_level(), 0}};
    while (!stack.empty()) {
        NodePos pos = stack.back();
        stack.pop_back();
        auto [lo, hi] = tree.span(pos);
        bool all_hidden = true;
        bool any_hidden = false;
        for (std::size_t i = lo; i < hi; ++i) {
            if (hidden.count(i)) any_hidden = true;
            else all_hidden = false;
        }
        if (!any_hidden) continue;
        if (all_hidden) {
            view.covers[pos] = tree.node(pos);
            continue;
        }
        std::uint32_t child_level = pos.level - 1;
        std::size_t child_width = tree.level_width(child_level);
        std::uint32_t left = pos.index * 2;
        stack.push_back(NodePos{child_level, left});
        if (left + 1 < child_width) stack.push_back(NodePos{child_level, left + 1});
    }
    return view;
}

namespace detail {

inline std::size_t width_at(std::size_t leaf_count, std::uint32_t level) {
    std::size_t w = leaf_count;
    for (std::uint32_t i = 0; i < level; ++i) w = (w + 1) / 2;
    return w;
}

inline std::uint32_t top_level_for(std::size_t leaf_count) {
    std::uint32_t level = 0;
    std::size_t w = leaf_count;
    while (w > 1) {
        w = (w + 1) / 2;
        ++level;
    }
    return level;
}

inline std::pair<std::size_t, std::size_t> span_for(std::size_t leaf_count, NodePos pos) {
    std::size_t unit = static_cast<std::size_t>(1) << pos.level;
    std::size_t lo = pos.index * unit;
    std::size_t hi = std::min(leaf_count, (pos.index + 1) * unit);
    return {lo, hi};
}

}  // namespace detail

// Rebuilds the root from a view. Throws MalformedView unless the
// revealed indices and cover spans partition the leaf range exactly.
inline Digest recompute(const TearOffView& view) {
    const std::size_t n = view.leaf_count;
    if (n == 0) throw LabError(ErrorCode::MalformedView, "empty view");

    std::vector<int> coverage(n, 0);
    for (const auto& [idx, bytes] : view.revealed) {
        if (idx >= n) throw LabError(ErrorCode::MalformedView, "revealed index out of range");
        coverage[idx] += 1;
    }
    for (const auto& [pos, digest] : view.covers) {
        std::uint32_t top = detail::top_level_for(n);
        if (pos.level > top) throw LabError(ErrorCode::MalformedView, "cover level out of range");
        if (pos.index >= detail::width_at(n, pos.level))
            throw LabError(ErrorCode::MalformedView, "cover index out of range");
        auto [lo, hi] = detail::span_for(n, pos);
        if (lo >= hi) throw LabError(ErrorCode::MalformedView, "cover with empty span");
        for (std::size_t i = lo; i < hi; ++i) coverage[i] += 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (coverage[i] != 1)
            throw LabError(ErrorCode::MalformedView,
                           coverage[i] == 0 ? "leaf not covered" : "leaf covered twice");
    }

    std::uint32_t top = detail::top_level_for(n);
    std::vector<std::map<std::uint32_t, Digest>> known(top + 1);
    for (const auto& [idx, bytes] : view.revealed) known[0][idx] = leaf_digest(bytes);
    for (const auto& [pos, digest] : view.covers) known[pos.level][pos.index] = digest;

    for (std::uint32_t level = 0; level < top; ++level) {
        std::size_t child_width = detail::width_at(n, level);
        std::size_t parent_width = detail::width_at(n, level + 1);
        for (std::uint32_t i = 0; i < parent_width; ++i) {
            if (known[level + 1].count(i)) continue;  // supplied by a cover
            std::uint32_t left = i * 2;
            std::uint32_t right = left + 1;
            auto left_it = known[level].find(left);
            if (left_it == known[level].end()) continue;  // below a higher cover
            if (right < child_width) {
                auto right_it = known[level].find(right);
                if (right_it == known[level].end()) continue;
                known[level + 1][i] = node_digest(left_it->second, right_it->second);
            } else {
                known[level + 1][i] = left_it->second;  // promotion
            }
        }
    }
    auto root_it = known[top].find(0);
    if (root_it == known[top].end()) throw LabError(ErrorCode::MalformedView, "root not derivable");
    return root_it->second;
}

}  // namespace ledgerlab::merkle
