#ifndef SGEOM_PARTITIONS_HPP
#define SGEOM_PARTITIONS_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "sgeom/error.hpp"

namespace sgeom {

using IndexSet = std::vector<int>; // strictly increasing

inline bool is_sorted_set(const IndexSet& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i - 1] >= s[i]) return false;
    return true;
}

/// Graded lexicographic order on index subsets: even cardinality before odd;
/// within a parity class by cardinality, then lexicographically.
inline std::strong_ordering graded_lex_compare(const IndexSet& a, const IndexSet& b) {
    const int pa = static_cast<int>(a.size() % 2), pb = static_cast<int>(b.size() % 2);
    if (pa != pb) return pa <=> pb;
    if (a.size() != b.size()) return a.size() <=> b.size();
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

/// Plain lexicographic order on subsets viewed as ascending tuples.
inline std::strong_ordering lex_compare(const IndexSet& a, const IndexSet& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

enum class BlockOrder { graded_lex, lex };

/// Set partition with an explicitly recorded block order. Blocks are
/// pairwise disjoint nonempty sorted sets covering the total set.
class Partition {
public:
    Partition() : order_(BlockOrder::graded_lex) {}

    Partition(std::vector<IndexSet> blocks, BlockOrder order = BlockOrder::graded_lex)
        : blocks_(std::move(blocks)), order_(order) {
        for (auto& b : blocks_) {
            if (b.empty()) throw domain_error("partition block must be nonempty");
            if (!is_sorted_set(b)) throw domain_error("partition block must be strictly increasing");
        }
        sort_blocks();
        IndexSet all = total();
        std::size_t count = 0;
        for (const auto& b : blocks_) count += b.size();
        if (count != all.size()) throw domain_error("partition blocks overlap");
    }

    const std::vector<IndexSet>& blocks() const { return blocks_; }
    BlockOrder order() const { return order_; }
    int length() const { return static_cast<int>(blocks_.size()); }

    IndexSet total() const {
        IndexSet all;
        for (const auto& b : blocks_) all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        return all;
    }

    int even_count() const {
        int e = 0;
        for (const auto& b : blocks_)
            if (b.size() % 2 == 0) ++e;
        return e;
    }

    int odd_count() const { return length() - even_count(); }

    bool all_blocks_even() const { return odd_count() == 0; }

    bool operator==(const Partition& o) const { return blocks_ == o.blocks_; }
    bool operator!=(const Partition& o) const { return !(*this == o); }
    bool operator<(const Partition& o) const { return blocks_ < o.blocks_; }

private:
    // Disjoint blocks compare lexicographically by their minimum; in the
    // graded order even-cardinality blocks come first. Reordering within a
    // parity class relative to plain lex moves only even blocks, which keeps
    // the partition sign independent of the choice between the two orders.
    void sort_blocks() {
        auto cmp = [this](const IndexSet& a, const IndexSet& b) {
            if (order_ == BlockOrder::graded_lex) {
                const int pa = static_cast<int>(a.size() % 2), pb = static_cast<int>(b.size() % 2);
                if (pa != pb) return pa < pb;
            }
            return lex_compare(a, b) < 0;
        };
        std::sort(blocks_.begin(), blocks_.end(), cmp);
    }

    std::vector<IndexSet> blocks_;
    BlockOrder order_;
};

/// Parity of the permutation sorting the concatenation of the blocks in
/// their declared order.
inline int partition_sign(const Partition& nu) {
    IndexSet concat;
    for (const auto& b : nu.blocks()) concat.insert(concat.end(), b.begin(), b.end());
    int inversions = 0;
    for (std::size_t i = 0; i < concat.size(); ++i)
        for (std::size_t j = i + 1; j < concat.size(); ++j)
            if (concat[i] > concat[j]) ++inversions;
    return inversions % 2 == 0 ? 1 : -1;
}

enum class PartitionFilter { all, even_blocks };

/// Complete, duplicate-free enumeration via restricted growth strings
/// (iterative). The empty set yields exactly the empty partition.
inline std::vector<Partition> enumerate_partitions(const IndexSet& a,
                                                   PartitionFilter filter = PartitionFilter::all,
                                                   int length = -1,
                                                   BlockOrder order = BlockOrder::graded_lex) {
    if (!is_sorted_set(a)) throw domain_error("total set must be strictly increasing");
    std::vector<Partition> out;
    const std::size_t n = a.size();
    if (n == 0) {
        Partition empty({}, order);
        bool ok = (length < 0 || length == 0);
        if (ok) out.push_back(empty);
        return out;
    }
    std::vector<std::size_t> rgs(n, 0);
    auto emit = [&]() {
        std::size_t nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<IndexSet> blocks(nblocks);
        for (std::size_t i = 0; i < n; ++i) blocks[rgs[i]].push_back(a[i]);
        if (length >= 0 && static_cast<int>(nblocks) != length) return;
        if (filter == PartitionFilter::even_blocks)
            for (const auto& b : blocks)
                if (b.size() % 2 != 0) return;
        out.emplace_back(std::move(blocks), order);
    };
    while (true) {
        emit();
        // rightmost position whose label can still grow: rgs[i] <= max(rgs[0..i-1])
        std::size_t i = n;
        bool advanced = false;
        while (i-- > 1) {
            std::size_t prefix_max = 0;
            for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
            if (rgs[i] <= prefix_max) {
                ++rgs[i];
                for (std::size_t j = i + 1; j < n; ++j) rgs[j] = 0;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return out;
}

struct RefinementResult {
    bool is_coarser = false; // omega <= nu (omega coarser than nu)
    // for each block of omega, the nu-induced partition of that block
    std::vector<Partition> induced;
};

/// Checks omega <= nu and computes the induced partitions O|nu.
inline RefinementResult refinement(const Partition& omega, const Partition& nu) {
    if (omega.total() != nu.total()) throw dimension_error("partitions have different total sets");
    RefinementResult res;
    std::map<int, std::size_t> owner; // element -> index of omega block
    for (std::size_t i = 0; i < omega.blocks().size(); ++i)
        for (int x : omega.blocks()[i]) owner[x] = i;
    std::vector<std::vector<IndexSet>> grouped(omega.blocks().size());
    for (const auto& l : nu.blocks()) {
        std::size_t o = owner[l.front()];
        for (int x : l)
            if (owner[x] != o) return res; // L not inside a single omega block
        grouped[o].push_back(l);
    }
    res.is_coarser = true;
    for (auto& g : grouped) res.induced.emplace_back(std::move(g), nu.order());
    return res;
}

/// All partitions coarser than nu, via the bijection with Part(nu).
inline std::vector<Partition> coarser_of(const Partition& nu) {
    const int l = nu.length();
    IndexSet items(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) items[static_cast<std::size_t>(i)] = i;
    std::vector<Partition> out;
    for (const auto& grouping : enumerate_partitions(items)) {
        std::vector<IndexSet> blocks;
        for (const auto& g : grouping.blocks()) {
            IndexSet merged;
            for (int bi : g) {
                const auto& b = nu.blocks()[static_cast<std::size_t>(bi)];
                merged.insert(merged.end(), b.begin(), b.end());
            }
            std::sort(merged.begin(), merged.end());
            blocks.push_back(std::move(merged));
        }
        out.emplace_back(std::move(blocks), nu.order());
    }
    return out;
}

} // namespace sgeom

#endif
