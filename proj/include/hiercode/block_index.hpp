#pragma once

#include "hiercode/codebook.hpp"
#include "hiercode/similarity.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hiercode {

/// Exact argmax over a codebook's label rows by branch-and-bound on a trie.
///
/// Every HierCode row is a sequence of blocks (structure slots, then radical
/// positions), each block holding blank or one table entry, so a frame's
/// score is a sum of per-block contributions that can be tabulated once per
/// query. The trie shares block prefixes between rows; a subtree is skipped
/// when its best reachable score cannot beat the current best under the
/// ranking of ranks_before. Results are identical to decode_frame.
class BlockIndex {
public:
    explicit BlockIndex(const Codebook& codebook);

    Decoded decode(std::span<const double> frame) const;

    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    struct Node {
        std::uint32_t first_child = 0;
        std::uint32_t child_count = 0;
        std::uint32_t value = 0;        // 0 = blank, k+1 = table entry k
        std::uint32_t min_weight = 0;   // over rows below this node
        std::uint32_t min_row = 0;      // lowest row index among those with min_weight
        std::uint32_t row = 0;          // leaf only
    };

    struct Search;

    void build(std::uint32_t node, std::size_t level, std::span<const std::uint32_t> rows);
    void search(Search& s, std::uint32_t node, std::size_t level, double partial) const;
    double row_score(std::size_t row, std::span<const double> frame) const;

    const Codebook* codebook_;
    std::size_t struct_blocks_;
    std::size_t blocks_;
    std::vector<std::uint32_t> values_;  // row-major N x blocks
    std::vector<Node> nodes_;
};

}  // namespace hiercode
