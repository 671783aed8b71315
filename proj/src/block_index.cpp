#include "hiercode/block_index.hpp"

#include "hiercode/error.hpp"
#include "hiercode/tree_embed.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>

namespace hiercode {

struct BlockIndex::Search {
    std::span<const double> frame;
    std::vector<std::vector<double>> contrib;  // [block][value]
    std::vector<double> suffix;                // best reachable sum over blocks >= b
    double slack = 0.0;                        // bound rounding allowance, 0 for integer frames
    bool has_best = false;
    Decoded best;
};

BlockIndex::BlockIndex(const Codebook& codebook)
    : codebook_(&codebook),
      struct_blocks_(codebook.params().structure_slot_count()),
      blocks_(codebook.params().structure_slot_count() + codebook.params().max_radicals) {
    const CodeParams& p = codebook.params();
    const std::size_t n = codebook.size();
    if (n == 0) throw Error(ErrorCode::BadLabel, "empty codebook");
    values_.assign(n * blocks_, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const FullTreeSlots slots = embed_full_tree(codebook.tree(i), p);
        const auto structure = structure_slots(slots);
        for (std::size_t s = 0; s < structure.size(); ++s) {
            if (structure[s]) values_[i * blocks_ + s] = static_cast<std::uint32_t>(index_of(*structure[s]) + 1);
        }
        const auto sequence = radical_sequence(slots, p);
        for (std::size_t m = 0; m < sequence.size(); ++m) {
            values_[i * blocks_ + struct_blocks_ + m] =
                static_cast<std::uint32_t>(*codebook.radicals().find(sequence[m]) + 1);
        }
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const auto va = values_.begin() + static_cast<std::ptrdiff_t>(a * blocks_);
        const auto vb = values_.begin() + static_cast<std::ptrdiff_t>(b * blocks_);
        return std::lexicographical_compare(va, va + static_cast<std::ptrdiff_t>(blocks_), vb,
                                            vb + static_cast<std::ptrdiff_t>(blocks_));
    });
    nodes_.reserve(2 * n + 1);
    nodes_.emplace_back();
    build(0, 0, order);
}

// Fills node, whose rows share blocks [0, level). Children are contiguous.
void BlockIndex::build(std::uint32_t node, std::size_t level, std::span<const std::uint32_t> rows) {
    if (level == blocks_) {
        if (rows.size() != 1) throw Error(ErrorCode::CodeCollision, "identical rows in block index");
        Node& leaf = nodes_[node];
        leaf.row = rows[0];
        leaf.min_row = rows[0];
        leaf.min_weight = static_cast<std::uint32_t>(codebook_->row_weight(rows[0]));
        return;
    }
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t a = 0; a < rows.size();) {
        const std::uint32_t v = values_[rows[a] * blocks_ + level];
        std::size_t b = a + 1;
        while (b < rows.size() && values_[rows[b] * blocks_ + level] == v) ++b;
        groups.emplace_back(a, b);
        a = b;
    }
    const auto first = static_cast<std::uint32_t>(nodes_.size());
    nodes_.resize(nodes_.size() + groups.size());
    nodes_[node].first_child = first;
    nodes_[node].child_count = static_cast<std::uint32_t>(groups.size());

    std::uint32_t best_w = UINT32_MAX;
    std::uint32_t best_r = UINT32_MAX;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto [a, b] = groups[g];
        const auto child = static_cast<std::uint32_t>(first + g);
        nodes_[child].value = values_[rows[a] * blocks_ + level];
        build(child, level + 1, rows.subspan(a, b - a));
        const Node& ch = nodes_[child];
        if (ch.min_weight < best_w || (ch.min_weight == best_w && ch.min_row < best_r)) {
            best_w = ch.min_weight;
            best_r = ch.min_row;
        }
    }
    nodes_[node].min_weight = best_w;
    nodes_[node].min_row = best_r;
}

double BlockIndex::row_score(std::size_t row, std::span<const double> frame) const {
    // Same summation order as decode_frame so scores compare bit-for-bit.
    auto code = codebook_->row(row);
    double sum = 0.0;
    for (std::size_t p = 0; p < code.size(); ++p) sum += static_cast<double>(code[p]) * frame[p];
    return sum;
}

void BlockIndex::search(Search& s, std::uint32_t node, std::size_t level, double partial) const {
    const Node& n = nodes_[node];
    if (level == blocks_) {
        const Decoded cand{n.row, row_score(n.row, s.frame)};
        if (!s.has_best || ranks_before(*codebook_, cand, s.best)) {
            s.best = cand;
            s.has_best = true;
        }
        return;
    }
    const auto& contrib = s.contrib[level];
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(n.child_count);
    for (std::uint32_t c = n.first_child; c < n.first_child + n.child_count; ++c) {
        order.emplace_back(partial + contrib[nodes_[c].value], c);
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        const Node& na = nodes_[a.second];
        const Node& nb = nodes_[b.second];
        if (na.min_weight != nb.min_weight) return na.min_weight < nb.min_weight;
        return na.min_row < nb.min_row;
    });
    for (const auto& [sum, c] : order) {
        if (s.has_best) {
            const double upper = sum + s.suffix[level + 1] + s.slack;
            if (upper < s.best.score) continue;
            if (upper <= s.best.score) {
                // Nothing below can beat best on score; only the tie rule could.
                const Node& ch = nodes_[c];
                const std::size_t bw = codebook_->row_weight(s.best.index);
                if (ch.min_weight > bw || (ch.min_weight == bw && ch.min_row >= s.best.index)) continue;
            }
        }
        search(s, c, level + 1, sum);
    }
}

Decoded BlockIndex::decode(std::span<const double> frame) const {
    const Codebook& cb = *codebook_;
    const CodeParams& p = cb.params();
    if (frame.size() != cb.code_length()) {
        throw Error(ErrorCode::DimensionMismatch, "frame length " + std::to_string(frame.size()) +
                                                      " does not match codebook t=" +
                                                      std::to_string(cb.code_length()));
    }
    Search s;
    s.frame = frame;
    s.contrib.resize(blocks_);
    bool integral = true;
    double magnitude = 0.0;
    for (double v : frame) {
        integral = integral && std::nearbyint(v) == v && std::fabs(v) < 1e9;
        magnitude += std::fabs(v);
    }
    s.slack = integral ? 0.0 : 1e-9 * (1.0 + magnitude);

    auto block_dot = [&](std::span<const Trit> code, std::size_t offset) {
        double sum = 0.0;
        for (std::size_t q = 0; q < code.size(); ++q) sum += static_cast<double>(code[q]) * frame[offset + q];
        return sum;
    };
    for (std::size_t b = 0; b < struct_blocks_; ++b) {
        auto& c = s.contrib[b];
        c.assign(kStructureCount + 1, 0.0);
        for (std::size_t k = 0; k < kStructureCount; ++k) {
            c[k + 1] = block_dot(cb.structures().code(kAllStructures[k]), b * p.struct_bits);
        }
    }
    const std::size_t radical_count = cb.radicals().size();
    for (std::size_t m = 0; m < p.max_radicals; ++m) {
        auto& c = s.contrib[struct_blocks_ + m];
        c.assign(radical_count + 1, 0.0);
        for (std::size_t r = 0; r < radical_count; ++r) {
            c[r + 1] = block_dot(cb.radicals().code(r), p.structural_length() + m * p.radical_bits);
        }
    }
    s.suffix.assign(blocks_ + 1, 0.0);
    for (std::size_t b = blocks_; b-- > 0;) {
        s.suffix[b] = s.suffix[b + 1] + *std::max_element(s.contrib[b].begin(), s.contrib[b].end());
    }
    search(s, 0, 0, 0.0);
    return s.best;
}

}  // namespace hiercode
