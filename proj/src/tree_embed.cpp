#include "hiercode/tree_embed.hpp"

#include "hiercode/error.hpp"

#include <deque>
#include <utility>

namespace hiercode {

FullTreeSlots::FullTreeSlots(std::size_t depth, std::vector<SlotContent> slots)
    : depth_(depth), slots_(std::move(slots)) {
    if (slots_.size() != (std::size_t{1} << depth_) - 1) {
        throw std::invalid_argument("FullTreeSlots: slot count does not match depth");
    }
}

FullTreeSlots embed_full_tree(const DecompTree& tree, const CodeParams& params) {
    params.check();
    const std::size_t depth = tree.depth();
    if (depth > params.depth) {
        throw Error(ErrorCode::TreeTooDeep,
                    "tree depth " + std::to_string(depth) + " exceeds D=" + std::to_string(params.depth));
    }
    std::vector<SlotContent> slots(params.full_slot_count(), BlankSlot{});
    std::deque<std::pair<const DecompTree*, std::size_t>> queue{{&tree, 0}};
    while (!queue.empty()) {
        auto [node, slot] = queue.front();
        queue.pop_front();
        if (node->is_radical()) {
            slots[slot] = node->radical_id();
            continue;
        }
        slots[slot] = node->op();
        queue.emplace_back(&node->left(), 2 * slot + 1);
        queue.emplace_back(&node->right(), 2 * slot + 2);
    }
    return FullTreeSlots(params.depth, std::move(slots));
}

std::vector<std::optional<StructureOp>> structure_slots(const FullTreeSlots& slots) {
    const std::size_t count = (std::size_t{1} << (slots.depth() - 1)) - 1;
    std::vector<std::optional<StructureOp>> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (const auto* op = std::get_if<StructureOp>(&slots[i])) out[i] = *op;
    }
    return out;
}

std::vector<RadicalId> radical_sequence(const FullTreeSlots& slots, const CodeParams& params) {
    std::vector<RadicalId> out;
    for (const auto& content : slots.slots()) {
        if (const auto* id = std::get_if<RadicalId>(&content)) out.push_back(*id);
    }
    if (out.size() > params.max_radicals) {
        throw Error(ErrorCode::RadicalOverflow, std::to_string(out.size()) + " radicals exceed M=" +
                                                    std::to_string(params.max_radicals));
    }
    return out;
}

}  // namespace hiercode
