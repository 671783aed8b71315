#pragma once

#include "hiercode/ids.hpp"
#include "hiercode/params.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace hiercode {

struct BlankSlot {
    friend bool operator==(BlankSlot, BlankSlot) = default;
};

using SlotContent = std::variant<BlankSlot, StructureOp, RadicalId>;

/// A character tree laid into the depth-D full binary tree, breadth-first:
/// slot 0 is the root and slot i has children 2i+1 and 2i+2.
class FullTreeSlots {
public:
    FullTreeSlots(std::size_t depth, std::vector<SlotContent> slots);

    std::size_t depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return slots_.size(); }
    const SlotContent& operator[](std::size_t i) const { return slots_[i]; }
    const std::vector<SlotContent>& slots() const noexcept { return slots_; }

    bool is_blank(std::size_t i) const { return std::holds_alternative<BlankSlot>(slots_[i]); }

    friend bool operator==(const FullTreeSlots&, const FullTreeSlots&) = default;

private:
    std::size_t depth_;
    std::vector<SlotContent> slots_;
};

/// Throws TreeTooDeep when the tree does not fit in params.depth levels.
FullTreeSlots embed_full_tree(const DecompTree& tree, const CodeParams& params);

/// First 2^(D-1)-1 slots; radical and blank content both project to nullopt.
std::vector<std::optional<StructureOp>> structure_slots(const FullTreeSlots& slots);

/// Radicals in breadth-first slot order. Throws RadicalOverflow past M.
std::vector<RadicalId> radical_sequence(const FullTreeSlots& slots, const CodeParams& params);

}  // namespace hiercode
