#pragma once

#include "hiercode/codebook.hpp"
#include "hiercode/ids.hpp"

#include <string>
#include <vector>

namespace hiercode::testing {

inline DecompTree leaf(const std::string& s) { return DecompTree::radical(s); }

inline DecompTree lr(DecompTree a, DecompTree b) {
    return DecompTree::join(StructureOp::LeftRight, std::move(a), std::move(b));
}

inline DecompTree ab(DecompTree a, DecompTree b) {
    return DecompTree::join(StructureOp::AboveBelow, std::move(a), std::move(b));
}

/// Toy IDS lines in the file format.
inline std::vector<CodebookEntry> entries_from(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::vector<CodebookEntry> out;
    for (const auto& [ch, ids] : rows) out.push_back({ch, parse_ids(ids)});
    return out;
}

inline Codebook toy_codebook(const CodeParams& params = CodeParams{}, std::uint64_t seed = 3) {
    return build_codebook(entries_from({{"好", "⿰女子"}, {"明", "⿰日月"}, {"字", "⿱宀子"}, {"木", "木"},
                                        {"林", "⿰木木"}, {"森", "⿱木⿰木木"}}),
                          params, seed);
}

}  // namespace hiercode::testing
