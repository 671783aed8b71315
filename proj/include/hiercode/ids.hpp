#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hiercode {

struct CodeParams;

/// The ten binary structural operators. Enumeration order fixes each
/// operator's index in the canonical structure-code table.
enum class StructureOp : std::uint8_t {
    LeftRight,           // U+2FF0
    AboveBelow,          // U+2FF1
    FullSurround,        // U+2FF4
    SurroundAbove,       // U+2FF5
    SurroundBelow,       // U+2FF6
    SurroundLeft,        // U+2FF7
    SurroundUpperLeft,   // U+2FF8
    SurroundUpperRight,  // U+2FF9
    SurroundLowerLeft,   // U+2FFA
    Overlaid,            // U+2FFB
};

inline constexpr std::size_t kStructureCount = 10;

inline constexpr std::array<StructureOp, kStructureCount> kAllStructures = {
    StructureOp::LeftRight,         StructureOp::AboveBelow,         StructureOp::FullSurround,
    StructureOp::SurroundAbove,     StructureOp::SurroundBelow,      StructureOp::SurroundLeft,
    StructureOp::SurroundUpperLeft, StructureOp::SurroundUpperRight, StructureOp::SurroundLowerLeft,
    StructureOp::Overlaid,
};

constexpr std::size_t index_of(StructureOp op) noexcept { return static_cast<std::size_t>(op); }

char32_t codepoint_of(StructureOp op) noexcept;
std::string_view name_of(StructureOp op) noexcept;

/// The twelve Unicode ideographic description characters, including the
/// two ternary ones that never survive into a DecompTree.
enum class IdsOperator : std::uint8_t {
    LeftRight,
    AboveBelow,
    LeftMiddleRight,   // U+2FF2, ternary
    AboveMiddleBelow,  // U+2FF3, ternary
    FullSurround,
    SurroundAbove,
    SurroundBelow,
    SurroundLeft,
    SurroundUpperLeft,
    SurroundUpperRight,
    SurroundLowerLeft,
    Overlaid,
};

std::optional<IdsOperator> ids_operator_from(char32_t cp) noexcept;
std::size_t arity(IdsOperator op) noexcept;

/// Atomic component symbol (a radical, a whole single-radical character, a
/// Latin letter, digit or punctuation mark). Kept as its UTF-8 spelling.
struct RadicalId {
    std::string symbol;

    friend auto operator<=>(const RadicalId&, const RadicalId&) = default;
};

/// Direct parse of an IDS string: operators carry 2 or 3 children.
struct RawIdsTree {
    std::optional<IdsOperator> op;  // empty for an atom
    std::string atom;
    std::vector<RawIdsTree> children;

    friend bool operator==(const RawIdsTree&, const RawIdsTree&) = default;
};

/// Binary decomposition tree: structures at internal nodes, radicals at
/// leaves. Internal nodes always have exactly two children.
class DecompTree {
public:
    static DecompTree radical(RadicalId id);
    static DecompTree radical(std::string symbol) { return radical(RadicalId{std::move(symbol)}); }
    static DecompTree join(StructureOp op, DecompTree left, DecompTree right);

    bool is_radical() const noexcept { return !op_.has_value(); }
    StructureOp op() const;
    const RadicalId& radical_id() const;
    const DecompTree& left() const;
    const DecompTree& right() const;

    /// A lone radical has depth 1.
    std::size_t depth() const noexcept;
    std::size_t leaf_count() const noexcept;
    std::size_t node_count() const noexcept;
    /// Leaves in left-to-right order.
    std::vector<RadicalId> leaves() const;

    friend bool operator==(const DecompTree&, const DecompTree&) = default;

private:
    DecompTree() = default;

    std::optional<StructureOp> op_;
    RadicalId radical_;
    std::vector<DecompTree> children_;
};

RawIdsTree parse_raw_ids(std::string_view text);
DecompTree rewrite_ternary(const RawIdsTree& raw);

/// Parses a prefix-notation IDS string into a binary tree. ASCII whitespace
/// between components is ignored. Throws MalformedIds or UnknownOperator.
DecompTree parse_ids(std::string_view text);

/// Prefix-notation IDS spelling of a binary tree, without separators.
std::string render(const DecompTree& tree);

struct DepthExceeded {
    std::size_t actual;
    std::size_t limit;
    friend bool operator==(const DepthExceeded&, const DepthExceeded&) = default;
};

struct RadicalOverflow {
    std::size_t actual;
    std::size_t limit;
    friend bool operator==(const RadicalOverflow&, const RadicalOverflow&) = default;
};

using Violation = std::variant<DepthExceeded, RadicalOverflow>;

/// Empty result means the tree is encodable under params.
std::vector<Violation> validate(const DecompTree& tree, const CodeParams& params);

std::string describe(const Violation& v);

struct IdsEntry {
    std::string character;
    DecompTree tree;
    std::size_t line = 0;
};

/// Reads `<character>\t<IDS>` records; '#' lines and blank lines are
/// skipped. Errors carry the file name and line number.
std::vector<IdsEntry> load_ids_file(const std::filesystem::path& path);
std::vector<IdsEntry> parse_ids_records(std::string_view content, std::string_view source_name);

namespace utf8 {

/// Decodes one codepoint at text[pos], advancing pos. Returns nullopt on a
/// malformed sequence.
std::optional<char32_t> next(std::string_view text, std::size_t& pos) noexcept;
void append(std::string& out, char32_t cp);

}  // namespace utf8

}  // namespace hiercode
