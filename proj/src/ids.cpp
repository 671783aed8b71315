#include "hiercode/ids.hpp"

#include "hiercode/error.hpp"
#include "hiercode/params.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hiercode {

namespace {

constexpr char32_t kIdcFirst = 0x2FF0;
constexpr char32_t kIdcLast = 0x2FFF;

// Nesting bound keeps recursive parsing and destruction stack-safe on
// adversarial input. Real IDS data nests fewer than ten levels.
constexpr std::size_t kMaxNesting = 512;

std::string hex(char32_t cp) {
    std::ostringstream os;
    os << "U+" << std::uppercase << std::hex << static_cast<std::uint32_t>(cp);
    return os.str();
}

bool is_ascii_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}

class IdsReader {
public:
    explicit IdsReader(std::string_view text) : text_(text) {}

    RawIdsTree parse_all() {
        RawIdsTree tree = parse_node(0);
        skip_space();
        if (pos_ != text_.size()) {
            throw Error(ErrorCode::MalformedIds,
                        "trailing input at byte " + std::to_string(pos_) + " in \"" +
                            std::string(text_) + "\"");
        }
        return tree;
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            std::size_t probe = pos_;
            auto cp = utf8::next(text_, probe);
            if (!cp || !is_ascii_space(*cp)) return;
            pos_ = probe;
        }
    }

    RawIdsTree parse_node(std::size_t nesting) {
        if (nesting > kMaxNesting) {
            throw Error(ErrorCode::MalformedIds, "nesting deeper than " + std::to_string(kMaxNesting));
        }
        skip_space();
        if (pos_ >= text_.size()) {
            throw Error(ErrorCode::MalformedIds,
                        "truncated operand list in \"" + std::string(text_) + "\"");
        }
        const std::size_t start = pos_;
        auto cp = utf8::next(text_, pos_);
        if (!cp) {
            throw Error(ErrorCode::MalformedIds, "invalid UTF-8 at byte " + std::to_string(start));
        }
        RawIdsTree node;
        if (*cp >= kIdcFirst && *cp <= kIdcLast) {
            auto op = ids_operator_from(*cp);
            if (!op) throw Error(ErrorCode::UnknownOperator, "operator " + hex(*cp) + " is not supported");
            node.op = op;
            const std::size_t n = arity(*op);
            node.children.reserve(n);
            for (std::size_t i = 0; i < n; ++i) node.children.push_back(parse_node(nesting + 1));
        } else {
            node.atom.assign(text_.substr(start, pos_ - start));
        }
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

StructureOp binary_equivalent(IdsOperator op) {
    switch (op) {
        case IdsOperator::LeftRight:
        case IdsOperator::LeftMiddleRight: return StructureOp::LeftRight;
        case IdsOperator::AboveBelow:
        case IdsOperator::AboveMiddleBelow: return StructureOp::AboveBelow;
        case IdsOperator::FullSurround: return StructureOp::FullSurround;
        case IdsOperator::SurroundAbove: return StructureOp::SurroundAbove;
        case IdsOperator::SurroundBelow: return StructureOp::SurroundBelow;
        case IdsOperator::SurroundLeft: return StructureOp::SurroundLeft;
        case IdsOperator::SurroundUpperLeft: return StructureOp::SurroundUpperLeft;
        case IdsOperator::SurroundUpperRight: return StructureOp::SurroundUpperRight;
        case IdsOperator::SurroundLowerLeft: return StructureOp::SurroundLowerLeft;
        case IdsOperator::Overlaid: return StructureOp::Overlaid;
    }
    return StructureOp::LeftRight;
}

void render_into(const DecompTree& tree, std::string& out) {
    if (tree.is_radical()) {
        out += tree.radical_id().symbol;
        return;
    }
    utf8::append(out, codepoint_of(tree.op()));
    render_into(tree.left(), out);
    render_into(tree.right(), out);
}

}  // namespace

char32_t codepoint_of(StructureOp op) noexcept {
    static constexpr std::array<char32_t, kStructureCount> cps = {
        0x2FF0, 0x2FF1, 0x2FF4, 0x2FF5, 0x2FF6, 0x2FF7, 0x2FF8, 0x2FF9, 0x2FFA, 0x2FFB};
    return cps[index_of(op)];
}

std::string_view name_of(StructureOp op) noexcept {
    static constexpr std::array<std::string_view, kStructureCount> names = {
        "LeftRight",        "AboveBelow",         "FullSurround",      "SurroundAbove",
        "SurroundBelow",    "SurroundLeft",       "SurroundUpperLeft", "SurroundUpperRight",
        "SurroundLowerLeft", "Overlaid"};
    return names[index_of(op)];
}

std::optional<IdsOperator> ids_operator_from(char32_t cp) noexcept {
    if (cp < kIdcFirst || cp > kIdcFirst + 11) return std::nullopt;
    return static_cast<IdsOperator>(cp - kIdcFirst);
}

std::size_t arity(IdsOperator op) noexcept {
    return (op == IdsOperator::LeftMiddleRight || op == IdsOperator::AboveMiddleBelow) ? 3 : 2;
}

// ---------------------------------------------------------------------------
// DecompTree

DecompTree DecompTree::radical(RadicalId id) {
    DecompTree t;
    t.radical_ = std::move(id);
    return t;
}

DecompTree DecompTree::join(StructureOp op, DecompTree left, DecompTree right) {
    DecompTree t;
    t.op_ = op;
    t.children_.reserve(2);
    t.children_.push_back(std::move(left));
    t.children_.push_back(std::move(right));
    return t;
}

StructureOp DecompTree::op() const {
    if (!op_) throw std::logic_error("DecompTree::op on a radical node");
    return *op_;
}

const RadicalId& DecompTree::radical_id() const {
    if (op_) throw std::logic_error("DecompTree::radical_id on a structure node");
    return radical_;
}

const DecompTree& DecompTree::left() const {
    if (!op_) throw std::logic_error("DecompTree::left on a radical node");
    return children_[0];
}

const DecompTree& DecompTree::right() const {
    if (!op_) throw std::logic_error("DecompTree::right on a radical node");
    return children_[1];
}

std::size_t DecompTree::depth() const noexcept {
    if (is_radical()) return 1;
    return 1 + std::max(children_[0].depth(), children_[1].depth());
}

std::size_t DecompTree::leaf_count() const noexcept {
    if (is_radical()) return 1;
    return children_[0].leaf_count() + children_[1].leaf_count();
}

std::size_t DecompTree::node_count() const noexcept {
    if (is_radical()) return 1;
    return 1 + children_[0].node_count() + children_[1].node_count();
}

std::vector<RadicalId> DecompTree::leaves() const {
    std::vector<RadicalId> out;
    std::vector<const DecompTree*> stack{this};
    while (!stack.empty()) {
        const DecompTree* n = stack.back();
        stack.pop_back();
        if (n->is_radical()) {
            out.push_back(n->radical_);
        } else {
            stack.push_back(&n->children_[1]);
            stack.push_back(&n->children_[0]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

RawIdsTree parse_raw_ids(std::string_view text) { return IdsReader(text).parse_all(); }

DecompTree rewrite_ternary(const RawIdsTree& raw) {
    if (!raw.op) return DecompTree::radical(raw.atom);
    const StructureOp op = binary_equivalent(*raw.op);
    if (raw.children.size() == 3) {
        // Right-associative: first operand stays directly under the root.
        return DecompTree::join(op, rewrite_ternary(raw.children[0]),
                                DecompTree::join(op, rewrite_ternary(raw.children[1]),
                                                 rewrite_ternary(raw.children[2])));
    }
    return DecompTree::join(op, rewrite_ternary(raw.children[0]), rewrite_ternary(raw.children[1]));
}

DecompTree parse_ids(std::string_view text) { return rewrite_ternary(parse_raw_ids(text)); }

std::string render(const DecompTree& tree) {
    std::string out;
    render_into(tree, out);
    return out;
}

std::vector<Violation> validate(const DecompTree& tree, const CodeParams& params) {
    std::vector<Violation> report;
    const std::size_t depth = tree.depth();
    if (depth > params.depth) report.emplace_back(DepthExceeded{depth, params.depth});
    const std::size_t leaves = tree.leaf_count();
    if (leaves > params.max_radicals) report.emplace_back(RadicalOverflow{leaves, params.max_radicals});
    return report;
}

std::string describe(const Violation& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            const char* name = std::is_same_v<T, DepthExceeded> ? "DepthExceeded" : "RadicalOverflow";
            return std::string(name) + "(" + std::to_string(x.actual) + ", " + std::to_string(x.limit) + ")";
        },
        v);
}

// ---------------------------------------------------------------------------
// IDS files

std::vector<IdsEntry> parse_ids_records(std::string_view content, std::string_view source_name) {
    std::vector<IdsEntry> entries;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t eol = std::min(content.find('\n', pos), content.size());
        std::string_view line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (eol == content.size()) break;
            continue;
        }
        const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0) {
            throw Error(ErrorCode::BadFormat, where + ": expected <character>\\t<IDS>");
        }
        std::string character(line.substr(0, tab));
        try {
            DecompTree tree = parse_ids(line.substr(tab + 1));
            auto [it, inserted] = seen.emplace(character, line_no);
            if (!inserted) {
                throw Error(ErrorCode::DuplicateCharacter,
                            "character " + character + " already defined on line " +
                                std::to_string(it->second));
            }
            entries.push_back(IdsEntry{std::move(character), std::move(tree), line_no});
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.detail());
        }
        if (eol == content.size()) break;
    }
    return entries;
}

std::vector<IdsEntry> load_ids_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ids_records(buf.str(), path.string());
}

// ---------------------------------------------------------------------------
// UTF-8

namespace utf8 {

std::optional<char32_t> next(std::string_view text, std::size_t& pos) noexcept {
    if (pos >= text.size()) return std::nullopt;
    const auto b0 = static_cast<unsigned char>(text[pos]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
        ++pos;
        return b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return std::nullopt;
    }
    if (pos + len > text.size()) return std::nullopt;
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) return std::nullopt;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
    pos += len;
    return cp;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace utf8

}  // namespace hiercode
