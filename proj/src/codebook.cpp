#include "hiercode/codebook.hpp"

#include "hiercode/error.hpp"
#include "hiercode/tree_embed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace hiercode {

namespace {

// Blank-row stream is decorrelated from the radical-code stream of the same
// seed.
constexpr std::uint64_t kBlankStreamSalt = 0x9E3779B97F4A7C15ULL;

std::string row_key(std::span<const Trit> row) {
    return std::string(reinterpret_cast<const char*>(row.data()), row.size());
}

std::size_t hamming(std::span<const Trit> a, std::span<const Trit> b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

// Packs ±1 codes into words so rejection sampling scans cheaply.
std::vector<std::uint64_t> pack_signs(std::span<const Trit> code) {
    std::vector<std::uint64_t> words((code.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (code[i] > 0) words[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return words;
}

void draw_signs(std::mt19937_64& rng, std::span<Trit> out) {
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i % 64 == 0) word = rng();
        out[i] = ((word >> (i % 64)) & 1U) ? Trit{1} : Trit{-1};
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Structure codes

StructCodeTable::StructCodeTable(std::size_t struct_bits) : bits_(struct_bits) {
    if (struct_bits < 64 && (std::uint64_t{1} << struct_bits) < kStructureCount + 1) {
        throw Error(ErrorCode::ParamsTooSmall, "L_S=" + std::to_string(struct_bits) +
                                                   " cannot hold 10 distinct non-zero structure codes");
    }
    codes_.resize(kStructureCount * bits_);
    for (std::size_t k = 0; k < kStructureCount; ++k) {
        const std::uint64_t value = k + 1;
        for (std::size_t b = 0; b < bits_; ++b) {
            const std::size_t shift = bits_ - 1 - b;
            const bool one = shift < 64 && ((value >> shift) & 1U);
            codes_[k * bits_ + b] = one ? Trit{1} : Trit{-1};
        }
    }
}

StructCodeTable build_struct_table(const CodeParams& params) { return StructCodeTable(params.struct_bits); }

// ---------------------------------------------------------------------------
// Radical codes

RadicalCodeSet::RadicalCodeSet(std::size_t bits, std::vector<RadicalId> symbols, std::vector<Trit> codes,
                               CodeProvenance provenance)
    : bits_(bits), symbols_(std::move(symbols)), codes_(std::move(codes)), provenance_(std::move(provenance)) {
    if (bits_ == 0) throw Error(ErrorCode::WrongLength, "radical code length must be positive");
    if (codes_.size() != symbols_.size() * bits_) {
        throw Error(ErrorCode::WrongLength, "code matrix size does not match " +
                                                std::to_string(symbols_.size()) + " x " + std::to_string(bits_));
    }
    std::unordered_map<std::string, std::size_t> by_code;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        auto c = code(i);
        if (std::all_of(c.begin(), c.end(), [](Trit v) { return v == 0; })) {
            throw Error(ErrorCode::ZeroVector, "radical " + symbols_[i].symbol + " has an all-zero code");
        }
        if (std::any_of(c.begin(), c.end(), [](Trit v) { return v != 1 && v != -1; })) {
            throw Error(ErrorCode::BadFormat, "radical " + symbols_[i].symbol + " has a non-binary code");
        }
        if (!index_.emplace(symbols_[i].symbol, i).second) {
            throw Error(ErrorCode::DuplicateRadical, "radical " + symbols_[i].symbol + " listed twice");
        }
        auto [it, fresh] = by_code.emplace(row_key(c), i);
        if (!fresh) {
            throw Error(ErrorCode::DuplicateCode, "radicals " + symbols_[it->second].symbol + " and " +
                                                      symbols_[i].symbol + " share a code");
        }
    }
}

std::optional<std::size_t> RadicalCodeSet::find(const RadicalId& id) const {
    auto it = index_.find(id.symbol);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t RadicalCodeSet::min_hamming_distance() const {
    std::size_t best = bits_;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) best = std::min(best, hamming(code(i), code(j)));
    }
    return best;
}

RadicalCodeSet gen_radical_codes(std::vector<RadicalId> radicals, std::size_t bits, std::uint64_t seed,
                                 std::size_t min_hamming) {
    std::sort(radicals.begin(), radicals.end());
    radicals.erase(std::unique(radicals.begin(), radicals.end()), radicals.end());
    if (bits == 0) throw Error(ErrorCode::WrongLength, "radical code length must be positive");
    if (bits < 64 && radicals.size() > (std::uint64_t{1} << bits)) {
        throw Error(ErrorCode::CapacityExceeded, std::to_string(radicals.size()) + " radicals exceed 2^" +
                                                     std::to_string(bits) + " distinct codes");
    }
    const std::size_t required = std::max<std::size_t>(min_hamming, 1);
    const std::size_t max_rejections = 10 * std::max<std::size_t>(radicals.size(), 1);

    std::mt19937_64 rng(seed);
    std::vector<Trit> codes(radicals.size() * bits);
    std::vector<std::vector<std::uint64_t>> packed;
    packed.reserve(radicals.size());
    std::vector<Trit> candidate(bits);
    for (std::size_t i = 0; i < radicals.size(); ++i) {
        std::size_t rejections = 0;
        for (;;) {
            draw_signs(rng, candidate);
            auto words = pack_signs(candidate);
            const bool ok = std::all_of(packed.begin(), packed.end(), [&](const auto& other) {
                std::size_t d = 0;
                for (std::size_t w = 0; w < words.size(); ++w) d += std::popcount(words[w] ^ other[w]);
                return d >= required;
            });
            if (ok) {
                std::copy(candidate.begin(), candidate.end(), codes.begin() + i * bits);
                packed.push_back(std::move(words));
                break;
            }
            if (++rejections >= max_rejections) {
                throw Error(ErrorCode::CapacityExceeded,
                            "no code at Hamming distance >= " + std::to_string(required) + " after " +
                                std::to_string(rejections) + " draws for radical " + radicals[i].symbol);
            }
        }
    }
    CodeProvenance prov{CodeProvenance::Kind::Generated, seed, required, {}};
    return RadicalCodeSet(bits, std::move(radicals), std::move(codes), std::move(prov));
}

RadicalCodeSet parse_prototype_codes(std::string_view content, std::size_t bits, std::string_view source_name) {
    std::vector<RadicalId> symbols;
    std::vector<Trit> codes;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        const std::size_t eol = std::min(content.find('\n', pos), content.size());
        std::string_view line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0) {
            throw Error(ErrorCode::BadFormat, where + ": expected <radical>\\t<code>");
        }
        std::string_view spelled = line.substr(tab + 1);
        if (spelled.size() != bits) {
            throw Error(ErrorCode::WrongLength, where + ": code has " + std::to_string(spelled.size()) +
                                                    " symbols, expected L_R=" + std::to_string(bits));
        }
        if (spelled.find_first_not_of('0') == std::string_view::npos) {
            throw Error(ErrorCode::ZeroVector, where + ": all-zero code is reserved for padding");
        }
        for (char c : spelled) {
            if (c == '+') {
                codes.push_back(1);
            } else if (c == '-') {
                codes.push_back(-1);
            } else {
                throw Error(ErrorCode::BadFormat, where + ": code symbols must be '+' or '-'");
            }
        }
        symbols.push_back(RadicalId{std::string(line.substr(0, tab))});
    }
    std::size_t min_distance = bits;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        for (std::size_t j = i + 1; j < symbols.size(); ++j) {
            min_distance = std::min(min_distance, hamming(std::span<const Trit>(codes).subspan(i * bits, bits),
                                                          std::span<const Trit>(codes).subspan(j * bits, bits)));
        }
    }
    CodeProvenance prov{CodeProvenance::Kind::PrototypeFile, 0, min_distance, std::string(source_name)};
    try {
        return RadicalCodeSet(bits, std::move(symbols), std::move(codes), std::move(prov));
    } catch (const Error& e) {
        throw Error(e.code(), std::string(source_name) + ": " + e.detail());
    }
}

RadicalCodeSet load_prototype_codes(const std::filesystem::path& path, std::size_t bits) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_prototype_codes(buf.str(), bits, path.string());
}

// ---------------------------------------------------------------------------
// Encoding

std::vector<Trit> encode_char(const DecompTree& tree, const StructCodeTable& structs,
                              const RadicalCodeSet& radicals, const CodeParams& params) {
    if (structs.bits() != params.struct_bits) {
        throw Error(ErrorCode::WrongLength, "structure table width differs from L_S");
    }
    if (radicals.bits() != params.radical_bits) {
        throw Error(ErrorCode::WrongLength, "radical code width " + std::to_string(radicals.bits()) +
                                                " differs from L_R=" + std::to_string(params.radical_bits));
    }
    const FullTreeSlots slots = embed_full_tree(tree, params);
    const auto structure = structure_slots(slots);
    const auto sequence = radical_sequence(slots, params);

    std::vector<Trit> code(params.code_length(), 0);
    auto out = code.begin();
    for (const auto& slot : structure) {
        if (slot) std::copy_n(structs.code(*slot).begin(), params.struct_bits, out);
        out += static_cast<std::ptrdiff_t>(params.struct_bits);
    }
    for (const auto& id : sequence) {
        auto idx = radicals.find(id);
        if (!idx) throw Error(ErrorCode::UnknownRadical, "radical " + id.symbol + " has no code");
        std::copy_n(radicals.code(*idx).begin(), params.radical_bits, out);
        out += static_cast<std::ptrdiff_t>(params.radical_bits);
    }
    return code;
}

// ---------------------------------------------------------------------------
// Codebook

Codebook::Codebook(const CodeParams& params, RadicalCodeSet radicals)
    : params_(params), structs_(params.struct_bits), radicals_(std::move(radicals)) {}

Codebook Codebook::assemble(const CodeParams& params, std::vector<CodebookEntry> entries,
                            RadicalCodeSet radicals, std::optional<std::vector<Trit>> blank_row,
                            std::uint64_t seed) {
    params.check();
    Codebook cb(params, std::move(radicals));
    cb.seed_ = seed;
    const std::size_t t = params.code_length();
    cb.labels_.reserve(entries.size());
    cb.trees_.reserve(entries.size());
    cb.matrix_.reserve(entries.size() * t);
    cb.weights_.reserve(entries.size());

    std::unordered_map<std::string, std::size_t> by_row;
    by_row.reserve(entries.size());
    for (auto& entry : entries) {
        const std::size_t i = cb.labels_.size();
        if (!cb.label_index_.emplace(entry.character, i).second) {
            throw Error(ErrorCode::DuplicateCharacter, "character " + entry.character + " appears twice");
        }
        for (const auto& v : validate(entry.tree, params)) {
            const ErrorCode code =
                std::holds_alternative<DepthExceeded>(v) ? ErrorCode::TreeTooDeep : ErrorCode::RadicalOverflow;
            throw Error(code, "character " + entry.character + ": " + describe(v));
        }
        std::vector<Trit> row;
        try {
            row = encode_char(entry.tree, cb.structs_, cb.radicals_, params);
        } catch (const Error& e) {
            throw Error(e.code(), "character " + entry.character + ": " + e.detail());
        }
        auto [it, fresh] = by_row.emplace(row_key(row), i);
        if (!fresh) {
            throw Error(ErrorCode::CodeCollision, "characters " + cb.labels_[it->second] + " and " +
                                                      entry.character + " have identical decompositions");
        }
        cb.weights_.push_back(static_cast<std::size_t>(
            std::count_if(row.begin(), row.end(), [](Trit v) { return v != 0; })));
        cb.matrix_.insert(cb.matrix_.end(), row.begin(), row.end());
        cb.labels_.push_back(std::move(entry.character));
        cb.trees_.push_back(std::move(entry.tree));
    }

    if (!blank_row) blank_row = gen_blank_row(params, cb.matrix_, seed);
    if (blank_row->size() != t) {
        throw Error(ErrorCode::WrongLength, "blank row has length " + std::to_string(blank_row->size()) +
                                                ", expected t=" + std::to_string(t));
    }
    if (std::any_of(blank_row->begin(), blank_row->end(), [](Trit v) { return v != 1 && v != -1; })) {
        throw Error(ErrorCode::BadFormat, "blank row must be ±1");
    }
    if (auto it = by_row.find(row_key(*blank_row)); it != by_row.end()) {
        throw Error(ErrorCode::CodeCollision, "blank row equals the code of " + cb.labels_[it->second]);
    }
    cb.blank_row_ = std::move(*blank_row);
    return cb;
}

std::optional<std::size_t> Codebook::index_of(std::string_view label) const {
    auto it = label_index_.find(std::string(label));
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<Trit> Codebook::encode(const DecompTree& tree) const {
    return encode_char(tree, structs_, radicals_, params_);
}

std::vector<Trit> gen_blank_row(const CodeParams& params, std::span<const Trit> matrix, std::uint64_t seed) {
    const std::size_t t = params.code_length();
    std::mt19937_64 rng(seed ^ kBlankStreamSalt);
    std::vector<Trit> row(t);
    const std::size_t n = t == 0 ? 0 : matrix.size() / t;
    for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
        draw_signs(rng, row);
        bool clash = false;
        for (std::size_t i = 0; i < n && !clash; ++i) {
            clash = std::equal(row.begin(), row.end(), matrix.begin() + static_cast<std::ptrdiff_t>(i * t));
        }
        if (!clash) return row;
    }
    throw Error(ErrorCode::CapacityExceeded, "could not draw a blank row distinct from every character row");
}

Codebook build_codebook(std::vector<CodebookEntry> entries, RadicalCodeSet radicals, const CodeParams& params,
                        std::uint64_t seed) {
    return Codebook::assemble(params, std::move(entries), std::move(radicals), std::nullopt, seed);
}

Codebook build_codebook(std::vector<CodebookEntry> entries, const CodeParams& params, std::uint64_t seed,
                        std::size_t min_hamming) {
    std::set<RadicalId> used;
    for (const auto& e : entries) {
        for (auto& leaf : e.tree.leaves()) used.insert(std::move(leaf));
    }
    auto radicals = gen_radical_codes({used.begin(), used.end()}, params.radical_bits, seed, min_hamming);
    return build_codebook(std::move(entries), std::move(radicals), params, seed);
}

// ---------------------------------------------------------------------------
// Compression arithmetic

CompressionStats compression_stats(std::size_t code_length, std::size_t feature_dim, std::size_t one_hot_classes,
                                   bool bias) {
    if (feature_dim == 0 || one_hot_classes == 0) {
        throw Error(ErrorCode::InvalidParams, "feature_dim and one_hot_classes must be positive");
    }
    CompressionStats s;
    s.feature_dim = feature_dim;
    s.one_hot_classes = one_hot_classes;
    s.code_length = code_length;
    s.bias = bias;
    const std::size_t fan_in = feature_dim + (bias ? 1 : 0);
    s.cls_params_onehot = fan_in * one_hot_classes;
    s.cls_params_multihot = fan_in * code_length;
    s.ratio = 1.0 - static_cast<double>(s.cls_params_multihot) / static_cast<double>(s.cls_params_onehot);
    return s;
}

CompressionStats compression_stats(const Codebook& codebook, std::size_t feature_dim, std::size_t one_hot_classes,
                                   bool bias) {
    return compression_stats(codebook.code_length(), feature_dim, one_hot_classes, bias);
}

double classes_for_ratio(std::size_t code_length, double ratio) {
    if (!(ratio < 1.0)) throw Error(ErrorCode::InvalidParams, "ratio must be below 1");
    return static_cast<double>(code_length) / (1.0 - ratio);
}

}  // namespace hiercode
