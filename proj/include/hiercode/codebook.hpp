#pragma once

#include "hiercode/ids.hpp"
#include "hiercode/params.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hiercode {

/// One code position: -1, 0 or +1. Zero only ever appears in blank blocks.
using Trit = std::int8_t;

/// Manually fixed ±1 codes for the ten structures.
///
/// Structure k gets the struct_bits-wide binary expansion of k+1, most
/// significant bit first, with 0 -> -1 and 1 -> +1. Using k+1 keeps every
/// entry away from the all-(-1) pattern as well as from the all-zero blank.
class StructCodeTable {
public:
    /// Throws ParamsTooSmall when 2^struct_bits < 11.
    explicit StructCodeTable(std::size_t struct_bits);

    std::size_t bits() const noexcept { return bits_; }
    std::span<const Trit> code(StructureOp op) const {
        return {codes_.data() + index_of(op) * bits_, bits_};
    }

private:
    std::size_t bits_;
    std::vector<Trit> codes_;
};

StructCodeTable build_struct_table(const CodeParams& params);

struct CodeProvenance {
    enum class Kind : std::uint8_t { Generated = 0, PrototypeFile = 1 };
    Kind kind = Kind::Generated;
    std::uint64_t seed = 0;
    std::size_t min_hamming = 1;
    std::string source;  // prototype file path, empty when generated

    friend bool operator==(const CodeProvenance&, const CodeProvenance&) = default;
};

/// ±1 radical codes, one per radical, pairwise distinct.
class RadicalCodeSet {
public:
    RadicalCodeSet() = default;

    /// Validates lengths, alphabet and pairwise distinctness. Throws
    /// DuplicateRadical, DuplicateCode, WrongLength or ZeroVector.
    RadicalCodeSet(std::size_t bits, std::vector<RadicalId> symbols, std::vector<Trit> codes,
                   CodeProvenance provenance);

    std::size_t bits() const noexcept { return bits_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    const RadicalId& symbol(std::size_t i) const { return symbols_[i]; }
    const std::vector<RadicalId>& symbols() const noexcept { return symbols_; }
    std::span<const Trit> code(std::size_t i) const { return {codes_.data() + i * bits_, bits_}; }
    std::optional<std::size_t> find(const RadicalId& id) const;
    const CodeProvenance& provenance() const noexcept { return provenance_; }

    /// Smallest pairwise Hamming distance; bits() for sets of size < 2.
    std::size_t min_hamming_distance() const;

    friend bool operator==(const RadicalCodeSet& a, const RadicalCodeSet& b) {
        return a.bits_ == b.bits_ && a.symbols_ == b.symbols_ && a.codes_ == b.codes_ &&
               a.provenance_ == b.provenance_;
    }

private:
    std::size_t bits_ = 0;
    std::vector<RadicalId> symbols_;
    std::vector<Trit> codes_;
    std::unordered_map<std::string, std::size_t> index_;
    CodeProvenance provenance_;
};

/// Seeded uniform ±1 codes with rejection until every pair is at Hamming
/// distance >= max(min_hamming, 1). Radicals are deduplicated and sorted
/// first so the assignment does not depend on input order. Throws
/// CapacityExceeded when 10*|radicals| consecutive draws are rejected or
/// when |radicals| > 2^bits.
RadicalCodeSet gen_radical_codes(std::vector<RadicalId> radicals, std::size_t bits, std::uint64_t seed,
                                 std::size_t min_hamming = 1);

/// Reads `<radical>\t<code>` lines, code spelled with '+' and '-'.
RadicalCodeSet load_prototype_codes(const std::filesystem::path& path, std::size_t bits);
RadicalCodeSet parse_prototype_codes(std::string_view content, std::size_t bits,
                                     std::string_view source_name);

/// Structural blocks from the breadth-first structure slots, then radical
/// blocks in breadth-first order right-padded with zero blocks to M.
/// Throws UnknownRadical, TreeTooDeep or RadicalOverflow.
std::vector<Trit> encode_char(const DecompTree& tree, const StructCodeTable& structs,
                              const RadicalCodeSet& radicals, const CodeParams& params);

struct CodebookEntry {
    std::string character;
    DecompTree tree;
};

/// The N x t code matrix plus a reserved ±1 blank row for CTC.
class Codebook {
public:
    /// Encodes every entry and checks that characters and rows are unique.
    /// A given blank_row must be ±1, length t and distinct from all rows;
    /// without one, gen_blank_row draws it from seed.
    static Codebook assemble(const CodeParams& params, std::vector<CodebookEntry> entries,
                             RadicalCodeSet radicals, std::optional<std::vector<Trit>> blank_row,
                             std::uint64_t seed);

    const CodeParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t code_length() const noexcept { return params_.code_length(); }

    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const DecompTree& tree(std::size_t i) const { return trees_[i]; }
    std::optional<std::size_t> index_of(std::string_view label) const;

    std::span<const Trit> row(std::size_t i) const {
        return {matrix_.data() + i * code_length(), code_length()};
    }
    /// Row-major N x t.
    std::span<const Trit> matrix() const noexcept { return matrix_; }
    std::span<const Trit> blank_row() const noexcept { return blank_row_; }
    /// Number of nonzero trits in row i; equals row i's self-similarity.
    std::size_t row_weight(std::size_t i) const { return weights_[i]; }

    const RadicalCodeSet& radicals() const noexcept { return radicals_; }
    const StructCodeTable& structures() const noexcept { return structs_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Encodes a tree that need not be in the codebook (zero-shot lookup).
    std::vector<Trit> encode(const DecompTree& tree) const;

    friend bool operator==(const Codebook& a, const Codebook& b) {
        return a.params_ == b.params_ && a.labels_ == b.labels_ && a.trees_ == b.trees_ &&
               a.radicals_ == b.radicals_ && a.matrix_ == b.matrix_ && a.blank_row_ == b.blank_row_ &&
               a.seed_ == b.seed_;
    }

private:
    Codebook(const CodeParams& params, RadicalCodeSet radicals);

    CodeParams params_;
    StructCodeTable structs_;
    RadicalCodeSet radicals_;
    std::vector<std::string> labels_;
    std::vector<DecompTree> trees_;
    std::vector<Trit> matrix_;
    std::vector<std::size_t> weights_;
    std::vector<Trit> blank_row_;
    std::unordered_map<std::string, std::size_t> label_index_;
    std::uint64_t seed_ = 0;
};

/// Seeded ±1 row of length t, redrawn until distinct from every row.
std::vector<Trit> gen_blank_row(const CodeParams& params, std::span<const Trit> matrix, std::uint64_t seed);

/// Builds a codebook from explicit radical codes.
Codebook build_codebook(std::vector<CodebookEntry> entries, RadicalCodeSet radicals, const CodeParams& params,
                        std::uint64_t seed);

/// Builds a codebook with seeded random radical codes over every radical the
/// entries use.
Codebook build_codebook(std::vector<CodebookEntry> entries, const CodeParams& params, std::uint64_t seed,
                        std::size_t min_hamming = 1);

struct CompressionStats {
    std::size_t feature_dim = 0;
    std::size_t one_hot_classes = 0;
    std::size_t code_length = 0;
    bool bias = false;
    std::size_t cls_params_onehot = 0;
    std::size_t cls_params_multihot = 0;
    double ratio = 0.0;
};

/// Parameter count of the classification layer for one-hot vs. multi-hot
/// outputs; ratio = 1 - multihot/onehot.
CompressionStats compression_stats(std::size_t code_length, std::size_t feature_dim,
                                   std::size_t one_hot_classes, bool bias = false);
CompressionStats compression_stats(const Codebook& codebook, std::size_t feature_dim,
                                   std::size_t one_hot_classes, bool bias = false);

/// Class count N for which 1 - t/N equals the requested ratio.
double classes_for_ratio(std::size_t code_length, double ratio);

}  // namespace hiercode
