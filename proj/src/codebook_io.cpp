#include "hiercode/codebook_io.hpp"

#include "hiercode/error.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

namespace hiercode {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'H', 'C', 'B', 'K'};
constexpr std::uint8_t kFlagDecompositions = 0x01;
constexpr std::uint8_t kFlagRadicalTable = 0x02;
constexpr std::uint8_t kKnownFlags = kFlagDecompositions | kFlagRadicalTable;

std::size_t packed_size(std::size_t trits) { return (trits + 3) / 4; }

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint64_t v) {
        if (v > 0xFFFFFFFFULL) throw Error(ErrorCode::TooLarge, "field exceeds 32 bits");
        le(v, 4);
    }
    void u64(std::uint64_t v) { le(v, 8); }
    void str(std::string_view s) {
        u32(s.size());
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    std::vector<std::uint8_t>& buffer() { return out_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    std::string str() {
        const std::uint32_t n = u32();
        auto b = take(n);
        return std::string(b.begin(), b.end());
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        if (n > in_.size() - pos_) throw Error(ErrorCode::Corrupt, "unexpected end of codebook data");
        auto out = in_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    bool at_end() const { return pos_ == in_.size(); }

private:
    std::uint64_t le(int n) {
        auto b = take(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{b[static_cast<std::size_t>(i)]} << (8 * i);
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::uint8_t> pack_trits(std::span<const Trit> trits) {
    std::vector<std::uint8_t> out(packed_size(trits.size()), 0);
    for (std::size_t i = 0; i < trits.size(); ++i) {
        std::uint8_t bits = 0;
        if (trits[i] > 0) bits = 0b01;
        else if (trits[i] < 0) bits = 0b10;
        out[i / 4] |= static_cast<std::uint8_t>(bits << (2 * (i % 4)));
    }
    return out;
}

std::vector<Trit> unpack_trits(std::span<const std::uint8_t> packed, std::size_t count) {
    if (packed.size() != packed_size(count)) throw Error(ErrorCode::Corrupt, "packed trit row has wrong size");
    std::vector<Trit> out(count);
    for (std::size_t i = 0; i < packed.size() * 4; ++i) {
        const unsigned bits = (packed[i / 4] >> (2 * (i % 4))) & 0b11U;
        if (i >= count) {
            if (bits != 0) throw Error(ErrorCode::Corrupt, "nonzero padding in packed trit row");
            continue;
        }
        switch (bits) {
            case 0b00: out[i] = 0; break;
            case 0b01: out[i] = 1; break;
            case 0b10: out[i] = -1; break;
            default: throw Error(ErrorCode::Corrupt, "invalid trit pattern 11");
        }
    }
    return out;
}

std::vector<std::uint8_t> serialize(const Codebook& cb) {
    const CodeParams& p = cb.params();
    const RadicalCodeSet& radicals = cb.radicals();
    Writer w;
    w.bytes(kMagic);
    w.u8(kCodebookFormatVersion);
    w.u8(kKnownFlags);
    w.u16(0);
    w.u32(p.depth);
    w.u32(p.struct_bits);
    w.u32(p.radical_bits);
    w.u32(p.max_radicals);
    w.u32(p.code_length());
    w.u32(cb.size());
    w.u64(cb.seed());
    w.u32(radicals.provenance().min_hamming);
    w.u8(static_cast<std::uint8_t>(radicals.provenance().kind));
    w.str(radicals.provenance().source);
    w.u64(radicals.provenance().seed);
    for (const auto& label : cb.labels()) w.str(label);
    for (std::size_t i = 0; i < cb.size(); ++i) w.str(render(cb.tree(i)));
    w.u32(radicals.size());
    for (std::size_t i = 0; i < radicals.size(); ++i) {
        w.str(radicals.symbol(i).symbol);
        w.bytes(pack_trits(radicals.code(i)));
    }
    for (std::size_t i = 0; i < cb.size(); ++i) w.bytes(pack_trits(cb.row(i)));
    w.bytes(pack_trits(cb.blank_row()));
    auto& buf = w.buffer();
    const std::uint64_t sum = fnv1a64(buf);
    w.u64(sum);
    return std::move(buf);
}

Codebook deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size() + 1) throw Error(ErrorCode::Corrupt, "codebook data truncated");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw Error(ErrorCode::Corrupt, "bad magic, not a codebook file");
    }
    if (bytes[4] != kCodebookFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, "format version " + std::to_string(bytes[4]) +
                                                    ", this build reads version " +
                                                    std::to_string(kCodebookFormatVersion));
    }
    if (bytes.size() < 8 + 8) throw Error(ErrorCode::Corrupt, "codebook data truncated");
    const auto body = bytes.first(bytes.size() - 8);
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) stored |= std::uint64_t{bytes[body.size() + static_cast<std::size_t>(i)]} << (8 * i);
    if (fnv1a64(body) != stored) throw Error(ErrorCode::Corrupt, "checksum mismatch");

    Reader r(body);
    r.take(kMagic.size());
    r.u8();
    const std::uint8_t flags = r.u8();
    if (flags != kKnownFlags) throw Error(ErrorCode::Corrupt, "unsupported flags " + std::to_string(flags));
    r.u16();
    CodeParams p;
    p.depth = r.u32();
    p.struct_bits = r.u32();
    p.radical_bits = r.u32();
    p.max_radicals = r.u32();
    const std::uint32_t t = r.u32();
    const std::uint32_t n = r.u32();
    const std::uint64_t seed = r.u64();
    CodeProvenance prov;
    prov.min_hamming = r.u32();
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw Error(ErrorCode::Corrupt, "unknown provenance kind");
    prov.kind = static_cast<CodeProvenance::Kind>(kind);
    prov.source = r.str();
    prov.seed = r.u64();
    try {
        p.check();
    } catch (const Error& e) {
        throw Error(ErrorCode::Corrupt, "header: " + e.detail());
    }
    if (t != p.code_length()) throw Error(ErrorCode::Corrupt, "header t does not match D, L_S, L_R, M");

    std::vector<std::string> labels(n);
    for (auto& label : labels) label = r.str();
    std::vector<CodebookEntry> entries;
    entries.reserve(n);
    try {
        for (std::uint32_t i = 0; i < n; ++i) entries.push_back(CodebookEntry{std::move(labels[i]), parse_ids(r.str())});
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Corrupt) throw;
        throw Error(ErrorCode::Corrupt, "stored decomposition: " + e.detail());
    }
    const std::uint32_t radical_count = r.u32();
    std::vector<RadicalId> symbols;
    std::vector<Trit> codes;
    for (std::uint32_t i = 0; i < radical_count; ++i) {
        symbols.push_back(RadicalId{r.str()});
        auto code = unpack_trits(r.take(packed_size(p.radical_bits)), p.radical_bits);
        codes.insert(codes.end(), code.begin(), code.end());
    }
    std::vector<Trit> rows;
    rows.reserve(std::size_t{n} * t);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto row = unpack_trits(r.take(packed_size(t)), t);
        rows.insert(rows.end(), row.begin(), row.end());
    }
    auto blank = unpack_trits(r.take(packed_size(t)), t);
    if (!r.at_end()) throw Error(ErrorCode::Corrupt, "trailing bytes after blank row");

    try {
        RadicalCodeSet set(p.radical_bits, std::move(symbols), std::move(codes), prov);
        Codebook cb = Codebook::assemble(p, std::move(entries), std::move(set), std::move(blank), seed);
        if (!std::equal(rows.begin(), rows.end(), cb.matrix().begin(), cb.matrix().end())) {
            throw Error(ErrorCode::Corrupt, "stored rows differ from rows derived from decompositions");
        }
        return cb;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Corrupt) throw;
        throw Error(ErrorCode::Corrupt, e.what());
    }
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& path) {
    const auto bytes = serialize(codebook);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return deserialize(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

}  // namespace hiercode
