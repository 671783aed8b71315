#pragma once

#include "hiercode/codebook.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace hiercode {

/// Codebook container, little-endian throughout:
///
///   "HCBK" | version u8 | flags u8 | reserved u16
///   D, L_S, L_R, M, t, N : u32 | seed u64 | min_hamming u32
///   radical-code provenance: kind u8 | source (u32 length + UTF-8) | seed u64
///   N labels             (u32 length + UTF-8)
///   N decompositions     (u32 length + IDS UTF-8)        flags bit 0
///   radical table        u32 count, then per radical:     flags bit 1
///                        u32 length + UTF-8 symbol, packed L_R trits
///   N rows of packed t trits, then the blank row
///   FNV-1a 64 checksum of every preceding byte
///
/// Trits pack four to a byte, lowest bits first: 00 = 0, 01 = +1, 10 = -1.
/// Padding bits are zero; pattern 11 is invalid.
inline constexpr std::uint8_t kCodebookFormatVersion = 1;

std::vector<std::uint8_t> serialize(const Codebook& codebook);

/// Throws VersionMismatch for any other version byte and Corrupt for a bad
/// magic, truncation, checksum failure or rows that do not re-derive from
/// the stored decompositions.
Codebook deserialize(std::span<const std::uint8_t> bytes);

void save_codebook(const Codebook& codebook, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> pack_trits(std::span<const Trit> trits);
/// Throws Corrupt on pattern 11 or nonzero padding.
std::vector<Trit> unpack_trits(std::span<const std::uint8_t> packed, std::size_t count);

}  // namespace hiercode
