#pragma once

#include <cstddef>
#include <string>

namespace hiercode {

/// Hyper-parameters of a HierCode layout.
///
/// depth is the full-tree depth D, struct_bits L_S, radical_bits L_R and
/// max_radicals M. The code length t is derived, never stored separately.
struct CodeParams {
    std::size_t depth = 5;
    std::size_t struct_bits = 4;
    std::size_t radical_bits = 36;
    std::size_t max_radicals = 9;

    static constexpr std::size_t kMinDepth = 2;
    static constexpr std::size_t kMaxDepth = 8;

    /// Checks D in [2, 8], L_S >= 1, L_R >= 1, 1 <= M <= 2^(D-1).
    /// Throws Error(InvalidParams).
    void check() const;

    /// Number of structure slots, 2^(D-1) - 1.
    std::size_t structure_slot_count() const noexcept { return (std::size_t{1} << (depth - 1)) - 1; }
    /// Number of full-tree slots, 2^D - 1.
    std::size_t full_slot_count() const noexcept { return (std::size_t{1} << depth) - 1; }
    std::size_t structural_length() const noexcept { return structure_slot_count() * struct_bits; }
    std::size_t radical_length() const noexcept { return max_radicals * radical_bits; }
    /// t = (2^(D-1) - 1) * L_S + M * L_R
    std::size_t code_length() const noexcept { return structural_length() + radical_length(); }

    std::string describe() const;

    friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

}  // namespace hiercode
