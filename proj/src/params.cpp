#include "hiercode/params.hpp"

#include "hiercode/error.hpp"

#include <sstream>

namespace hiercode {

void CodeParams::check() const {
    if (depth < kMinDepth || depth > kMaxDepth) {
        throw Error(ErrorCode::InvalidParams,
                    "depth D=" + std::to_string(depth) + " outside [2, 8]");
    }
    if (struct_bits == 0) throw Error(ErrorCode::InvalidParams, "L_S must be positive");
    if (radical_bits == 0) throw Error(ErrorCode::InvalidParams, "L_R must be positive");
    const std::size_t leaves = std::size_t{1} << (depth - 1);
    if (max_radicals == 0 || max_radicals > leaves) {
        throw Error(ErrorCode::InvalidParams,
                    "M=" + std::to_string(max_radicals) + " must lie in [1, 2^(D-1)=" +
                        std::to_string(leaves) + "]");
    }
}

std::string CodeParams::describe() const {
    std::ostringstream os;
    os << "D=" << depth << " L_S=" << struct_bits << " L_R=" << radical_bits
       << " M=" << max_radicals << " t=" << code_length();
    return os.str();
}

}  // namespace hiercode
