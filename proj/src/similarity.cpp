#include "hiercode/similarity.hpp"

#include "hiercode/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hiercode {

namespace {

void check_length(const Codebook& cb, std::size_t length) {
    if (length != cb.code_length()) {
        throw Error(ErrorCode::DimensionMismatch, "frame length " + std::to_string(length) +
                                                      " does not match codebook t=" +
                                                      std::to_string(cb.code_length()));
    }
}

template <typename T>
double dense_dot(std::span<const Trit> code, std::span<const T> frame) {
    double sum = 0.0;
    for (std::size_t p = 0; p < code.size(); ++p) sum += static_cast<double>(code[p]) * static_cast<double>(frame[p]);
    return sum;
}

std::int64_t int_dot(std::span<const Trit> a, std::span<const Trit> b) {
    std::int32_t sum = 0;
    for (std::size_t p = 0; p < a.size(); ++p) sum += static_cast<std::int32_t>(a[p]) * b[p];
    return sum;
}

struct Block {
    std::uint32_t offset;
    std::uint32_t length;
};

// Nonzero blocks of each code row, in layout order. The blank row is
// entirely nonzero and is kept as one block.
struct SparseRows {
    std::vector<Block> blocks;
    std::vector<std::size_t> first;  // first[i]..first[i+1] are row i's blocks

    explicit SparseRows(const Codebook& cb) {
        const CodeParams& p = cb.params();
        const std::size_t t = cb.code_length();
        first.reserve(cb.size() + 2);
        for (std::size_t i = 0; i < cb.size(); ++i) {
            first.push_back(blocks.size());
            auto row = cb.row(i);
            auto add = [&](std::size_t offset, std::size_t length) {
                for (std::size_t q = offset; q < offset + length; ++q) {
                    if (row[q] != 0) {
                        blocks.push_back({static_cast<std::uint32_t>(offset), static_cast<std::uint32_t>(length)});
                        return;
                    }
                }
            };
            for (std::size_t s = 0; s < p.structure_slot_count(); ++s) add(s * p.struct_bits, p.struct_bits);
            for (std::size_t m = 0; m < p.max_radicals; ++m) {
                add(p.structural_length() + m * p.radical_bits, p.radical_bits);
            }
        }
        first.push_back(blocks.size());
        blocks.push_back({0, static_cast<std::uint32_t>(t)});
        first.push_back(blocks.size());
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Frames

Frames::Frames(std::size_t length, std::vector<double> data) : length_(length), data_(std::move(data)) {
    if (length_ == 0 || data_.size() % length_ != 0) {
        throw Error(ErrorCode::DimensionMismatch, "frame data size is not a multiple of t=" + std::to_string(length_));
    }
    count_ = data_.size() / length_;
}

void Frames::push_back(std::span<const double> frame) {
    if (count_ == 0 && length_ == 0) length_ = frame.size();
    if (frame.size() != length_) {
        throw Error(ErrorCode::DimensionMismatch, "frame length " + std::to_string(frame.size()) +
                                                      " differs from " + std::to_string(length_));
    }
    data_.insert(data_.end(), frame.begin(), frame.end());
    ++count_;
}

// ---------------------------------------------------------------------------
// Binarization

std::vector<double> binarize(std::span<const double> values, BinarizeMode mode) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "value at position " + std::to_string(i));
        out[i] = mode == BinarizeMode::Hard ? (v >= 0.0 ? 1.0 : -1.0) : std::tanh(v);
    }
    return out;
}

Frames binarize(const Frames& frames, BinarizeMode mode) {
    return Frames(frames.length(), binarize(frames.data(), mode));
}

// ---------------------------------------------------------------------------
// Scoring

SimilarityMatrix score_serial(const Codebook& cb, const Frames& frames) {
    check_length(cb, frames.length());
    const std::size_t n = cb.size();
    SimilarityMatrix out(n + 1, frames.count());
    for (std::size_t i = 0; i <= n; ++i) {
        auto code = i < n ? cb.row(i) : cb.blank_row();
        for (std::size_t j = 0; j < frames.count(); ++j) out.at(i, j) = dense_dot(code, frames.frame(j));
    }
    return out;
}

SimilarityMatrix score(const Codebook& cb, const Frames& frames) {
    check_length(cb, frames.length());
    const SparseRows sparse(cb);
    const std::size_t rows = cb.size() + 1;
    const std::size_t cols = frames.count();
    SimilarityMatrix out(rows, cols);
    const auto n = static_cast<std::int64_t>(rows);
    const auto w = static_cast<std::int64_t>(cols);
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < w; ++j) {
            const auto row = static_cast<std::size_t>(i);
            auto code = row < cb.size() ? cb.row(row) : cb.blank_row();
            auto frame = frames.frame(static_cast<std::size_t>(j));
            double sum = 0.0;
            for (std::size_t b = sparse.first[row]; b < sparse.first[row + 1]; ++b) {
                const Block blk = sparse.blocks[b];
                for (std::size_t q = blk.offset; q < blk.offset + blk.length; ++q) {
                    sum += static_cast<double>(code[q]) * frame[q];
                }
            }
            out.at(row, static_cast<std::size_t>(j)) = sum;
        }
    }
    return out;
}

std::vector<std::int64_t> score_exact(const Codebook& cb, std::span<const Trit> frame) {
    check_length(cb, frame.size());
    std::vector<std::int64_t> out(cb.size() + 1);
    for (std::size_t i = 0; i < cb.size(); ++i) out[i] = int_dot(cb.row(i), frame);
    out[cb.size()] = int_dot(cb.blank_row(), frame);
    return out;
}

// ---------------------------------------------------------------------------
// Decoding

bool ranks_before(const Codebook& cb, const Decoded& a, const Decoded& b) {
    if (a.score != b.score) return a.score > b.score;
    const std::size_t wa = cb.row_weight(a.index);
    const std::size_t wb = cb.row_weight(b.index);
    if (wa != wb) return wa < wb;
    return a.index < b.index;
}

Decoded decode_frame(const Codebook& cb, std::span<const double> frame) {
    check_length(cb, frame.size());
    if (cb.size() == 0) throw Error(ErrorCode::BadLabel, "empty codebook");
    Decoded best{0, dense_dot(cb.row(0), frame)};
    for (std::size_t i = 1; i < cb.size(); ++i) {
        Decoded cand{i, dense_dot(cb.row(i), frame)};
        if (ranks_before(cb, cand, best)) best = cand;
    }
    return best;
}

Decoded decode_frame(const Codebook& cb, std::span<const Trit> frame) {
    check_length(cb, frame.size());
    if (cb.size() == 0) throw Error(ErrorCode::BadLabel, "empty codebook");
    Decoded best{0, static_cast<double>(int_dot(cb.row(0), frame))};
    for (std::size_t i = 1; i < cb.size(); ++i) {
        Decoded cand{i, static_cast<double>(int_dot(cb.row(i), frame))};
        if (ranks_before(cb, cand, best)) best = cand;
    }
    return best;
}

std::vector<Decoded> topk(const Codebook& cb, std::span<const double> frame, std::size_t k) {
    check_length(cb, frame.size());
    std::vector<Decoded> all(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) all[i] = {i, dense_dot(cb.row(i), frame)};
    k = std::min(k, all.size());
    auto cmp = [&](const Decoded& a, const Decoded& b) { return ranks_before(cb, a, b); };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), cmp);
    all.resize(k);
    return all;
}

std::vector<Decoded> decode_frames(const Codebook& cb, const Frames& frames) {
    check_length(cb, frames.length());
    std::vector<Decoded> out(frames.count());
    const auto w = static_cast<std::int64_t>(frames.count());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t j = 0; j < w; ++j) {
        out[static_cast<std::size_t>(j)] = decode_frame(cb, frames.frame(static_cast<std::size_t>(j)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Margins

DecodeMargins decode_margins(const Codebook& cb) {
    const std::size_t n = cb.size();
    DecodeMargins m;
    m.strict_gap.assign(n, -1);
    std::vector<std::size_t> ties(n, 0);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto self = cb.row(i);
        const auto self_score = static_cast<std::int64_t>(cb.row_weight(i));
        std::int64_t best_other = std::numeric_limits<std::int64_t>::min();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const std::int64_t s = int_dot(cb.row(j), self);
            if (s == self_score) {
                ++ties[i];
            } else if (s > best_other) {
                best_other = s;
            }
        }
        if (best_other != std::numeric_limits<std::int64_t>::min()) m.strict_gap[i] = self_score - best_other;
    }
    for (std::size_t i = 0; i < n; ++i) {
        m.tied_pairs += ties[i];
        if (m.strict_gap[i] >= 0 && (m.min_strict_gap < 0 || m.strict_gap[i] < m.min_strict_gap)) {
            m.min_strict_gap = m.strict_gap[i];
        }
    }
    if (m.tied_pairs > 0) {
        m.min_gap = 0;
    } else {
        m.min_gap = m.min_strict_gap < 0 ? 0 : m.min_strict_gap;
    }
    return m;
}

}  // namespace hiercode
