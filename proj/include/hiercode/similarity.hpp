#pragma once

#include "hiercode/codebook.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hiercode {

/// W frames of length t, stored frame-major: frame j occupies
/// data[j*t, (j+1)*t).
class Frames {
public:
    Frames() = default;
    Frames(std::size_t length, std::size_t count) : length_(length), count_(count), data_(length * count, 0.0) {}
    Frames(std::size_t length, std::vector<double> data);

    std::size_t length() const noexcept { return length_; }
    std::size_t count() const noexcept { return count_; }
    std::span<double> frame(std::size_t j) { return {data_.data() + j * length_, length_}; }
    std::span<const double> frame(std::size_t j) const { return {data_.data() + j * length_, length_}; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    void push_back(std::span<const double> frame);
    template <typename T>
    void push_back(std::span<const T> frame) {
        std::vector<double> tmp(frame.begin(), frame.end());
        push_back(std::span<const double>(tmp));
    }

private:
    std::size_t length_ = 0;
    std::size_t count_ = 0;
    std::vector<double> data_;
};

enum class BinarizeMode {
    Hard,  // sign, with sign(0) = +1
    Soft,  // tanh
};

/// Throws NonFinite on NaN or infinite input.
std::vector<double> binarize(std::span<const double> values, BinarizeMode mode);
Frames binarize(const Frames& frames, BinarizeMode mode);

/// (N+1) x W scores; row N is the blank row. Row-major.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Dense single-threaded reference: every (row, frame) inner product with a
/// plain left-to-right sum.
SimilarityMatrix score_serial(const Codebook& codebook, const Frames& frames);

/// Same result as score_serial, skipping all-zero code blocks and spreading
/// (row, frame) pairs over OpenMP threads. Bit-identical to the reference
/// because zero blocks contribute exact zeros.
SimilarityMatrix score(const Codebook& codebook, const Frames& frames);

/// Exact integer scores of a ternary frame against the N label rows and the
/// blank row (last entry).
std::vector<std::int64_t> score_exact(const Codebook& codebook, std::span<const Trit> frame);

struct Decoded {
    std::size_t index = 0;
    double score = 0.0;
};

/// Ranking used everywhere a character is chosen: higher score first; among
/// equal scores the row with fewer nonzero trits (the row nearest to the
/// frame in Euclidean distance), then the lower index.
bool ranks_before(const Codebook& codebook, const Decoded& a, const Decoded& b);

/// Argmax over label rows; the blank row never wins a character decode.
/// Throws DimensionMismatch.
Decoded decode_frame(const Codebook& codebook, std::span<const double> frame);
Decoded decode_frame(const Codebook& codebook, std::span<const Trit> frame);

/// Best k label rows, ranked by ranks_before.
std::vector<Decoded> topk(const Codebook& codebook, std::span<const double> frame, std::size_t k);

/// Decodes every frame; frames are processed in parallel.
std::vector<Decoded> decode_frames(const Codebook& codebook, const Frames& frames);

/// Decode margin of row i: its self-score minus the best score any other
/// row reaches on row i's own code. Rows j scoring exactly the self-score
/// (codes that extend row i with extra blocks) are counted as ties; the
/// ranking rule resolves them in favour of row i.
struct DecodeMargins {
    std::vector<std::int64_t> strict_gap;  // per row, over rows scoring strictly less; -1 if none
    std::int64_t min_gap = 0;              // min over rows, ties included (0 when any tie exists)
    std::int64_t min_strict_gap = -1;      // min over rows of strict_gap, -1 if undefined
    std::size_t tied_pairs = 0;            // ordered pairs (i, j) with equal scores on row i
};

DecodeMargins decode_margins(const Codebook& codebook);

}  // namespace hiercode
