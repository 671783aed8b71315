#pragma once

#include "hiercode/codebook.hpp"
#include "hiercode/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace hiercode {

/// Noise model standing in for a visual front-end. A clean frame is the
/// label's code; each nonzero trit has its sign flipped with probability
/// flip_rate, then Gaussian noise of std-dev noise_sigma is added to every
/// coordinate.
struct SynthConfig {
    double noise_sigma = 0.0;
    double flip_rate = 0.0;
    std::size_t frames_per_char = 1;
    double blank_prob = 0.0;  // chance of a blank frame between two characters
    std::uint64_t seed = 1;

    /// Throws InvalidParams.
    void check() const;
};

/// One noisy frame for a code row.
std::vector<double> noisy_frame(std::span<const Trit> code, const SynthConfig& config, std::mt19937_64& rng);

/// Frame for codebook row `label`, seeded from config.seed. Throws BadLabel.
std::vector<double> gen_char_sample(const Codebook& codebook, std::size_t label, const SynthConfig& config);

/// Seen = the first m labels in codebook order, unseen = the rest.
class ZeroShotSplit {
public:
    /// Throws InvalidParams unless 0 < m < N.
    ZeroShotSplit(const Codebook& codebook, std::size_t m);

    std::size_t m() const noexcept { return m_; }
    std::size_t total() const noexcept { return total_; }
    std::size_t seen_count() const noexcept { return m_; }
    std::size_t unseen_count() const noexcept { return total_ - m_; }
    bool is_seen(std::size_t label) const noexcept { return label < m_; }
    std::size_t unseen(std::size_t k) const noexcept { return m_ + k; }

private:
    std::size_t m_;
    std::size_t total_;
};

/// Split holding the first `fraction` of labels as seen.
ZeroShotSplit split_by_fraction(const Codebook& codebook, double fraction);

struct Confusion {
    std::size_t truth = 0;
    std::size_t predicted = 0;
    std::size_t count = 0;
};

struct CharEvalReport {
    std::size_t m = 0;
    std::size_t trials = 0;
    std::size_t correct = 0;
    std::size_t predicted_seen = 0;  // errors that landed on a seen label
    double accuracy = 0.0;
    std::vector<Confusion> top_confusions;  // most frequent first, at most 5
};

/// Draws `trials` samples cycling over the unseen labels and decodes each
/// against the full codebook.
CharEvalReport eval_zero_shot_char(const Codebook& codebook, const ZeroShotSplit& split, const SynthConfig& config,
                                   std::size_t trials);

/// Edit operations aligning a hypothesis to a reference.
struct EditCounts {
    std::size_t substitutions = 0;
    std::size_t deletions = 0;   // reference symbols missing from the hypothesis
    std::size_t insertions = 0;  // hypothesis symbols absent from the reference
    std::size_t distance() const noexcept { return substitutions + deletions + insertions; }
};

EditCounts edit_counts(std::span<const std::size_t> reference, std::span<const std::size_t> hypothesis);

/// Frames for a transcript: frames_per_char noisy frames per character,
/// a blank frame between characters with probability blank_prob and always
/// between equal neighbours.
Frames line_frames(const Codebook& codebook, std::span<const std::size_t> transcript, const SynthConfig& config,
                   std::mt19937_64& rng);

/// Correct rate CR = (Nt - De - Ds) / Nt and accuracy rate
/// AR = (Nt - De - Ds - Di) / Nt with Nt the reference length, following
/// the ICDAR 2013 Chinese handwriting competition definitions.
struct LineEvalReport {
    std::size_t m = 0;
    std::size_t trials = 0;
    std::size_t length = 0;
    std::size_t exact_matches = 0;
    double exact_rate = 0.0;
    std::size_t reference_chars = 0;
    EditCounts edits;
    double correct_rate = 0.0;
    double accuracy_rate = 0.0;
    double mean_normalized_distance = 0.0;
};

/// Transcripts of `length` labels drawn from the whole codebook with one
/// position forced to an unseen label; decoded by best_path_decode.
LineEvalReport eval_line_zero_shot(const Codebook& codebook, const ZeroShotSplit& split, const SynthConfig& config,
                                   std::size_t length, std::size_t trials, double temperature = 1.0);

struct CharsetConfig {
    std::size_t radical_count = 40;
    std::size_t count = 1000;
    std::size_t max_depth = 3;
    std::uint64_t seed = 1;
};

/// Radical symbol k of the synthetic charsets (CJK ideographs from U+4E00).
std::string synthetic_radical(std::size_t k);

/// Distinct random trees over radical_count radicals, ordered by leaf count,
/// then node count, then rendering. Characters are Supplementary Private
/// Use Area code points in that order. Throws InvalidParams when the tree
/// space is too small for count.
std::vector<CodebookEntry> synthetic_charset(const CharsetConfig& config);

/// Every tree of depth <= max_depth over the given radicals, labelled by its
/// rendering. Throws TooLarge above 5'000'000 trees.
std::vector<CodebookEntry> enumerate_trees(std::size_t max_depth, const std::vector<RadicalId>& radicals);

/// Number of trees enumerate_trees would produce.
std::size_t count_trees(std::size_t max_depth, std::size_t radical_count);

struct SweepPoint {
    CodeParams params;
    std::size_t min_hamming = 1;
};

struct SweepRow {
    SweepPoint point;
    std::size_t code_length = 0;
    std::size_t radical_min_hamming = 0;
    std::int64_t min_gap = 0;
    std::int64_t min_strict_gap = -1;
    std::size_t tied_pairs = 0;
    std::size_t trials = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    double std_error = 0.0;
};

/// Baseline (5, 4, 36, 9) and one-factor variations: L_R in {12, 24, 36},
/// L_S in {4, 8, 12}, D in {5, 6, 7}, without duplicates.
std::vector<SweepPoint> default_sweep_grid();

/// Builds one codebook per grid point over the same charset and seed and
/// measures character accuracy under config's noise, cycling over all
/// labels.
std::vector<SweepRow> ablation_sweep(const std::vector<CodebookEntry>& charset, const std::vector<SweepPoint>& grid,
                                     const SynthConfig& config, std::size_t trials);

/// True when two measured accuracies differ by no more than `z` combined
/// standard errors (with a floor of one trial's worth of accuracy).
bool within_monte_carlo_error(const SweepRow& a, const SweepRow& b, double z = 3.0);

}  // namespace hiercode
