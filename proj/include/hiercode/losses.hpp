#pragma once

#include "hiercode/codebook.hpp"
#include "hiercode/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hiercode {

/// Per-frame class distribution is softmax(score / temperature) over the N
/// label rows plus the blank row (class N). All arithmetic is float64 and
/// log-domain.
struct CtcResult {
    double loss = 0.0;  // -log p(label | frames), nats
    Frames grad;        // d loss / d frames, same layout as the input
};

/// Minimum frame count for a label: its length plus one separating blank per
/// adjacent repeated pair.
std::size_t ctc_min_frames(std::span<const std::size_t> label);

/// Throws InfeasibleLabel, NonFinite, BadLabel or DimensionMismatch.
CtcResult ctc_sim_loss(const Codebook& codebook, const Frames& frames, std::span<const std::size_t> label,
                       double temperature = 1.0);

/// Sums the probability of every per-frame class assignment that collapses
/// to the label. Limited to W <= 8 and N <= 6 (TooLarge otherwise).
double ctc_brute_force(const Codebook& codebook, const Frames& frames, std::span<const std::size_t> label,
                       double temperature = 1.0);

struct CeResult {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d frame
};

/// Cross-entropy of softmax(score / temperature) over label rows only; the
/// blank row does not take part. Throws BadLabel or DimensionMismatch.
CeResult ce_sim_loss(const Codebook& codebook, std::span<const double> frame, std::size_t label,
                     double temperature = 1.0);

/// Per-frame argmax over label rows and the blank row, then merge repeats
/// and drop blanks.
std::vector<std::size_t> best_path_decode(const Codebook& codebook, const Frames& frames, double temperature = 1.0);

/// Standard CTC collapse of a class path; blank is the class equal to `blank`.
std::vector<std::size_t> ctc_collapse(std::span<const std::size_t> path, std::size_t blank);

/// Central differences of f at x, one coordinate at a time.
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step);

/// |a - n| / max(1, |a|, |n|), maximised over coordinates.
double max_gradient_error(std::span<const double> analytic, std::span<const double> numeric);

struct CtcCheckConfig {
    std::size_t oracle_instances = 500;
    std::size_t gradient_instances = 100;
    std::uint64_t seed = 1;
    double oracle_tolerance = 1e-9;
    double gradient_tolerance = 1e-5;
    double step = 1e-4;
};

struct CtcCheckReport {
    std::size_t oracle_instances = 0;
    std::size_t oracle_failures = 0;
    double max_oracle_error = 0.0;
    std::size_t gradient_instances = 0;
    std::size_t gradient_failures = 0;
    double max_ctc_gradient_error = 0.0;
    double max_ce_gradient_error = 0.0;

    bool passed() const noexcept { return oracle_failures == 0 && gradient_failures == 0; }
};

/// Random instance for the checks: a toy codebook with t = 12 (D=2, L_S=4,
/// L_R=4, M=2), N in [1, 6], W in [1, 8], frames in [-1, 1], a feasible
/// label and temperature in [0.5, 2].
struct CtcInstance {
    Codebook codebook;
    Frames frames;
    std::vector<std::size_t> label;
    double temperature;
};

CtcInstance random_ctc_instance(std::uint64_t seed);

/// Runs oracle equivalence and finite-difference checks on seeded instances.
CtcCheckReport run_ctc_check(const CtcCheckConfig& config);

}  // namespace hiercode
