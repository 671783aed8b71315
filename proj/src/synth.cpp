#include "hiercode/synth.hpp"

#include "hiercode/block_index.hpp"
#include "hiercode/error.hpp"
#include "hiercode/ids.hpp"
#include "hiercode/losses.hpp"
#include "hiercode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace hiercode {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string codepoint_string(char32_t cp) {
    std::string out;
    utf8::append(out, cp);
    return out;
}

}  // namespace

void SynthConfig::check() const {
    if (!is_probability(flip_rate)) throw Error(ErrorCode::InvalidParams, "flip_rate must lie in [0, 1]");
    if (!is_probability(blank_prob)) throw Error(ErrorCode::InvalidParams, "blank_prob must lie in [0, 1]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw Error(ErrorCode::InvalidParams, "noise_sigma must be finite and >= 0");
    }
    if (frames_per_char == 0) throw Error(ErrorCode::InvalidParams, "frames_per_char must be positive");
}

std::vector<double> noisy_frame(std::span<const Trit> code, const SynthConfig& config, std::mt19937_64& rng) {
    std::vector<double> frame(code.size());
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t p = 0; p < code.size(); ++p) {
        double v = code[p];
        if (v != 0.0 && config.flip_rate > 0.0 && unit_double(rng) < config.flip_rate) v = -v;
        if (config.noise_sigma > 0.0) v += config.noise_sigma * gauss(rng);
        frame[p] = v;
    }
    return frame;
}

std::vector<double> gen_char_sample(const Codebook& codebook, std::size_t label, const SynthConfig& config) {
    config.check();
    if (label >= codebook.size()) {
        throw Error(ErrorCode::BadLabel, "label index " + std::to_string(label) + " outside codebook of " +
                                             std::to_string(codebook.size()));
    }
    std::mt19937_64 rng(config.seed);
    return noisy_frame(codebook.row(label), config, rng);
}

ZeroShotSplit::ZeroShotSplit(const Codebook& codebook, std::size_t m) : m_(m), total_(codebook.size()) {
    if (m == 0 || m >= total_) {
        throw Error(ErrorCode::InvalidParams, "split needs 0 < m < N (m=" + std::to_string(m) +
                                                  ", N=" + std::to_string(total_) + ")");
    }
}

ZeroShotSplit split_by_fraction(const Codebook& codebook, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorCode::InvalidParams, "seen fraction must lie in (0, 1)");
    const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(codebook.size())));
    return ZeroShotSplit(codebook, m);
}

CharEvalReport eval_zero_shot_char(const Codebook& codebook, const ZeroShotSplit& split, const SynthConfig& config,
                                   std::size_t trials) {
    config.check();
    if (split.total() != codebook.size()) throw Error(ErrorCode::InvalidParams, "split belongs to another codebook");
    const BlockIndex index(codebook);
    std::vector<std::size_t> predicted(trials);

#pragma omp parallel for schedule(dynamic, 64)
    for (std::size_t i = 0; i < trials; ++i) {
        const std::size_t truth = split.unseen(i % split.unseen_count());
        std::mt19937_64 rng(derive_seed(config.seed, i));
        const auto frame = noisy_frame(codebook.row(truth), config, rng);
        predicted[i] = index.decode(frame).index;
    }

    CharEvalReport report;
    report.m = split.m();
    report.trials = trials;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> confusions;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::size_t truth = split.unseen(i % split.unseen_count());
        if (predicted[i] == truth) {
            ++report.correct;
        } else {
            ++confusions[{truth, predicted[i]}];
            report.predicted_seen += split.is_seen(predicted[i]);
        }
    }
    report.accuracy = trials ? static_cast<double>(report.correct) / static_cast<double>(trials) : 0.0;
    for (const auto& [key, count] : confusions) report.top_confusions.push_back({key.first, key.second, count});
    std::stable_sort(report.top_confusions.begin(), report.top_confusions.end(),
                     [](const Confusion& a, const Confusion& b) { return a.count > b.count; });
    if (report.top_confusions.size() > 5) report.top_confusions.resize(5);
    return report;
}

EditCounts edit_counts(std::span<const std::size_t> reference, std::span<const std::size_t> hypothesis) {
    const std::size_t n = reference.size();
    const std::size_t m = hypothesis.size();
    std::vector<std::size_t> d((n + 1) * (m + 1));
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
    for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
    for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t diag = at(i - 1, j - 1) + (reference[i - 1] != hypothesis[j - 1]);
            at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
        }
    }
    EditCounts counts;
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (reference[i - 1] != hypothesis[j - 1])) {
            counts.substitutions += reference[i - 1] != hypothesis[j - 1];
            --i;
            --j;
        } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
            ++counts.deletions;
            --i;
        } else {
            ++counts.insertions;
            --j;
        }
    }
    return counts;
}

Frames line_frames(const Codebook& codebook, std::span<const std::size_t> transcript, const SynthConfig& config,
                   std::mt19937_64& rng) {
    Frames frames(codebook.code_length(), 0);
    for (std::size_t k = 0; k < transcript.size(); ++k) {
        if (k > 0) {
            const bool forced = transcript[k] == transcript[k - 1];
            const bool drawn = config.blank_prob > 0.0 && unit_double(rng) < config.blank_prob;
            if (forced || drawn) frames.push_back(std::span<const double>(noisy_frame(codebook.blank_row(), config, rng)));
        }
        for (std::size_t f = 0; f < config.frames_per_char; ++f) {
            frames.push_back(std::span<const double>(noisy_frame(codebook.row(transcript[k]), config, rng)));
        }
    }
    return frames;
}

LineEvalReport eval_line_zero_shot(const Codebook& codebook, const ZeroShotSplit& split, const SynthConfig& config,
                                   std::size_t length, std::size_t trials, double temperature) {
    config.check();
    if (length == 0) throw Error(ErrorCode::InvalidParams, "transcript length must be positive");
    if (split.total() != codebook.size()) throw Error(ErrorCode::InvalidParams, "split belongs to another codebook");

    std::vector<EditCounts> per_trial(trials);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < trials; ++i) {
        std::mt19937_64 rng(derive_seed(config.seed, i));
        std::vector<std::size_t> transcript(length);
        for (auto& c : transcript) c = uniform_index(rng, codebook.size());
        transcript[uniform_index(rng, length)] = split.unseen(uniform_index(rng, split.unseen_count()));
        const Frames frames = line_frames(codebook, transcript, config, rng);
        const auto decoded = best_path_decode(codebook, frames, temperature);
        per_trial[i] = edit_counts(transcript, decoded);
    }

    LineEvalReport report;
    report.m = split.m();
    report.trials = trials;
    report.length = length;
    double distance_sum = 0.0;
    for (const EditCounts& e : per_trial) {
        report.exact_matches += e.distance() == 0;
        report.edits.substitutions += e.substitutions;
        report.edits.deletions += e.deletions;
        report.edits.insertions += e.insertions;
        distance_sum += static_cast<double>(e.distance()) / static_cast<double>(length);
    }
    report.reference_chars = trials * length;
    if (trials > 0) {
        const auto nt = static_cast<double>(report.reference_chars);
        const auto de = static_cast<double>(report.edits.deletions);
        const auto ds = static_cast<double>(report.edits.substitutions);
        const auto di = static_cast<double>(report.edits.insertions);
        report.exact_rate = static_cast<double>(report.exact_matches) / static_cast<double>(trials);
        report.correct_rate = (nt - de - ds) / nt;
        report.accuracy_rate = (nt - de - ds - di) / nt;
        report.mean_normalized_distance = distance_sum / static_cast<double>(trials);
    }
    return report;
}

std::string synthetic_radical(std::size_t k) { return codepoint_string(static_cast<char32_t>(0x4E00 + k)); }

std::size_t count_trees(std::size_t max_depth, std::size_t radical_count) {
    constexpr std::size_t kCap = std::size_t{1} << 62;
    if (max_depth == 0) return 0;
    std::size_t c = radical_count;
    for (std::size_t d = 2; d <= max_depth; ++d) {
        if (c > (std::size_t{1} << 29)) return kCap;
        const std::size_t next = radical_count + kStructureCount * c * c;
        c = std::min(next, kCap);
    }
    return c;
}

std::vector<CodebookEntry> enumerate_trees(std::size_t max_depth, const std::vector<RadicalId>& radicals) {
    const std::size_t total = count_trees(max_depth, radicals.size());
    if (total > 5'000'000) throw Error(ErrorCode::TooLarge, std::to_string(total) + " trees requested");
    std::vector<DecompTree> level;
    for (const RadicalId& r : radicals) level.push_back(DecompTree::radical(r));
    for (std::size_t d = 2; d <= max_depth; ++d) {
        std::vector<DecompTree> next;
        next.reserve(count_trees(d, radicals.size()));
        for (const RadicalId& r : radicals) next.push_back(DecompTree::radical(r));
        for (StructureOp op : kAllStructures) {
            for (const DecompTree& l : level) {
                for (const DecompTree& r : level) next.push_back(DecompTree::join(op, l, r));
            }
        }
        level = std::move(next);
    }
    std::vector<CodebookEntry> out;
    out.reserve(level.size());
    for (DecompTree& t : level) {
        std::string name = render(t);
        out.push_back(CodebookEntry{std::move(name), std::move(t)});
    }
    return out;
}

std::vector<CodebookEntry> synthetic_charset(const CharsetConfig& config) {
    if (config.radical_count == 0 || config.max_depth == 0) {
        throw Error(ErrorCode::InvalidParams, "charset needs radicals and depth >= 1");
    }
    if (config.count > 0xFFFFD - 0xF0000 + 1) throw Error(ErrorCode::InvalidParams, "charset larger than 65534");
    if (count_trees(config.max_depth, config.radical_count) < config.count) {
        throw Error(ErrorCode::InvalidParams, "only " + std::to_string(count_trees(config.max_depth, config.radical_count)) +
                                                  " trees exist for " + std::to_string(config.count) + " characters");
    }
    std::mt19937_64 rng(config.seed);
    std::vector<std::string> names(config.radical_count);
    for (std::size_t k = 0; k < config.radical_count; ++k) names[k] = synthetic_radical(k);

    auto grow = [&](auto&& self, std::size_t depth) -> DecompTree {
        const double leaf_prob = depth == 1 ? 0.05 : 0.5;
        if (depth == config.max_depth || unit_double(rng) < leaf_prob) {
            return DecompTree::radical(names[uniform_index(rng, config.radical_count)]);
        }
        const StructureOp op = kAllStructures[uniform_index(rng, kStructureCount)];
        DecompTree left = self(self, depth + 1);
        DecompTree right = self(self, depth + 1);
        return DecompTree::join(op, std::move(left), std::move(right));
    };

    std::vector<std::pair<std::string, DecompTree>> trees;
    std::unordered_set<std::string> seen;
    const std::size_t budget = 1000 + 200 * config.count;
    for (std::size_t attempt = 0; trees.size() < config.count; ++attempt) {
        if (attempt == budget) throw Error(ErrorCode::InvalidParams, "could not draw enough distinct trees");
        DecompTree t = grow(grow, 1);
        std::string spelled = render(t);
        if (seen.insert(spelled).second) trees.emplace_back(std::move(spelled), std::move(t));
    }
    std::sort(trees.begin(), trees.end(), [](const auto& a, const auto& b) {
        const auto ka = std::make_tuple(a.second.leaf_count(), a.second.node_count());
        const auto kb = std::make_tuple(b.second.leaf_count(), b.second.node_count());
        if (ka != kb) return ka < kb;
        return a.first < b.first;
    });
    std::vector<CodebookEntry> out;
    out.reserve(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        out.push_back(CodebookEntry{codepoint_string(static_cast<char32_t>(0xF0000 + i)), std::move(trees[i].second)});
    }
    return out;
}

std::vector<SweepPoint> default_sweep_grid() {
    const CodeParams base{};
    std::vector<SweepPoint> grid{{base, 1}};
    auto add = [&](CodeParams p) {
        for (const SweepPoint& s : grid) {
            if (s.params == p) return;
        }
        grid.push_back({p, 1});
    };
    for (std::size_t lr : {12, 24, 36}) {
        CodeParams p = base;
        p.radical_bits = lr;
        add(p);
    }
    for (std::size_t ls : {4, 8, 12}) {
        CodeParams p = base;
        p.struct_bits = ls;
        add(p);
    }
    for (std::size_t d : {5, 6, 7}) {
        CodeParams p = base;
        p.depth = d;
        add(p);
    }
    return grid;
}

std::vector<SweepRow> ablation_sweep(const std::vector<CodebookEntry>& charset, const std::vector<SweepPoint>& grid,
                                     const SynthConfig& config, std::size_t trials) {
    config.check();
    for (const SweepPoint& point : grid) point.params.check();
    std::vector<SweepRow> rows;
    for (const SweepPoint& point : grid) {
        const Codebook cb = build_codebook(charset, point.params, config.seed, point.min_hamming);
        const DecodeMargins margins = decode_margins(cb);
        const BlockIndex index(cb);

        std::vector<unsigned char> hit(trials);
#pragma omp parallel for schedule(dynamic, 64)
        for (std::size_t i = 0; i < trials; ++i) {
            const std::size_t truth = i % cb.size();
            std::mt19937_64 rng(derive_seed(config.seed, i));
            hit[i] = index.decode(noisy_frame(cb.row(truth), config, rng)).index == truth;
        }

        SweepRow row;
        row.point = point;
        row.code_length = cb.code_length();
        row.radical_min_hamming = cb.radicals().min_hamming_distance();
        row.min_gap = margins.min_gap;
        row.min_strict_gap = margins.min_strict_gap;
        row.tied_pairs = margins.tied_pairs;
        row.trials = trials;
        for (unsigned char h : hit) row.correct += h;
        if (trials > 0) {
            row.accuracy = static_cast<double>(row.correct) / static_cast<double>(trials);
            row.std_error = std::sqrt(row.accuracy * (1.0 - row.accuracy) / static_cast<double>(trials));
        }
        rows.push_back(row);
    }
    return rows;
}

bool within_monte_carlo_error(const SweepRow& a, const SweepRow& b, double z) {
    const double combined = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    const double floor = 1.0 / static_cast<double>(std::max<std::size_t>(1, std::min(a.trials, b.trials)));
    return std::fabs(a.accuracy - b.accuracy) <= std::max(z * combined, floor);
}

}  // namespace hiercode
