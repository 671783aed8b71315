#include "hiercode/losses.hpp"

#include "hiercode/error.hpp"
#include "hiercode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hiercode {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

void check_temperature(double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorCode::NonFinite, "temperature must be positive and finite");
    }
}

void check_frames(const Codebook& cb, const Frames& frames) {
    if (frames.count() > 0 && frames.length() != cb.code_length()) {
        throw Error(ErrorCode::DimensionMismatch, "frame length " + std::to_string(frames.length()) +
                                                      " does not match codebook t=" +
                                                      std::to_string(cb.code_length()));
    }
    for (double v : frames.data()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "frames contain NaN or infinity");
    }
}

void check_label(const Codebook& cb, std::span<const std::size_t> label) {
    for (std::size_t k : label) {
        if (k >= cb.size()) {
            throw Error(ErrorCode::BadLabel, "label index " + std::to_string(k) + " outside codebook of " +
                                                 std::to_string(cb.size()));
        }
    }
}

// log softmax(scores / T) over N+1 classes, frame-major: [w * (N+1) + k].
std::vector<double> frame_log_probs(const SimilarityMatrix& scores, double temperature) {
    const std::size_t classes = scores.rows();
    const std::size_t w_count = scores.cols();
    std::vector<double> out(classes * w_count);
    for (std::size_t w = 0; w < w_count; ++w) {
        double hi = kNegInf;
        for (std::size_t k = 0; k < classes; ++k) hi = std::max(hi, scores.at(k, w) / temperature);
        double sum = 0.0;
        for (std::size_t k = 0; k < classes; ++k) sum += std::exp(scores.at(k, w) / temperature - hi);
        const double log_z = hi + std::log(sum);
        for (std::size_t k = 0; k < classes; ++k) out[w * classes + k] = scores.at(k, w) / temperature - log_z;
    }
    return out;
}

}  // namespace

std::size_t ctc_min_frames(std::span<const std::size_t> label) {
    std::size_t need = label.size();
    for (std::size_t i = 1; i < label.size(); ++i) need += label[i] == label[i - 1];
    return need;
}

std::vector<std::size_t> ctc_collapse(std::span<const std::size_t> path, std::size_t blank) {
    std::vector<std::size_t> out;
    std::size_t prev = blank;
    for (std::size_t k : path) {
        if (k != blank && k != prev) out.push_back(k);
        prev = k;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CTC over similarity logits

CtcResult ctc_sim_loss(const Codebook& cb, const Frames& frames, std::span<const std::size_t> label,
                       double temperature) {
    check_temperature(temperature);
    check_frames(cb, frames);
    check_label(cb, label);
    const std::size_t w_count = frames.count();
    if (ctc_min_frames(label) > w_count) {
        throw Error(ErrorCode::InfeasibleLabel, "label needs " + std::to_string(ctc_min_frames(label)) +
                                                    " frames, got " + std::to_string(w_count));
    }
    const std::size_t t = cb.code_length();
    CtcResult result{0.0, Frames(t, w_count)};
    if (w_count == 0) return result;

    const std::size_t classes = cb.size() + 1;
    const std::size_t blank = cb.size();
    const SimilarityMatrix scores = score(cb, frames);
    const std::vector<double> logp = frame_log_probs(scores, temperature);
    auto lp = [&](std::size_t w, std::size_t k) { return logp[w * classes + k]; };

    // Blank-augmented label: b l1 b l2 ... lL b.
    const std::size_t s_count = 2 * label.size() + 1;
    std::vector<std::size_t> ext(s_count, blank);
    for (std::size_t i = 0; i < label.size(); ++i) ext[2 * i + 1] = label[i];
    auto can_skip = [&](std::size_t s) { return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]; };

    std::vector<double> alpha(w_count * s_count, kNegInf);
    std::vector<double> beta(w_count * s_count, kNegInf);
    auto A = [&](std::size_t w, std::size_t s) -> double& { return alpha[w * s_count + s]; };
    auto B = [&](std::size_t w, std::size_t s) -> double& { return beta[w * s_count + s]; };

    A(0, 0) = lp(0, ext[0]);
    if (s_count > 1) A(0, 1) = lp(0, ext[1]);
    for (std::size_t w = 1; w < w_count; ++w) {
        for (std::size_t s = 0; s < s_count; ++s) {
            double acc = A(w - 1, s);
            if (s >= 1) acc = log_add(acc, A(w - 1, s - 1));
            if (can_skip(s)) acc = log_add(acc, A(w - 1, s - 2));
            if (acc != kNegInf) A(w, s) = acc + lp(w, ext[s]);
        }
    }
    const std::size_t last = w_count - 1;
    double log_p = A(last, s_count - 1);
    if (s_count > 1) log_p = log_add(log_p, A(last, s_count - 2));
    if (log_p == kNegInf) throw Error(ErrorCode::InfeasibleLabel, "no alignment has nonzero probability");

    // beta includes the emission at its own frame.
    B(last, s_count - 1) = lp(last, ext[s_count - 1]);
    if (s_count > 1) B(last, s_count - 2) = lp(last, ext[s_count - 2]);
    for (std::size_t w = last; w-- > 0;) {
        for (std::size_t s = 0; s < s_count; ++s) {
            double acc = B(w + 1, s);
            if (s + 1 < s_count) acc = log_add(acc, B(w + 1, s + 1));
            if (s + 2 < s_count && can_skip(s + 2)) acc = log_add(acc, B(w + 1, s + 2));
            if (acc != kNegInf) B(w, s) = acc + lp(w, ext[s]);
        }
    }

    result.loss = -log_p;

    // d loss / d logit(k, w) = p(k, w) - occupancy(k, w); logits are
    // score / T and scores are H . b, so each frame gradient is
    // H^T (p - occupancy) / T with the blank row included.
    std::vector<double> occupancy(classes);
    std::vector<double> dscore(classes);
    for (std::size_t w = 0; w < w_count; ++w) {
        std::fill(occupancy.begin(), occupancy.end(), kNegInf);
        for (std::size_t s = 0; s < s_count; ++s) {
            const double a = A(w, s);
            const double b = B(w, s);
            if (a == kNegInf || b == kNegInf) continue;
            occupancy[ext[s]] = log_add(occupancy[ext[s]], a + b - lp(w, ext[s]));
        }
        for (std::size_t k = 0; k < classes; ++k) {
            const double post = occupancy[k] == kNegInf ? 0.0 : std::exp(occupancy[k] - log_p);
            dscore[k] = (std::exp(lp(w, k)) - post) / temperature;
        }
        auto g = result.grad.frame(w);
        for (std::size_t k = 0; k < classes; ++k) {
            if (dscore[k] == 0.0) continue;
            auto code = k < cb.size() ? cb.row(k) : cb.blank_row();
            for (std::size_t p = 0; p < t; ++p) {
                if (code[p] != 0) g[p] += dscore[k] * code[p];
            }
        }
    }
    return result;
}

double ctc_brute_force(const Codebook& cb, const Frames& frames, std::span<const std::size_t> label,
                       double temperature) {
    check_temperature(temperature);
    check_frames(cb, frames);
    check_label(cb, label);
    const std::size_t w_count = frames.count();
    const std::size_t n = cb.size();
    if (w_count > 8 || n > 6) {
        throw Error(ErrorCode::TooLarge, "enumeration limited to W <= 8 and N <= 6 (W=" + std::to_string(w_count) +
                                             ", N=" + std::to_string(n) + ")");
    }
    const std::size_t classes = n + 1;

    // Independent of score()/frame_log_probs: direct dot products and a
    // plain normalisation per frame.
    std::vector<double> prob(w_count * classes);
    for (std::size_t w = 0; w < w_count; ++w) {
        auto f = frames.frame(w);
        std::vector<double> logits(classes);
        for (std::size_t k = 0; k < classes; ++k) {
            auto code = k < n ? cb.row(k) : cb.blank_row();
            double s = 0.0;
            for (std::size_t p = 0; p < code.size(); ++p) s += code[p] * f[p];
            logits[k] = s / temperature;
        }
        const double hi = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (double v : logits) z += std::exp(v - hi);
        for (std::size_t k = 0; k < classes; ++k) prob[w * classes + k] = std::exp(logits[k] - hi) / z;
    }

    std::vector<std::size_t> path(w_count, 0);
    double total = 0.0;
    const std::vector<std::size_t> target(label.begin(), label.end());
    for (;;) {
        if (ctc_collapse(path, n) == target) {
            double p = 1.0;
            for (std::size_t w = 0; w < w_count; ++w) p *= prob[w * classes + path[w]];
            total += p;
        }
        std::size_t w = 0;
        while (w < w_count && ++path[w] == classes) path[w++] = 0;
        if (w == w_count) break;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::InfeasibleLabel, "no assignment collapses to the label");
    return -std::log(total);
}

// ---------------------------------------------------------------------------
// Cross-entropy over similarity logits

CeResult ce_sim_loss(const Codebook& cb, std::span<const double> frame, std::size_t label, double temperature) {
    check_temperature(temperature);
    if (frame.size() != cb.code_length()) {
        throw Error(ErrorCode::DimensionMismatch, "frame length " + std::to_string(frame.size()) +
                                                      " does not match codebook t=" +
                                                      std::to_string(cb.code_length()));
    }
    if (label >= cb.size()) {
        throw Error(ErrorCode::BadLabel, "label index " + std::to_string(label) + " outside codebook of " +
                                             std::to_string(cb.size()));
    }
    const std::size_t n = cb.size();
    std::vector<double> logits(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto code = cb.row(k);
        double s = 0.0;
        for (std::size_t p = 0; p < code.size(); ++p) s += code[p] * frame[p];
        logits[k] = s / temperature;
    }
    const double hi = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - hi);
    const double log_z = hi + std::log(z);

    CeResult out{log_z - logits[label], std::vector<double>(frame.size(), 0.0)};
    for (std::size_t k = 0; k < n; ++k) {
        const double d = (std::exp(logits[k] - log_z) - (k == label ? 1.0 : 0.0)) / temperature;
        auto code = cb.row(k);
        for (std::size_t p = 0; p < code.size(); ++p) {
            if (code[p] != 0) out.grad[p] += d * code[p];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Greedy decoding

std::vector<std::size_t> best_path_decode(const Codebook& cb, const Frames& frames, double temperature) {
    check_temperature(temperature);
    check_frames(cb, frames);
    const std::size_t n = cb.size();
    const SimilarityMatrix scores = score(cb, frames);
    // Softmax at a positive temperature is monotone, so the argmax of the
    // raw scores is the argmax of the probabilities. Ties use the character
    // ranking, with the blank row weighing all t positions.
    auto weight = [&](std::size_t k) { return k < n ? cb.row_weight(k) : cb.code_length(); };
    std::vector<std::size_t> path(frames.count());
    for (std::size_t w = 0; w < frames.count(); ++w) {
        std::size_t best = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double a = scores.at(k, w);
            const double b = scores.at(best, w);
            if (a > b || (a == b && (weight(k) < weight(best) || (weight(k) == weight(best) && k < best)))) best = k;
        }
        path[w] = best;
    }
    return ctc_collapse(path, n);
}

// ---------------------------------------------------------------------------
// Verification harness

std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
    std::vector<double> point(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + step;
        const double up = f(point);
        point[i] = saved - step;
        const double down = f(point);
        point[i] = saved;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

double max_gradient_error(std::span<const double> analytic, std::span<const double> numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double scale = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric[i])});
        worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / scale);
    }
    return worst;
}

CtcInstance random_ctc_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CodeParams params{2, 4, 4, 2};
    static const char* const kRadicals[] = {"a", "b", "c", "d"};

    const std::size_t n = 1 + uniform_index(rng, 6);
    std::vector<CodebookEntry> entries;
    std::vector<std::string> used;
    while (entries.size() < n) {
        DecompTree tree = uniform_index(rng, 4) == 0
                              ? DecompTree::radical(kRadicals[uniform_index(rng, 4)])
                              : DecompTree::join(kAllStructures[uniform_index(rng, kStructureCount)],
                                                 DecompTree::radical(kRadicals[uniform_index(rng, 4)]),
                                                 DecompTree::radical(kRadicals[uniform_index(rng, 4)]));
        std::string spelled = render(tree);
        if (std::find(used.begin(), used.end(), spelled) != used.end()) continue;
        used.push_back(spelled);
        entries.push_back(CodebookEntry{spelled, std::move(tree)});
    }
    std::vector<RadicalId> all{{"a"}, {"b"}, {"c"}, {"d"}};
    Codebook cb = build_codebook(std::move(entries), gen_radical_codes(all, params.radical_bits, rng()), params, rng());

    const std::size_t w_count = 1 + uniform_index(rng, 8);
    Frames frames(params.code_length(), w_count);
    for (double& v : frames.data()) v = 2.0 * unit_double(rng) - 1.0;

    std::vector<std::size_t> label(uniform_index(rng, w_count + 1));
    for (auto& k : label) k = uniform_index(rng, n);
    while (ctc_min_frames(label) > w_count) label.pop_back();

    const double temperature = 0.5 + 1.5 * unit_double(rng);
    return CtcInstance{std::move(cb), std::move(frames), std::move(label), temperature};
}

CtcCheckReport run_ctc_check(const CtcCheckConfig& config) {
    CtcCheckReport report;
    report.oracle_instances = config.oracle_instances;
    report.gradient_instances = config.gradient_instances;

    for (std::size_t i = 0; i < config.oracle_instances; ++i) {
        const CtcInstance inst = random_ctc_instance(derive_seed(config.seed, i));
        const double fast = ctc_sim_loss(inst.codebook, inst.frames, inst.label, inst.temperature).loss;
        const double slow = ctc_brute_force(inst.codebook, inst.frames, inst.label, inst.temperature);
        const double err = std::fabs(fast - slow);
        report.max_oracle_error = std::max(report.max_oracle_error, err);
        if (!(err <= config.oracle_tolerance)) ++report.oracle_failures;
    }

    for (std::size_t i = 0; i < config.gradient_instances; ++i) {
        const CtcInstance inst = random_ctc_instance(derive_seed(config.seed ^ 0xC0FFEEULL, i));
        const std::size_t t = inst.codebook.code_length();

        const CtcResult analytic = ctc_sim_loss(inst.codebook, inst.frames, inst.label, inst.temperature);
        auto ctc_of = [&](std::span<const double> x) {
            Frames f(t, std::vector<double>(x.begin(), x.end()));
            return ctc_sim_loss(inst.codebook, f, inst.label, inst.temperature).loss;
        };
        const auto numeric = central_difference(ctc_of, inst.frames.data(), config.step);
        const double ctc_err = max_gradient_error(analytic.grad.data(), numeric);

        // CE on the first frame against a label drawn from the instance.
        const std::size_t ce_label = inst.label.empty() ? 0 : inst.label.front();
        const auto frame0 = inst.frames.frame(0);
        const CeResult ce = ce_sim_loss(inst.codebook, frame0, ce_label, inst.temperature);
        auto ce_of = [&](std::span<const double> x) {
            return ce_sim_loss(inst.codebook, x, ce_label, inst.temperature).loss;
        };
        const double ce_err = max_gradient_error(ce.grad, central_difference(ce_of, frame0, config.step));

        report.max_ctc_gradient_error = std::max(report.max_ctc_gradient_error, ctc_err);
        report.max_ce_gradient_error = std::max(report.max_ce_gradient_error, ce_err);
        if (!(ctc_err <= config.gradient_tolerance) || !(ce_err <= config.gradient_tolerance)) {
            ++report.gradient_failures;
        }
    }
    return report;
}

}  // namespace hiercode
