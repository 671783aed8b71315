#include "hiercode/error.hpp"
#include "hiercode/losses.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hiercode;
using namespace hiercode::testing;

namespace {

const Codebook& small() {
    static const Codebook cb = [] {
        const CodeParams p{2, 4, 4, 2};
        return build_codebook(entries_from({{"a", "x"}, {"b", "⿰xy"}, {"c", "⿱yx"}}),
                              parse_prototype_codes("x\t++-+\ny\t-+--\n", 4, "r"), p, 6);
    }();
    return cb;
}

double raw_score(std::span<const Trit> code, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t p = 0; p < code.size(); ++p) s += code[p] * f[p];
    return s;
}

// log p(class k | frame) with the blank as class N, computed long-hand.
double log_prob(const Codebook& cb, std::span<const double> f, std::size_t k, double temperature) {
    std::vector<double> z;
    for (std::size_t i = 0; i <= cb.size(); ++i) {
        z.push_back(raw_score(i < cb.size() ? cb.row(i) : cb.blank_row(), f) / temperature);
    }
    double sum = 0.0;
    for (double v : z) sum += std::exp(v);
    return z[k] - std::log(sum);
}

Frames uniform_frames(std::size_t t, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Frames f(t, w);
    for (double& v : f.data()) v = u(rng);
    return f;
}

Frames frames_of(const Codebook& cb, const std::vector<long>& rows) {
    Frames f(cb.code_length(), 0);
    for (long r : rows) {
        auto code = r < 0 ? cb.blank_row() : cb.row(static_cast<std::size_t>(r));
        f.push_back(code);
    }
    return f;
}

}  // namespace

TEST_CASE("minimum frame counts and collapse") {
    const std::vector<std::size_t> aab{0, 0, 1};
    CHECK(ctc_min_frames(aab) == 4);
    CHECK(ctc_min_frames(std::vector<std::size_t>{}) == 0);
    const std::vector<std::size_t> path{0, 0, 3, 0, 1, 1, 3, 3};
    CHECK(ctc_collapse(path, 3) == std::vector<std::size_t>{0, 0, 1});
}

TEST_CASE("single frame equals the closed form") {
    const Codebook& cb = small();
    const Frames f = uniform_frames(cb.code_length(), 1, 1);
    for (std::size_t k = 0; k < cb.size(); ++k) {
        const std::vector<std::size_t> label{k};
        for (double temperature : {0.5, 1.0, 2.0}) {
            const double expected = -log_prob(cb, f.frame(0), k, temperature);
            CHECK(ctc_sim_loss(cb, f, label, temperature).loss == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("empty label is all blanks") {
    const Codebook& cb = small();
    const Frames f = uniform_frames(cb.code_length(), 4, 2);
    double expected = 0.0;
    for (std::size_t w = 0; w < 4; ++w) expected -= log_prob(cb, f.frame(w), cb.size(), 1.0);
    CHECK(ctc_sim_loss(cb, f, std::vector<std::size_t>{}).loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("two frames, one label: three alignments") {
    const Codebook& cb = small();
    const Frames f = uniform_frames(cb.code_length(), 2, 3);
    const std::size_t k = 1;
    const std::size_t blank = cb.size();
    auto p = [&](std::size_t w, std::size_t c) { return std::exp(log_prob(cb, f.frame(w), c, 1.0)); };
    const double total = p(0, k) * p(1, k) + p(0, blank) * p(1, k) + p(0, k) * p(1, blank);
    CHECK(ctc_sim_loss(cb, f, std::vector<std::size_t>{k}).loss == doctest::Approx(-std::log(total)).epsilon(1e-12));
}

TEST_CASE("infeasible labels") {
    const Codebook& cb = small();
    const std::vector<std::size_t> aa{0, 0};
    try {
        ctc_sim_loss(cb, uniform_frames(cb.code_length(), 2, 4), aa);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasibleLabel);
    }
    CHECK(std::isfinite(ctc_sim_loss(cb, uniform_frames(cb.code_length(), 3, 4), aa).loss));
    CHECK_THROWS_AS(ctc_brute_force(cb, uniform_frames(cb.code_length(), 2, 4), aa), Error);
}

TEST_CASE("argument errors") {
    const Codebook& cb = small();
    const std::vector<std::size_t> bad{7};
    CHECK_THROWS_AS(ctc_sim_loss(cb, uniform_frames(cb.code_length(), 2, 4), bad), Error);
    CHECK_THROWS_AS(ctc_sim_loss(cb, uniform_frames(5, 2, 4), std::vector<std::size_t>{0}), Error);
    CHECK_THROWS_AS(ctc_brute_force(cb, uniform_frames(cb.code_length(), 9, 4), std::vector<std::size_t>{0}), Error);
    std::vector<double> f(cb.code_length(), 0.0);
    CHECK_THROWS_AS(ce_sim_loss(cb, f, 3), Error);
}

TEST_CASE("forward recursion agrees with enumeration") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const CtcInstance inst = random_ctc_instance(seed);
        const double fast = ctc_sim_loss(inst.codebook, inst.frames, inst.label, inst.temperature).loss;
        const double slow = ctc_brute_force(inst.codebook, inst.frames, inst.label, inst.temperature);
        CHECK(std::fabs(fast - slow) <= 1e-9);
        CHECK(fast >= 0.0);
    }
}

TEST_CASE("random instances are valid") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const CtcInstance inst = random_ctc_instance(seed);
        CHECK(inst.codebook.code_length() == 12);
        CHECK(inst.codebook.size() >= 1);
        CHECK(inst.codebook.size() <= 6);
        CHECK(inst.frames.count() >= 1);
        CHECK(inst.frames.count() <= 8);
        CHECK(ctc_min_frames(inst.label) <= inst.frames.count());
        CHECK(inst.temperature >= 0.5);
        CHECK(inst.temperature <= 2.0);
    }
}

TEST_CASE("gradients match finite differences") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const CtcInstance inst = random_ctc_instance(seed);
        const std::size_t t = inst.codebook.code_length();
        const CtcResult r = ctc_sim_loss(inst.codebook, inst.frames, inst.label, inst.temperature);
        auto f = [&](std::span<const double> x) {
            return ctc_sim_loss(inst.codebook, Frames(t, std::vector<double>(x.begin(), x.end())), inst.label,
                                inst.temperature)
                .loss;
        };
        CHECK(max_gradient_error(r.grad.data(), central_difference(f, inst.frames.data(), 1e-4)) <= 1e-5);
    }
}

TEST_CASE("gradient error metric") {
    const std::vector<double> a{1.0, 0.0, 100.0};
    const std::vector<double> n{1.0, 1e-6, 101.0};
    CHECK(max_gradient_error(a, n) == doctest::Approx(1.0 / 101.0));
}

TEST_CASE("cross-entropy against a hand computation") {
    const Codebook& cb = small();
    const Frames f = uniform_frames(cb.code_length(), 1, 8);
    const auto frame = f.frame(0);
    const double s0 = raw_score(cb.row(0), frame);
    const double s1 = raw_score(cb.row(1), frame);
    const double s2 = raw_score(cb.row(2), frame);
    const double expected = -(s1 - std::log(std::exp(s0) + std::exp(s1) + std::exp(s2)));
    const CeResult r = ce_sim_loss(cb, frame, 1);
    CHECK(r.loss == doctest::Approx(expected).epsilon(1e-12));
    auto loss = [&](std::span<const double> x) { return ce_sim_loss(cb, x, 1).loss; };
    CHECK(max_gradient_error(r.grad, central_difference(loss, frame, 1e-4)) <= 1e-6);
}

TEST_CASE("cross-entropy limits") {
    const CodeParams p{2, 4, 4, 2};
    const Codebook one = build_codebook(entries_from({{"a", "x"}}), parse_prototype_codes("x\t++-+\n", 4, "r"), p, 1);
    const std::vector<double> f(12, 0.3);
    CHECK(ce_sim_loss(one, f, 0).loss == doctest::Approx(0.0));
    const Codebook& cb = small();
    std::vector<double> own(cb.row(1).begin(), cb.row(1).end());
    CHECK(ce_sim_loss(cb, own, 1, 1e-3).loss < 1e-12);
}

TEST_CASE("temperature to infinity gives uniform frames") {
    const Codebook& cb = small();
    const std::vector<std::size_t> label{0, 2, 1};
    const Frames f = uniform_frames(cb.code_length(), 3, 11);
    const double expected = 3.0 * std::log(static_cast<double>(cb.size() + 1));
    CHECK(ctc_sim_loss(cb, f, label, 1e9).loss == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("appending a frame costs at most its blank log-probability") {
    const Codebook& cb = small();
    const std::vector<std::size_t> label{2, 0};
    const Frames base = uniform_frames(cb.code_length(), 3, 12);
    Frames longer = base;
    const Frames extra = uniform_frames(cb.code_length(), 1, 13);
    longer.push_back(extra.frame(0));
    const double before = ctc_sim_loss(cb, base, label).loss;
    const double after = ctc_sim_loss(cb, longer, label).loss;
    CHECK(after <= before - log_prob(cb, extra.frame(0), cb.size(), 1.0) + 1e-12);
}

TEST_CASE("best path decoding") {
    const Codebook& cb = small();
    CHECK(best_path_decode(cb, frames_of(cb, {0, -1, 1})) == std::vector<std::size_t>{0, 1});
    CHECK(best_path_decode(cb, frames_of(cb, {0, 0, -1, 0})) == std::vector<std::size_t>{0, 0});
    CHECK(best_path_decode(cb, frames_of(cb, {-1, -1})).empty());
    CHECK(best_path_decode(cb, frames_of(cb, {2, 1, 2})) == std::vector<std::size_t>{2, 1, 2});
}

TEST_CASE("check harness passes on a short run") {
    CtcCheckConfig c;
    c.oracle_instances = 30;
    c.gradient_instances = 10;
    const CtcCheckReport r = run_ctc_check(c);
    CHECK(r.passed());
    CHECK(r.max_oracle_error <= 1e-9);
}
