#include "hiercode/error.hpp"
#include "hiercode/losses.hpp"
#include "hiercode/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace hiercode;
using namespace hiercode::testing;

namespace {

const Codebook& charset_codebook() {
    static const Codebook cb = build_codebook(synthetic_charset({40, 600, 3, 1}), CodeParams{}, 1);
    return cb;
}

}  // namespace

TEST_CASE("config validation") {
    SynthConfig c;
    CHECK_NOTHROW(c.check());
    c.flip_rate = 1.5;
    CHECK_THROWS_AS(c.check(), Error);
    c = SynthConfig{};
    c.noise_sigma = -1.0;
    CHECK_THROWS_AS(c.check(), Error);
    c = SynthConfig{};
    c.frames_per_char = 0;
    CHECK_THROWS_AS(c.check(), Error);
}

TEST_CASE("noise-free and fully flipped samples") {
    const Codebook cb = toy_codebook();
    SynthConfig c;
    const auto clean = gen_char_sample(cb, 2, c);
    CHECK(std::equal(clean.begin(), clean.end(), cb.row(2).begin()));
    c.flip_rate = 1.0;
    const auto flipped = gen_char_sample(cb, 2, c);
    for (std::size_t p = 0; p < flipped.size(); ++p) CHECK(flipped[p] == -cb.row(2)[p]);
    CHECK_THROWS_AS(gen_char_sample(cb, 99, c), Error);
}

TEST_CASE("samples are reproducible from the seed") {
    const Codebook cb = toy_codebook();
    SynthConfig c;
    c.noise_sigma = 0.4;
    c.flip_rate = 0.1;
    c.seed = 77;
    CHECK(gen_char_sample(cb, 1, c) == gen_char_sample(cb, 1, c));
    SynthConfig d = c;
    d.seed = 78;
    CHECK(gen_char_sample(cb, 1, c) != gen_char_sample(cb, 1, d));
}

TEST_CASE("splits") {
    const Codebook cb = toy_codebook();
    const ZeroShotSplit s(cb, 4);
    CHECK(s.seen_count() == 4);
    CHECK(s.unseen_count() == 2);
    CHECK(s.unseen(0) == 4);
    CHECK(s.is_seen(3));
    CHECK(!s.is_seen(4));
    CHECK_THROWS_AS(ZeroShotSplit(cb, 0), Error);
    CHECK_THROWS_AS(ZeroShotSplit(cb, 6), Error);
    CHECK(split_by_fraction(cb, 0.5).m() == 3);
}

TEST_CASE("tree counting and enumeration") {
    CHECK(count_trees(1, 5) == 5);
    CHECK(count_trees(2, 5) == 5 + 10 * 25);
    CHECK(count_trees(3, 5) == 5 + 10 * 255 * 255);
    const auto trees = enumerate_trees(2, {{"a"}, {"b"}});
    CHECK(trees.size() == 2 + 10 * 4);
    std::set<std::string> names;
    for (const auto& e : trees) {
        names.insert(e.character);
        CHECK(e.tree.depth() <= 2);
        CHECK(parse_ids(e.character) == e.tree);
    }
    CHECK(names.size() == trees.size());
    CHECK_THROWS_AS(enumerate_trees(4, {{"a"}, {"b"}, {"c"}}), Error);
}

TEST_CASE("synthetic charsets") {
    const auto a = synthetic_charset({40, 600, 3, 1});
    const auto b = synthetic_charset({40, 600, 3, 1});
    REQUIRE(a.size() == 600);
    std::set<std::string> chars;
    std::set<std::string> shapes;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].character == b[i].character);
        CHECK(a[i].tree == b[i].tree);
        CHECK(a[i].tree.depth() <= 3);
        chars.insert(a[i].character);
        shapes.insert(render(a[i].tree));
        if (i > 0) CHECK(a[i - 1].tree.leaf_count() <= a[i].tree.leaf_count());
    }
    CHECK(chars.size() == 600);
    CHECK(shapes.size() == 600);
    CHECK_THROWS_AS(synthetic_charset({2, 1000, 2, 1}), Error);
}

TEST_CASE("zero noise recovers every unseen character") {
    const Codebook& cb = charset_codebook();
    const ZeroShotSplit split = split_by_fraction(cb, 0.6);
    const CharEvalReport r = eval_zero_shot_char(cb, split, SynthConfig{}, split.unseen_count());
    CHECK(r.correct == r.trials);
    CHECK(r.accuracy == 1.0);
    CHECK(r.top_confusions.empty());
}

TEST_CASE("half flips are near chance") {
    const Codebook& cb = charset_codebook();
    SynthConfig c;
    c.flip_rate = 0.5;
    const CharEvalReport r = eval_zero_shot_char(cb, split_by_fraction(cb, 0.6), c, 1000);
    CHECK(r.accuracy < 0.05);
    CHECK(!r.top_confusions.empty());
}

TEST_CASE("accuracy does not increase with the flip rate") {
    const Codebook& cb = charset_codebook();
    const ZeroShotSplit split = split_by_fraction(cb, 0.6);
    double previous = 1.0;
    for (double rate : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
        SynthConfig c;
        c.flip_rate = rate;
        const double acc = eval_zero_shot_char(cb, split, c, 1500).accuracy;
        CHECK(acc <= previous + 0.01);
        previous = acc;
    }
}

TEST_CASE("edit counts") {
    const std::vector<std::size_t> ref{1, 2, 3, 4};
    CHECK(edit_counts(ref, ref).distance() == 0);
    const auto sub = edit_counts(ref, std::vector<std::size_t>{1, 9, 3, 4});
    CHECK(sub.substitutions == 1);
    const auto del = edit_counts(ref, std::vector<std::size_t>{1, 3, 4});
    CHECK(del.deletions == 1);
    CHECK(del.distance() == 1);
    const auto ins = edit_counts(ref, std::vector<std::size_t>{1, 2, 7, 3, 4});
    CHECK(ins.insertions == 1);
    CHECK(ins.distance() == 1);
    const auto empty = edit_counts(ref, std::vector<std::size_t>{});
    CHECK(empty.deletions == 4);
}

TEST_CASE("line frames separate repeated characters") {
    const Codebook cb = toy_codebook();
    SynthConfig c;
    c.frames_per_char = 2;
    std::mt19937_64 rng(1);
    const std::vector<std::size_t> text{3, 3, 1};
    const Frames f = line_frames(cb, text, c, rng);
    CHECK(f.count() == 7);
    CHECK(best_path_decode(cb, f) == text);
}

TEST_CASE("noise-free lines decode exactly with or without blanks") {
    const Codebook& cb = charset_codebook();
    const ZeroShotSplit split = split_by_fraction(cb, 0.6);
    SynthConfig c;
    const LineEvalReport none = eval_line_zero_shot(cb, split, c, 5, 200);
    c.blank_prob = 0.5;
    const LineEvalReport half = eval_line_zero_shot(cb, split, c, 5, 200);
    CHECK(none.exact_rate == 1.0);
    CHECK(half.exact_rate == 1.0);
    CHECK(half.accuracy_rate == 1.0);
    CHECK(half.correct_rate == 1.0);
}

TEST_CASE("line metrics follow the competition formulas") {
    const Codebook& cb = charset_codebook();
    SynthConfig c;
    c.flip_rate = 0.3;
    const LineEvalReport r = eval_line_zero_shot(cb, split_by_fraction(cb, 0.6), c, 5, 300);
    const double nt = static_cast<double>(r.reference_chars);
    CHECK(r.reference_chars == 1500);
    CHECK(r.correct_rate == doctest::Approx((nt - r.edits.deletions - r.edits.substitutions) / nt));
    CHECK(r.accuracy_rate ==
          doctest::Approx((nt - r.edits.deletions - r.edits.substitutions - r.edits.insertions) / nt));
    CHECK(r.accuracy_rate <= r.correct_rate);
}

TEST_CASE("reports are deterministic") {
    const Codebook& cb = charset_codebook();
    const ZeroShotSplit split = split_by_fraction(cb, 0.6);
    SynthConfig c;
    c.flip_rate = 0.2;
    c.noise_sigma = 0.3;
    c.blank_prob = 0.3;
    const auto a = eval_line_zero_shot(cb, split, c, 5, 100);
    const auto b = eval_line_zero_shot(cb, split, c, 5, 100);
    CHECK(a.exact_matches == b.exact_matches);
    CHECK(a.edits.distance() == b.edits.distance());
    CHECK(a.mean_normalized_distance == b.mean_normalized_distance);
    CHECK(eval_zero_shot_char(cb, split, c, 500).correct == eval_zero_shot_char(cb, split, c, 500).correct);
}

TEST_CASE("default sweep grid") {
    const auto grid = default_sweep_grid();
    CHECK(grid.size() == 7);
    CHECK(grid[0].params == CodeParams{});
    for (const auto& p : grid) CHECK_NOTHROW(p.params.check());
}

TEST_CASE("small sweep keeps depth flat and penalises short radical codes") {
    const auto charset = synthetic_charset({40, 300, 3, 5});
    std::vector<SweepPoint> grid{{CodeParams{5, 4, 36, 9}, 1}, {CodeParams{5, 4, 12, 9}, 1}, {CodeParams{6, 4, 36, 9}, 1}};
    SynthConfig c;
    c.flip_rate = 0.15;
    const auto rows = ablation_sweep(charset, grid, c, 1500);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].code_length == 384);
    CHECK(rows[2].code_length == 31 * 4 + 9 * 36);
    CHECK(rows[0].accuracy > rows[1].accuracy);
    CHECK(within_monte_carlo_error(rows[0], rows[2]));
}
