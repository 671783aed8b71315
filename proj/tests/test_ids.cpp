#include "hiercode/error.hpp"
#include "hiercode/ids.hpp"
#include "hiercode/params.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace hiercode;
using namespace hiercode::testing;

namespace {

ErrorCode code_of(std::string_view text) {
    try {
        parse_ids(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error for " << text);
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("left-right pair") {
    const DecompTree t = parse_ids("⿰女子");
    CHECK(t == lr(leaf("女"), leaf("子")));
    CHECK(t.depth() == 2);
    CHECK(t.leaf_count() == 2);
    CHECK(t.node_count() == 3);
}

TEST_CASE("single atom is a one-node tree") {
    const DecompTree t = parse_ids("木");
    CHECK(t.is_radical());
    CHECK(t.radical_id().symbol == "木");
    CHECK(t.depth() == 1);
}

TEST_CASE("ternary operators become right-nested binary ones") {
    CHECK(parse_ids("⿲彳亍丁") == lr(leaf("彳"), lr(leaf("亍"), leaf("丁"))));
    CHECK(parse_ids("⿳亠口小") == ab(leaf("亠"), ab(leaf("口"), leaf("小"))));
    const RawIdsTree raw = parse_raw_ids("⿲彳亍丁");
    REQUIRE(raw.op);
    CHECK(*raw.op == IdsOperator::LeftMiddleRight);
    CHECK(raw.children.size() == 3);
}

TEST_CASE("every binary IDC maps to its own structure") {
    const char32_t cps[] = {0x2FF0, 0x2FF1, 0x2FF4, 0x2FF5, 0x2FF6, 0x2FF7, 0x2FF8, 0x2FF9, 0x2FFA, 0x2FFB};
    for (std::size_t k = 0; k < kStructureCount; ++k) {
        std::string text;
        utf8::append(text, cps[k]);
        text += "口口";
        const DecompTree t = parse_ids(text);
        CHECK(t.op() == kAllStructures[k]);
        CHECK(codepoint_of(kAllStructures[k]) == cps[k]);
    }
}

TEST_CASE("nested decomposition") {
    const DecompTree t = parse_ids("⿱木⿰木木");
    CHECK(t == ab(leaf("木"), lr(leaf("木"), leaf("木"))));
    CHECK(t.depth() == 3);
    const auto leaves = t.leaves();
    CHECK(leaves.size() == 3);
}

TEST_CASE("ASCII whitespace between tokens is ignored") {
    CHECK(parse_ids(" ⿰ 女 子 ") == parse_ids("⿰女子"));
}

TEST_CASE("malformed input") {
    CHECK(code_of("") == ErrorCode::MalformedIds);
    CHECK(code_of("⿰女") == ErrorCode::MalformedIds);
    CHECK(code_of("⿰女子子") == ErrorCode::MalformedIds);
    CHECK(code_of("\xFF") == ErrorCode::MalformedIds);
    CHECK(code_of("⿰\xE4\xB8") == ErrorCode::MalformedIds);
}

TEST_CASE("unassigned description characters are unknown operators") {
    std::string text;
    utf8::append(text, 0x2FFC);
    text += "口口";
    CHECK(code_of(text) == ErrorCode::UnknownOperator);
}

TEST_CASE("pathological nesting is bounded") {
    std::string text;
    for (int i = 0; i < 2000; ++i) text += "⿰";
    CHECK(code_of(text) == ErrorCode::MalformedIds);
}

TEST_CASE("render inverts parse") {
    std::mt19937_64 rng(5);
    const char* atoms[] = {"口", "木", "日", "月", "x"};
    auto grow = [&](auto&& self, int depth) -> DecompTree {
        if (depth == 0 || rng() % 3 == 0) return leaf(atoms[rng() % 5]);
        DecompTree l = self(self, depth - 1);
        DecompTree r = self(self, depth - 1);
        return DecompTree::join(kAllStructures[rng() % kStructureCount], std::move(l), std::move(r));
    };
    for (int i = 0; i < 300; ++i) {
        const DecompTree t = grow(grow, 5);
        CHECK(parse_ids(render(t)) == t);
    }
}

TEST_CASE("random byte strings never crash the parser") {
    std::mt19937_64 rng(17);
    const std::string pieces[] = {"⿰", "⿱", "⿲", "⿳", "⿻", "口", "木", " ", "\xE2", "\xFF", "a"};
    for (int i = 0; i < 3000; ++i) {
        std::string text;
        const std::size_t n = rng() % 12;
        for (std::size_t k = 0; k < n; ++k) text += pieces[rng() % std::size(pieces)];
        try {
            const DecompTree t = parse_ids(text);
            CHECK(parse_ids(render(t)) == t);
        } catch (const Error& e) {
            const bool expected = e.code() == ErrorCode::MalformedIds || e.code() == ErrorCode::UnknownOperator;
            CHECK(expected);
        }
    }
}

TEST_CASE("validate reports depth and radical count") {
    const CodeParams p{2, 4, 8, 2};
    CHECK(validate(parse_ids("⿰女子"), p).empty());
    const auto v = validate(parse_ids("⿱木⿰木木"), p);
    REQUIRE(v.size() == 2);
    CHECK(std::get<DepthExceeded>(v[0]) == DepthExceeded{3, 2});
    CHECK(std::get<RadicalOverflow>(v[1]) == RadicalOverflow{3, 2});
    CHECK(describe(v[0]) == "DepthExceeded(3, 2)");
}

TEST_CASE("IDS records") {
    const auto entries = parse_ids_records("# toy\n好\t⿰女子\n\n明\t⿰日月\r\n", "toy.txt");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].character == "好");
    CHECK(entries[1].line == 4);
    CHECK(entries[1].tree == lr(leaf("日"), leaf("月")));
}

TEST_CASE("record errors carry file and line") {
    try {
        parse_ids_records("好\t⿰女子\n好\t⿰女子\n", "dup.txt");
        FAIL("duplicate accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateCharacter);
        CHECK(std::string(e.what()).find("dup.txt:2") != std::string::npos);
    }
    try {
        parse_ids_records("好 ⿰女子\n", "tab.txt");
        FAIL("missing tab accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadFormat);
        CHECK(std::string(e.what()).find("tab.txt:1") != std::string::npos);
    }
    try {
        parse_ids_records("好\t⿰女\n", "bad.txt");
        FAIL("truncated IDS accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedIds);
        CHECK(std::string(e.what()).find("bad.txt:1") != std::string::npos);
    }
}

TEST_CASE("missing IDS file is an I/O error") {
    try {
        load_ids_file("/nonexistent/ids.txt");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.is_io());
    }
}
