#include "hiercode/codebook.hpp"
#include "hiercode/error.hpp"
#include "hiercode/tree_embed.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace hiercode;
using namespace hiercode::testing;

namespace {

std::vector<Trit> spelled(const std::string& s) {
    std::vector<Trit> out;
    for (char c : s) out.push_back(c == '+' ? 1 : c == '-' ? -1 : 0);
    return out;
}

template <typename F>
ErrorCode error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Io;
}

std::size_t hamming(std::span<const Trit> a, std::span<const Trit> b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

}  // namespace

TEST_CASE("structure codes are offset binary expansions") {
    const StructCodeTable t(4);
    const auto code = [&](StructureOp op) {
        auto c = t.code(op);
        return std::vector<Trit>(c.begin(), c.end());
    };
    CHECK(code(StructureOp::LeftRight) == spelled("---+"));
    CHECK(code(StructureOp::AboveBelow) == spelled("--+-"));
    CHECK(code(StructureOp::FullSurround) == spelled("--++"));
    CHECK(code(StructureOp::Overlaid) == spelled("+-+-"));
    const StructCodeTable wide(6);
    CHECK(std::vector<Trit>(wide.code(StructureOp::Overlaid).begin(), wide.code(StructureOp::Overlaid).end()) ==
          spelled("--+-+-"));
    CHECK(error_of([] { StructCodeTable small(3); }) == ErrorCode::ParamsTooSmall);
}

TEST_CASE("generated radical codes are seeded, distinct and order independent") {
    std::vector<RadicalId> r{{"口"}, {"木"}, {"日"}, {"月"}, {"女"}, {"子"}};
    const RadicalCodeSet a = gen_radical_codes(r, 36, 9);
    std::vector<RadicalId> shuffled{{"子"}, {"日"}, {"口"}, {"女"}, {"木"}, {"月"}, {"口"}};
    const RadicalCodeSet b = gen_radical_codes(shuffled, 36, 9);
    CHECK(a == b);
    CHECK(a.size() == 6);
    const RadicalCodeSet c = gen_radical_codes(r, 36, 10);
    CHECK(!(a == c));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (Trit v : a.code(i)) CHECK((v == 1 || v == -1));
        for (std::size_t j = i + 1; j < a.size(); ++j) CHECK(hamming(a.code(i), a.code(j)) >= 1);
    }
}

TEST_CASE("minimum Hamming distance is enforced") {
    std::vector<RadicalId> r;
    for (int k = 0; k < 30; ++k) r.push_back({std::string(1, static_cast<char>('A' + k))});
    const RadicalCodeSet s = gen_radical_codes(r, 36, 4, 10);
    CHECK(s.min_hamming_distance() >= 10);
    std::size_t brute = 36;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) brute = std::min(brute, hamming(s.code(i), s.code(j)));
    }
    CHECK(s.min_hamming_distance() == brute);
}

TEST_CASE("code capacity") {
    std::vector<RadicalId> r{{"a"}, {"b"}, {"c"}, {"d"}, {"e"}};
    CHECK(error_of([&] { gen_radical_codes(r, 2, 1); }) == ErrorCode::CapacityExceeded);
    CHECK(gen_radical_codes({{"a"}, {"b"}, {"c"}, {"d"}}, 2, 1).size() == 4);
    CHECK(error_of([&] { gen_radical_codes(r, 4, 1, 4); }) == ErrorCode::CapacityExceeded);
}

TEST_CASE("prototype files") {
    const RadicalCodeSet s = parse_prototype_codes("# protos\n口\t++--\n木\t+-+-\n", 4, "p.txt");
    CHECK(s.size() == 2);
    CHECK(s.provenance().kind == CodeProvenance::Kind::PrototypeFile);
    CHECK(std::vector<Trit>(s.code(*s.find({"木"})).begin(), s.code(*s.find({"木"})).end()) == spelled("+-+-"));
    CHECK(error_of([] { parse_prototype_codes("口\t++-\n", 4, "p"); }) == ErrorCode::WrongLength);
    CHECK(error_of([] { parse_prototype_codes("口\t0000\n", 4, "p"); }) == ErrorCode::ZeroVector);
    CHECK(error_of([] { parse_prototype_codes("口\t++x-\n", 4, "p"); }) == ErrorCode::BadFormat);
    CHECK(error_of([] { parse_prototype_codes("口\t++--\n口\t+-+-\n", 4, "p"); }) == ErrorCode::DuplicateRadical);
    CHECK(error_of([] { parse_prototype_codes("口\t++--\n木\t++--\n", 4, "p"); }) == ErrorCode::DuplicateCode);
    CHECK(error_of([] { parse_prototype_codes("口 ++--\n", 4, "p"); }) == ErrorCode::BadFormat);
}

TEST_CASE("encoding assembles structure blocks then radical blocks") {
    const CodeParams p{3, 4, 4, 3};  // 3 structure slots, 3 radical positions, t = 24
    const RadicalCodeSet radicals = parse_prototype_codes("木\t++++\n日\t+-+-\n月\t--++\n", 4, "r");
    const StructCodeTable structs(4);
    const auto code = encode_char(parse_ids("⿰⿱木日月"), structs, radicals, p);
    // slot 0 ⿰, slot 1 ⿱, slot 2 radical (no structure); BFS radicals 月 木 日.
    const std::vector<Trit> expected = spelled("---+" "--+-" "0000" "--++" "++++" "+-+-");
    CHECK(code == expected);
    const auto single = encode_char(parse_ids("木"), structs, radicals, p);
    CHECK(single == spelled("0000" "0000" "0000" "++++" "0000" "0000"));
    CHECK(error_of([&] { encode_char(parse_ids("⿰木火"), structs, radicals, p); }) == ErrorCode::UnknownRadical);
}

TEST_CASE("assembled codebook") {
    const Codebook cb = toy_codebook();
    CHECK(cb.size() == 6);
    CHECK(cb.code_length() == 384);
    CHECK(cb.matrix().size() == 6 * 384);
    std::set<std::vector<Trit>> rows;
    for (std::size_t i = 0; i < cb.size(); ++i) {
        auto r = cb.row(i);
        rows.insert(std::vector<Trit>(r.begin(), r.end()));
        std::size_t nnz = 0;
        for (Trit v : r) nnz += v != 0;
        CHECK(cb.row_weight(i) == nnz);
    }
    CHECK(rows.size() == cb.size());
    CHECK(cb.blank_row().size() == 384);
    for (Trit v : cb.blank_row()) CHECK((v == 1 || v == -1));
    CHECK(rows.count(std::vector<Trit>(cb.blank_row().begin(), cb.blank_row().end())) == 0);
    CHECK(cb.index_of("林") == 4u);
    CHECK(!cb.index_of("火"));
    // 好 = ⿰女子: one structure block and two radical blocks.
    CHECK(cb.row_weight(0) == 4 + 2 * 36);
    CHECK(cb.row_weight(3) == 36);
}

TEST_CASE("zero-shot encoding matches an assembled row") {
    const Codebook cb = toy_codebook();
    CHECK(cb.encode(parse_ids("⿰木木")) == std::vector<Trit>(cb.row(4).begin(), cb.row(4).end()));
}

TEST_CASE("building is deterministic") {
    CHECK(toy_codebook() == toy_codebook());
    CHECK(!(toy_codebook(CodeParams{}, 3) == toy_codebook(CodeParams{}, 4)));
}

TEST_CASE("construction errors") {
    const CodeParams p;
    CHECK(error_of([&] {
              build_codebook(entries_from({{"好", "⿰女子"}, {"好", "⿰女子"}}), p, 1);
          }) == ErrorCode::DuplicateCharacter);
    CHECK(error_of([&] {
              build_codebook(entries_from({{"好", "⿰女子"}, {"奻", "⿰女子"}}), p, 1);
          }) == ErrorCode::CodeCollision);
    CHECK(error_of([&] { build_codebook(entries_from({{"x", "⿰⿰⿰⿰⿰口口口口口口"}}), p, 1); }) ==
          ErrorCode::TreeTooDeep);
    const CodeParams narrow{5, 4, 36, 2};
    CHECK(error_of([&] { build_codebook(entries_from({{"x", "⿰口⿰口口"}}), narrow, 1); }) ==
          ErrorCode::RadicalOverflow);
}

TEST_CASE("explicit blank rows are checked") {
    const CodeParams p{2, 4, 4, 2};
    const RadicalCodeSet r = parse_prototype_codes("a\t++++\nb\t+-+-\n", 4, "r");
    auto entries = entries_from({{"x", "⿰ab"}});
    const std::vector<Trit> good(12, 1);
    const Codebook cb = Codebook::assemble(p, entries, r, good, 1);
    CHECK(std::vector<Trit>(cb.blank_row().begin(), cb.blank_row().end()) == good);
    CHECK(error_of([&] { Codebook::assemble(p, entries, r, std::vector<Trit>(11, 1), 1); }) ==
          ErrorCode::WrongLength);
    std::vector<Trit> zero = good;
    zero[3] = 0;
    CHECK(error_of([&] { Codebook::assemble(p, entries, r, zero, 1); }) == ErrorCode::BadFormat);
    // ⿰ab at L_S=4 is "---+" then a then b, all ±1: same as the blank row would be.
    const std::vector<Trit> clash = spelled("---+" "++++" "+-+-");
    CHECK(error_of([&] { Codebook::assemble(p, entries, r, clash, 1); }) == ErrorCode::CodeCollision);
}

TEST_CASE("compression arithmetic") {
    const CompressionStats s = compression_stats(384, 512, 3755);
    CHECK(s.cls_params_onehot == 512u * 3755u);
    CHECK(s.cls_params_multihot == 512u * 384u);
    CHECK(std::fabs(s.ratio - (1.0 - 384.0 / 3755.0)) <= 1e-12);
    CHECK(std::fabs(s.ratio - 0.8977) < 5e-5);
    CHECK(compression_stats(384, 512, 384).ratio == 0.0);
    const CompressionStats b = compression_stats(384, 512, 3755, true);
    CHECK(b.cls_params_onehot == 513u * 3755u);
    CHECK(std::fabs(b.ratio - s.ratio) <= 1e-12);
    CHECK(std::llround(classes_for_ratio(384, 0.926)) == 5189);
    CHECK(std::fabs(1.0 - 384.0 / classes_for_ratio(384, 0.926) - 0.926) <= 1e-12);
}
