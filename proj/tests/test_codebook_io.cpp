#include "hiercode/codebook_io.hpp"
#include "hiercode/error.hpp"
#include "hiercode/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace hiercode;
using namespace hiercode::testing;

namespace {

ErrorCode load_error(std::span<const std::uint8_t> bytes) {
    try {
        deserialize(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
    const std::uint8_t a[] = {'a'};
    CHECK(fnv1a64(a) == 0xaf63dc4c8601ec8cULL);
    const std::uint8_t foobar[] = {'f', 'o', 'o', 'b', 'a', 'r'};
    CHECK(fnv1a64(foobar) == 0x85944171f73967e8ULL);
}

TEST_CASE("trit packing") {
    const std::vector<Trit> t{0, 1, -1, 1, -1};
    const auto packed = pack_trits(t);
    REQUIRE(packed.size() == 2);
    CHECK(packed[0] == 0b01'10'01'00);
    CHECK(packed[1] == 0b00'00'00'10);
    CHECK(unpack_trits(packed, t.size()) == t);
    std::vector<std::uint8_t> bad{0b11};
    CHECK_THROWS_AS(unpack_trits(bad, 1), Error);
}

TEST_CASE("round trip is bit identical") {
    const Codebook cb = toy_codebook();
    const auto bytes = serialize(cb);
    CHECK(bytes[0] == 'H');
    CHECK(bytes[3] == 'K');
    CHECK(bytes[4] == 1);
    const Codebook back = deserialize(bytes);
    CHECK(back == cb);
    CHECK(serialize(back) == bytes);
}

TEST_CASE("prototype provenance survives") {
    const CodeParams p{2, 4, 4, 2};
    const RadicalCodeSet r = parse_prototype_codes("a\t++++\nb\t+-+-\n", 4, "protos.txt");
    const Codebook cb = build_codebook(entries_from({{"x", "⿰ab"}, {"y", "a"}}), r, p, 5);
    const Codebook back = deserialize(serialize(cb));
    CHECK(back == cb);
    CHECK(back.radicals().provenance().source == "protos.txt");
}

TEST_CASE("every single-byte corruption is detected") {
    const auto bytes = serialize(toy_codebook());
    std::mt19937_64 rng(3);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        auto copy = bytes;
        copy[i] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        const ErrorCode code = load_error(copy);
        const bool rejected = code == ErrorCode::Corrupt || code == ErrorCode::VersionMismatch;
        CHECK(rejected);
    }
}

TEST_CASE("version and truncation") {
    auto bytes = serialize(toy_codebook());
    auto versioned = bytes;
    versioned[4] = 2;
    CHECK(load_error(versioned) == ErrorCode::VersionMismatch);
    CHECK(load_error(std::span(bytes).first(bytes.size() - 1)) == ErrorCode::Corrupt);
    CHECK(load_error(std::span(bytes).first(3)) == ErrorCode::Corrupt);
}

TEST_CASE("files") {
    const auto path = std::filesystem::temp_directory_path() / "hiercode_io_test.hcb";
    const Codebook cb = toy_codebook();
    save_codebook(cb, path);
    CHECK(load_codebook(path) == cb);
    std::filesystem::remove(path);
    try {
        load_codebook(path);
        FAIL("missing file loaded");
    } catch (const Error& e) {
        CHECK(e.is_io());
        CHECK(std::string(e.what()).find(path.string()) != std::string::npos);
    }
}

TEST_CASE("large synthetic codebook round trip") {
    const Codebook cb = build_codebook(synthetic_charset({40, 1000, 3, 2}), CodeParams{}, 2);
    const auto bytes = serialize(cb);
    const Codebook back = deserialize(bytes);
    CHECK(back == cb);
    CHECK(serialize(back) == bytes);
}
