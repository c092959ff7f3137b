#include <doctest.h>

#include <random>
#include <string>

#include "sbopt/tsplib.hpp"

using namespace sbopt;

namespace {

const std::string kMinimalDoc =
    "NAME: tiny\n"
    "TYPE: ATSP\n"
    "DIMENSION: 3\n"
    "EDGE_WEIGHT_TYPE: EXPLICIT\n"
    "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
    "EDGE_WEIGHT_SECTION\n"
    "0 1 2\n"
    "3 0 4\n"
    "5 6 0\n"
    "EOF\n";

}  // namespace

TEST_CASE("tsplib parses a minimal explicit full-matrix document") {
    const auto inst = parse_atsp(kMinimalDoc);
    CHECK(inst.name == "tiny");
    CHECK(inst.city_count == 3);
    REQUIRE(inst.distance.size() == 3);
    CHECK(inst.distance[0] == std::vector<double>{0, 1, 2});
    CHECK(inst.distance[1] == std::vector<double>{3, 0, 4});
    CHECK(inst.distance[2] == std::vector<double>{5, 6, 0});
}

TEST_CASE("tsplib tolerates blank lines and arbitrary weight wrapping") {
    const auto inst = parse_atsp(
        "DIMENSION : 3\n\n"
        "EDGE_WEIGHT_SECTION\n"
        "0 1\n2 3\n\n0 4 5 6 0\n"
        "EOF\n");
    CHECK(inst.city_count == 3);
    CHECK(inst.distance[1][2] == 4);
}

TEST_CASE("tsplib rejects malformed documents with line context") {
    // wrong weight count for the declared dimension
    CHECK_THROWS_AS(parse_atsp("DIMENSION: 3\nEDGE_WEIGHT_SECTION\n0 1 2 3 0 4 5 6\nEOF\n"),
                    TsplibParseError);
    CHECK_THROWS_AS(parse_atsp("EDGE_WEIGHT_SECTION\n0\nEOF\n"), TsplibParseError);
    CHECK_THROWS_AS(parse_atsp("DIMENSION: 0\nEDGE_WEIGHT_SECTION\nEOF\n"), TsplibParseError);
    CHECK_THROWS_AS(parse_atsp("DIMENSION: x\nEDGE_WEIGHT_SECTION\nEOF\n"), TsplibParseError);
    CHECK_THROWS_AS(parse_atsp("DIMENSION: 1\nno colon here\nEDGE_WEIGHT_SECTION\n0\nEOF\n"),
                    TsplibParseError);
    CHECK_THROWS_AS(parse_atsp("DIMENSION: 1\nEDGE_WEIGHT_SECTION\nabc\nEOF\n"),
                    TsplibParseError);
    CHECK_THROWS_AS(parse_atsp("DIMENSION: 1\n"), TsplibParseError);  // no section

    try {
        parse_atsp("DIMENSION: 1\nEDGE_WEIGHT_SECTION\n0 zzz\nEOF\n");
        FAIL("expected TsplibParseError");
    } catch (const TsplibParseError& e) {
        CHECK(e.line_number == 3);
    }
}

TEST_CASE("tsplib rejects unsupported variants explicitly") {
    CHECK_THROWS_WITH_AS(
        parse_atsp("TYPE: TSP\nDIMENSION: 1\nEDGE_WEIGHT_SECTION\n0\nEOF\n"),
        doctest::Contains("unsupported TYPE"), TsplibParseError);
    CHECK_THROWS_WITH_AS(
        parse_atsp("EDGE_WEIGHT_TYPE: GEO\nDIMENSION: 1\nEDGE_WEIGHT_SECTION\n0\nEOF\n"),
        doctest::Contains("unsupported EDGE_WEIGHT_TYPE"), TsplibParseError);
    CHECK_THROWS_WITH_AS(
        parse_atsp("EDGE_WEIGHT_FORMAT: UPPER_ROW\nDIMENSION: 1\nEDGE_WEIGHT_SECTION\n0\nEOF\n"),
        doctest::Contains("unsupported EDGE_WEIGHT_FORMAT"), TsplibParseError);
}

TEST_CASE("tsplib serialize/parse round trip is lossless") {
    auto inst = parse_atsp(kMinimalDoc);
    inst.distance[0][1] = 1.0 / 3.0;
    inst.distance[2][1] = 1e-17;
    const auto again = parse_atsp(serialize_atsp(inst));
    CHECK(again.name == inst.name);
    CHECK(again.city_count == inst.city_count);
    CHECK(again.distance == inst.distance);
}

TEST_CASE("tsplib parser never crashes on mangled input") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> pos(0, static_cast<int>(kMinimalDoc.size() - 1));
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string doc = kMinimalDoc;
        for (int k = 0; k < 3; ++k) doc[static_cast<std::size_t>(pos(rng))] =
            static_cast<char>(byte(rng));
        try {
            (void)parse_atsp(doc);
        } catch (const TsplibParseError&) {
            // expected for most mutations
        }
    }
}

TEST_CASE("tsplib missing file raises a configuration error") {
    CHECK_THROWS_AS(parse_atsp_file("/nonexistent/nowhere.atsp"), ConfigError);
}

TEST_CASE("tsplib bundled ftv44 instance loads with the declared dimension") {
    const auto inst = parse_atsp_file(std::string(SBOPT_TEST_DATA_DIR) + "/ftv44.atsp");
    CHECK(inst.name == "ftv44");
    CHECK(inst.city_count == 45);
    REQUIRE(inst.distance.size() == 45);
    for (const auto& row : inst.distance) REQUIRE(row.size() == 45);
    CHECK(inst.distance[0][0] == 0.0);
}
