#include <catch2/catch_amalgamated.hpp>

#include "mcpage/core.hpp"

using namespace mcpage;

TEST_CASE("validate_input accepts in-universe requests") {
    Universe u{5};
    MulticoreInput in{{{0, 1, 0, 4}, {2, 3, 4, 1}}};
    auto r = validate_input(in, u);
    CHECK(r.ok);
}

TEST_CASE("validate_input names the first offending request") {
    Universe u{5};
    MulticoreInput in{{{0, 1}, {0, 1, 7}}};
    auto r = validate_input(in, u);
    REQUIRE_FALSE(r.ok);
    CHECK(r.core == 2);
    CHECK(r.index == 3);
    CHECK(r.message.find("core 2") != std::string::npos);
    CHECK(r.message.find("index 3") != std::string::npos);
}

TEST_CASE("empty sequences are valid") {
    Universe u{1};
    MulticoreInput in{{{}, {}}};
    CHECK(validate_input(in, u).ok);
    CHECK(in.total_requests() == 0);
}

TEST_CASE("canonical order: total length, then length vector, then content") {
    MulticoreInput a{{{0}, {}}};
    MulticoreInput b{{{}, {0}}};
    MulticoreInput c{{{0}, {1}}};
    MulticoreInput d{{{1}, {0}}};
    CHECK(canonical_less(a, c));   // total 1 < 2
    CHECK(canonical_less(b, a));   // (0,1) < (1,0)
    CHECK(canonical_less(c, d));   // content
    CHECK_FALSE(canonical_less(c, c));
}

TEST_CASE("length vector and totals") {
    MulticoreInput in{{{0, 1, 0}, {2}}};
    CHECK(in.core_count() == 2);
    CHECK(in.total_requests() == 4);
    CHECK(in.length_vector() == std::vector<std::size_t>{3, 1});
}

TEST_CASE("page names fall back to p<id>") {
    PageNames names{{"a1", "a2"}};
    CHECK(names.render(0) == "a1");
    CHECK(names.render(1) == "a2");
    CHECK(names.render(7) == "p7");
}

TEST_CASE("sim params validity") {
    CHECK(SimParams{4, 3, 2}.valid());
    CHECK_FALSE(SimParams{0, 3, 2}.valid());
    CHECK_FALSE(SimParams{4, 0, 2}.valid());
    CHECK_FALSE(SimParams{4, 3, 0}.valid());
}
