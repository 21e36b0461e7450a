#include <catch2/catch_amalgamated.hpp>

#include "mcpage/locality.hpp"
#include "mcpage/policies.hpp"
#include "mcpage/scan.hpp"

using namespace mcpage;

namespace {

ConcaveFunction make_f(std::size_t p, std::vector<double> table) {
    ConcaveFunction f;
    f.core_count = p;
    f.table = std::move(table);
    return f;
}

MulticoreInput two_core(RequestSequence a, RequestSequence b) {
    MulticoreInput in;
    in.sequences = {std::move(a), std::move(b)};
    return in;
}

}  // namespace

TEST_CASE("concave validation", "[locality][concave]") {
    SECTION("steady unit growth is valid") {
        CHECK(validate_concave(make_f(2, {2, 3, 4, 5})).ok);
        CHECK(validate_concave(make_f(2, {2, 3, 4, 5}), true).ok);
    }
    SECTION("decelerating growth fails the printed inequality") {
        auto v = validate_concave(make_f(2, {2, 4, 5}));
        CHECK_FALSE(v.ok);
        CHECK(v.offending_n == 1);
    }
    SECTION("skipped integers fail surjectivity") {
        auto v = validate_concave(make_f(2, {2, 2.5, 4}));
        CHECK_FALSE(v.ok);
        CHECK(v.message.find("3") != std::string::npos);
    }
    SECTION("the two growth modes disagree") {
        ConcaveFunction f = make_f(2, {2, 3, 4, 4.5, 4.5});
        CHECK_FALSE(validate_concave(f).ok);
        CHECK(validate_concave(f, true).ok);
    }
    SECTION("f(1) must be the core count") {
        CHECK_FALSE(validate_concave(make_f(2, {3, 4})).ok);
    }
    SECTION("decreasing tables are rejected") {
        CHECK_FALSE(validate_concave(make_f(2, {2, 1})).ok);
    }
    SECTION("tables need two entries") {
        CHECK_FALSE(validate_concave(make_f(2, {2})).ok);
    }
}

TEST_CASE("f extends by its final difference", "[locality][concave]") {
    ConcaveFunction f = make_f(2, {2, 3});
    CHECK(f.at(1) == 2.0);
    CHECK(f.at(2) == 3.0);
    CHECK(f.at(5) == 6.0);
    ConcaveFunction g = make_f(2, {2, 2.5});
    CHECK(g.at(4) == 3.5);
}

TEST_CASE("window profiles", "[locality][window]") {
    SECTION("unit windows pick one request per core") {
        WindowProfile p = window_profile(two_core({0, 1}, {2, 3}), 2);
        CHECK(p.at(1) == 2);
        CHECK(p.at(2) == 4);
    }
    SECTION("a single page never exceeds one") {
        WindowProfile p = window_profile(two_core({0, 0, 0}, {0, 0}), 3);
        for (std::size_t w = 1; w <= 3; ++w) CHECK(p.at(w) == 1);
    }
    SECTION("offsets are chosen independently per core") {
        WindowProfile p = window_profile(two_core({0, 1, 0}, {1, 2, 1}), 3);
        CHECK(p.at(2) == 3);
    }
    SECTION("width beyond the longest sequence is rejected") {
        CHECK_THROWS_AS(window_profile(two_core({0, 1}, {2}), 3), std::out_of_range);
    }
    SECTION("budget overruns raise an explicit error") {
        MulticoreInput in = two_core(RequestSequence(12, 0), RequestSequence(12, 1));
        CHECK_THROWS_AS(window_profile(in, 1, 10), BudgetError);
    }
    SECTION("profile bounds over the scan") {
        for_each_input(UniverseScan::simplex(3, 2, 4), [&](const MulticoreInput& in) {
            std::size_t longest = 0;
            for (const auto& s : in.sequences) longest = std::max(longest, s.size());
            if (longest == 0) return;
            WindowProfile p = window_profile(in, longest);
            for (std::size_t w = 1; w <= longest; ++w) {
                CHECK(p.at(w) <= std::min<std::size_t>(3, 2 * w));
                if (w > 1) CHECK(p.at(w) >= p.at(w - 1));
            }
        });
    }
}

TEST_CASE("consistency checking", "[locality][consistent]") {
    SECTION("one page is consistent with any valid f") {
        CHECK(is_consistent(two_core({0, 0, 0}, {0, 0}), make_f(2, {2, 3})).consistent);
    }
    SECTION("four distinct pages break f(2)=3 with a witness") {
        auto v = is_consistent(two_core({0, 1}, {2, 3}), make_f(2, {2, 3, 4}));
        CHECK_FALSE(v.consistent);
        CHECK(v.witness_width == 2);
        CHECK(v.witness_distinct == 4);
    }
    SECTION("duplicating a request preserves consistency") {
        const ConcaveFunction f = make_f(2, {2, 3});
        for_each_input(UniverseScan::simplex(4, 2, 4), [&](const MulticoreInput& in) {
            if (!is_consistent(in, f).consistent) return;
            for (std::size_t c = 0; c < in.core_count(); ++c)
                for (std::size_t i = 0; i < in.sequences[c].size(); ++i) {
                    MulticoreInput dup = in;
                    dup.sequences[c].insert(dup.sequences[c].begin() + i, in.sequences[c][i]);
                    CHECK(is_consistent(dup, f).consistent);
                }
        });
    }
}

TEST_CASE("complement transformation", "[locality][complement]") {
    SECTION("pointwise swap") {
        MulticoreInput in;
        in.sequences = {{0, 1, 0}};
        CHECK(complement_input(in, 0, 1).sequences == std::vector<RequestSequence>{{1, 0, 1}});
    }
    SECTION("identical pages are rejected") {
        MulticoreInput in;
        in.sequences = {{0}};
        CHECK_THROWS_AS(complement_input(in, 2, 2), std::invalid_argument);
    }
    SECTION("involution, profile and consistency invariance") {
        const ConcaveFunction f = make_f(2, {2, 3});
        for_each_input(UniverseScan::simplex(3, 2, 4), [&](const MulticoreInput& in) {
            MulticoreInput c = complement_input(in, 0, 2);
            CHECK(complement_input(c, 0, 2) == in);
            std::size_t longest = 0;
            for (const auto& s : in.sequences) longest = std::max(longest, s.size());
            if (longest > 0) {
                CHECK(window_profile(in, longest).max_distinct ==
                      window_profile(c, longest).max_distinct);
            }
            CHECK(is_consistent(in, f).consistent == is_consistent(c, f).consistent);
        });
    }
}

TEST_CASE("local order lemma on one instance", "[locality][order]") {
    const ConcaveFunction f = make_f(2, {2, 3});
    const SimParams params{2, 2, 2};
    const MulticoreInput in = two_core({0, 0}, {1, 2});

    SECTION("applicable instance holds") {
        auto rep = check_local_order(in, LruPolicy{}, params, f, 1, 0, 3);
        CHECK(rep.status == LocalOrderReport::Status::Holds);
        CHECK(rep.suffix_has_beta);
        REQUIRE(rep.first_beta_in_suffix.has_value());
        CHECK(*rep.first_beta_in_suffix == 2);
        CHECK_FALSE(rep.first_delta_in_suffix.has_value());
    }
    SECTION("delta after the last prefix beta disqualifies") {
        auto rep = check_local_order(in, LruPolicy{}, params, f, 3, 1, 0);
        CHECK(rep.status == LocalOrderReport::Status::NotApplicable);
        CHECK(rep.reason == "delta follows the last prefix beta");
    }
    SECTION("beta missing from the prefix disqualifies") {
        auto rep = check_local_order(in, LruPolicy{}, params, f, 1, 2, 3);
        CHECK(rep.status == LocalOrderReport::Status::NotApplicable);
        CHECK(rep.reason == "beta not in the schedule prefix");
    }
    SECTION("a still-consistent complement disqualifies") {
        auto rep = check_local_order(in, LruPolicy{}, params, f, 1, 0, 1);
        CHECK(rep.status == LocalOrderReport::Status::NotApplicable);
        CHECK(rep.reason == "complemented suffix is still consistent");
    }
    SECTION("inconsistent inputs disqualify") {
        auto rep =
            check_local_order(two_core({0, 1}, {2, 3}), LruPolicy{}, params, f, 1, 0, 3);
        CHECK(rep.status == LocalOrderReport::Status::NotApplicable);
        CHECK(rep.reason == "input not consistent with f");
    }
    SECTION("j must sit inside the run") {
        auto rep = check_local_order(in, LruPolicy{}, params, f, 0, 0, 3);
        CHECK(rep.status == LocalOrderReport::Status::NotApplicable);
        CHECK(rep.reason == "j outside [1, makespan)");
    }
}

TEST_CASE("local order lemma has no counterexample on the scan", "[locality][order]") {
    const ConcaveFunction f = make_f(2, {2, 3});
    const SimParams params{2, 2, 2};
    std::size_t holds = 0;
    for (const char* name : {"lru", "fifo"}) {
        auto policy = make_policy(name);
        for_each_input(UniverseScan::simplex(4, 2, 4), [&](const MulticoreInput& in) {
            SimResult r = simulate_free(in, *policy, params);
            for (Timestep j = 1; j < r.makespan(); ++j)
                for (Page b = 0; b < 4; ++b)
                    for (Page d = 0; d < 4; ++d) {
                        if (b == d) continue;
                        auto rep = check_local_order(in, *policy, params, f, j, b, d);
                        CHECK(rep.status != LocalOrderReport::Status::Violated);
                        holds += rep.status == LocalOrderReport::Status::Holds;
                    }
        });
    }
    CHECK(holds == 384);
}
