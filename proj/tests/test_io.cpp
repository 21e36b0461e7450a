#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "mcpage/io.hpp"

using namespace mcpage;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kFig1Json = R"({
  "universe": 5,
  "params": {"k": 4, "tau": 3},
  "sequences": [[0, 1, 0, 4], [2, 3, 4, 1]],
  "names": ["a1", "a2", "a3", "a4", "a5"]
})";

// The fig instance rendered with tracing on. The schedule column carries the
// per-timestep service tuple; bottom marks slots without a usable page.
const char* kFig1Table =
    R"(t  | cache       | P1                            | P2                            | schedule
-------------------------------------------------------------------------------------------
1  | ⊥ ⊥ ⊥ ⊥     | P1 misses, starts fetching a1 | P2 misses, starts fetching a3 | (a1, a3)
2  | ⊥ ⊥ ⊥ ⊥     | P1 is fetching a1             | P2 is fetching a3             | (a1, a3)
3  | ⊥ ⊥ ⊥ ⊥     | P1 completes fetching a1      | P2 completes fetching a3      | (a1, a3)
4  | a1 a3 ⊥ ⊥   | P1 misses, starts fetching a2 | P2 misses, starts fetching a4 | (a2, a4)
5  | a1 a3 ⊥ ⊥   | P1 is fetching a2             | P2 is fetching a4             | (a2, a4)
6  | a1 a3 ⊥ ⊥   | P1 completes fetching a2      | P2 completes fetching a4      | (a2, a4)
7  | a1 a3 a2 a4 | P1 has a hit for a1           | P2 misses, starts fetching a5 | (a1, a5)
8  | a1 ⊥ a2 a4  | P1 misses, waits for a5       | P2 is fetching a5             | (a5, a5)
9  | a1 ⊥ a2 a4  | P1 completes waiting for a5   | P2 completes fetching a5      | (a5, a5)
10 | a1 a5 a2 a4 | P1 has completed its sequence | P2 has a hit for a2           | (-, a2)
)";

InputFile fig1_file() { return input_from_json(Json::parse(kFig1Json)); }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream out(path);
    out << content;
    return path;
}

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MCPAGE_CLI_BINARY) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult res;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

}  // namespace

TEST_CASE("input files parse and round-trip through JSON", "[io][input]") {
    SECTION("the fig instance parses with its alias table") {
        InputFile file = fig1_file();
        CHECK(file.universe.size == 5);
        CHECK(file.params.cache_size == 4);
        CHECK(file.params.fetch_delay == 3);
        CHECK(file.params.core_count == 2);
        CHECK(file.input.sequences ==
              std::vector<RequestSequence>{{0, 1, 0, 4}, {2, 3, 4, 1}});
        CHECK(file.names.render(0) == "a1");
        CHECK(file.names.render(4) == "a5");
    }
    SECTION("serialize then parse is the identity") {
        InputFile file = fig1_file();
        InputFile back = input_from_json(input_to_json(file));
        CHECK(back.universe.size == file.universe.size);
        CHECK(back.params.cache_size == file.params.cache_size);
        CHECK(back.params.fetch_delay == file.params.fetch_delay);
        CHECK(back.input == file.input);
        CHECK(back.names.names == file.names.names);
    }
    SECTION("the names array is optional") {
        Json j = Json::parse(R"({"universe": 2, "params": {"k": 1, "tau": 1},
                                 "sequences": [[0, 1]]})");
        InputFile file = input_from_json(j);
        CHECK(file.names.names.empty());
        CHECK(file.names.render(0) == "p0");
        CHECK_FALSE(input_to_json(file).contains("names"));
    }
    SECTION("out-of-universe pages are rejected with the validator message") {
        Json j = Json::parse(R"({"universe": 2, "params": {"k": 1, "tau": 1},
                                 "sequences": [[0, 7]]})");
        CHECK_THROWS_WITH(input_from_json(j), ContainsSubstring("outside the universe"));
    }
    SECTION("degenerate params and shapes are rejected") {
        CHECK_THROWS_AS(input_from_json(Json::parse(
                            R"({"universe": 2, "params": {"k": 0, "tau": 1},
                                "sequences": [[0]]})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(input_from_json(Json::parse(
                            R"({"universe": 2, "params": {"k": 1, "tau": 1},
                                "sequences": []})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(input_from_json(Json::parse(R"({"universe": 2})")), std::exception);
        CHECK_THROWS_AS(input_from_json(Json::parse(R"([1, 2, 3])")), std::invalid_argument);
    }
}

TEST_CASE("f tables parse and round-trip", "[io][locality]") {
    ConcaveFunction f = f_from_json(Json::parse(R"({"p": 2, "f": [2, 3, 4, 4]})"));
    CHECK(f.core_count == 2);
    CHECK(f.table == std::vector<double>{2, 3, 4, 4});
    ConcaveFunction back = f_from_json(f_to_json(f));
    CHECK(back.core_count == f.core_count);
    CHECK(back.table == f.table);
}

TEST_CASE("the event log round-trips through the JSON schema", "[io][result]") {
    InputFile file = fig1_file();
    LruPolicy lru;
    const SimResult result = simulate_free(file.input, lru, file.params);
    const Json j = result_to_json(result);

    SECTION("the summary fields match the run") {
        CHECK(j.at("makespan") == 10);
        CHECK(j.at("total_time") == 19);
        CHECK(j.at("miss_count") == 6);
        CHECK(j.at("per_core_finish") == Json::parse("[9, 10]"));
        CHECK(j.at("events").size() == result.spans[0].size() + result.spans[1].size());
    }
    SECTION("events are chronological and carry 1-based cores") {
        Timestep last = 0;
        for (const auto& e : j.at("events")) {
            const Timestep begin = e.at("begin").get<Timestep>();
            CHECK(begin >= last);
            last = begin;
            const std::size_t core = e.at("core").get<std::size_t>();
            CHECK(core >= 1);
            CHECK(core <= 2);
        }
    }
    SECTION("parse then serialize is the identity") {
        const SimResult back = result_from_json(j);
        REQUIRE(back.schedule == result.schedule);
        REQUIRE(back.per_core_finish == result.per_core_finish);
        REQUIRE(back.spans.size() == result.spans.size());
        for (std::size_t c = 0; c < result.spans.size(); ++c) {
            REQUIRE(back.spans[c].size() == result.spans[c].size());
            for (std::size_t i = 0; i < result.spans[c].size(); ++i) {
                const ServiceSpan& a = result.spans[c][i];
                const ServiceSpan& b = back.spans[c][i];
                CHECK(a.request_index == b.request_index);
                CHECK(a.page == b.page);
                CHECK(a.begin == b.begin);
                CHECK(a.end == b.end);
                CHECK(a.kind == b.kind);
                CHECK(a.evicted == b.evicted);
            }
        }
        CHECK(result_to_json(back) == j);
    }
    SECTION("unknown span kinds are rejected") {
        CHECK_THROWS_WITH(parse_span_kind("partial_miss"), ContainsSubstring("span kind"));
    }
}

TEST_CASE("relation reports serialize with their witnesses", "[io][report]") {
    RelationReport rep;
    rep.verdict = Verdict::ANoWorse;
    rep.strict = true;
    rep.witness = MulticoreInput{{{0, 1}, {2}}};
    rep.witness_cost_a = 3;
    rep.witness_cost_b = 5;
    rep.horizon = 6;

    Json j = relation_to_json(rep);
    CHECK(j.at("verdict") == "A<=B");
    CHECK(j.at("strict") == true);
    CHECK(j.at("horizon") == 6);
    CHECK_FALSE(j.contains("gap_threshold"));
    CHECK(j.at("witness").at("sequences") == Json::parse("[[0, 1], [2]]"));
    CHECK(j.at("witness").at("cost_a") == 3);
    CHECK(j.at("witness").at("cost_b") == 5);

    rep.witness.reset();
    rep.gap_threshold = 7;
    j = relation_to_json(rep);
    CHECK(j.at("gap_threshold") == 7);
    CHECK_FALSE(j.contains("witness"));
}

TEST_CASE("finite mappings serialize with nulls for disengaged elements", "[io][report]") {
    FiniteMapping m;
    m.domain_costs = {1, 1, 2, 2};
    m.image_costs = {3, 4, 5, 6};
    m.map = {std::size_t{0}, std::size_t{0}, std::size_t{2}, std::nullopt};

    const Json j = mapping_to_json(m);
    CHECK(j.at("map")[0] == 0);
    CHECK(j.at("map")[3].is_null());
    CHECK(j.at("injective") == false);
    CHECK(j.at("surjective") == false);
    CHECK(j.at("cost_respecting") == true);

    const FiniteMapping back = mapping_from_json(j);
    CHECK(back.domain_costs == m.domain_costs);
    CHECK(back.image_costs == m.image_costs);
    CHECK(back.map == m.map);
}

TEST_CASE("bounded and consistency reports serialize", "[io][report]") {
    SECTION("an unbounded miss-count report carries its witness family") {
        LruPolicy lru;
        const BoundedCostReport rep = bounded_shared_cost_check(
            Measure::MissCount, lru, Universe{2}, SimParams{1, 1, 1}, 2);
        const Json j = bounded_to_json(rep);
        CHECK(j.at("measure") == "miss_count");
        CHECK(j.at("bounded") == false);
        CHECK(j.at("witness_cost") == 1);
        CHECK(j.at("witness_family").size() == rep.witness_family.size());
    }
    SECTION("a bounded total-time report has no witness keys") {
        LruPolicy lru;
        const BoundedCostReport rep = bounded_shared_cost_check(
            Measure::TotalTime, lru, Universe{2}, SimParams{1, 1, 1}, 2);
        const Json j = bounded_to_json(rep);
        CHECK(j.at("bounded") == true);
        CHECK_FALSE(j.contains("witness_cost"));
    }
    SECTION("consistency verdicts only carry a witness on failure") {
        Json ok = consistency_to_json(ConsistencyVerdict{});
        CHECK(ok.at("consistent") == true);
        CHECK_FALSE(ok.contains("witness_width"));
        Json bad = consistency_to_json(ConsistencyVerdict{false, 2, 4});
        CHECK(bad.at("witness_width") == 2);
        CHECK(bad.at("witness_distinct") == 4);
    }
    SECTION("pi reports summarize the case histogram") {
        PiSurjectionReport rep;
        rep.domain = {MulticoreInput{{{0}}}, MulticoreInput{{{1}}}};
        rep.case_tags = {0, 2};
        rep.multiplicity = {1, 1};
        rep.max_multiplicity = 1;
        rep.covers_codomain = true;
        const Json j = pi_report_to_json(rep);
        CHECK(j.at("domain_size") == 2);
        CHECK(j.at("case_histogram").at("case0") == 1);
        CHECK(j.at("case_histogram").at("case2") == 1);
        CHECK(j.at("cost_ok") == true);
    }
}

TEST_CASE("CSV renders cost tables and ratio curves", "[io][csv]") {
    SECTION("cost tables list every policy and measure column") {
        const std::vector<MulticoreInput> inputs{MulticoreInput{{{0}}},
                                                 MulticoreInput{{{0, 1}}}};
        const std::string csv =
            cost_csv(inputs, {"lru", "fifo"},
                     {Measure::TotalTime, Measure::Makespan, Measure::MissCount},
                     SimParams{1, 2, 1});
        CHECK(csv ==
              "id,lengths,lru:total_time,lru:makespan,lru:miss_count,"
              "fifo:total_time,fifo:makespan,fifo:miss_count\n"
              "0,1,2,2,1,2,2,1\n"
              "1,2,4,4,2,4,4,2\n");
    }
    SECTION("ratio curves print one row per size") {
        RatioCurveReport rep;
        rep.rows = {RatioRow{1, 6, 6, 6, 1.0}, RatioRow{2, 12, 12, 6, 2.0}};
        CHECK(ratio_curve_csv(rep) ==
              "size,n,cost_online,cost_baseline,ratio\n"
              "1,6,6,6,1\n"
              "2,12,12,6,2\n");
    }
}

TEST_CASE("the trace table matches the figure", "[io][trace]") {
    InputFile file = fig1_file();
    LruPolicy lru;
    SimOptions opts;
    opts.record_trace = true;
    opts.names = file.names;
    const SimResult result = simulate_free(file.input, lru, file.params, opts);
    CHECK(render_trace(result, file.names) == kFig1Table);

    const SimResult untraced = simulate_free(file.input, lru, file.params);
    CHECK_THROWS_WITH(render_trace(untraced, file.names),
                      ContainsSubstring("tracing on"));
}

TEST_CASE("the command line tool reproduces the figure", "[io][cli]") {
    const std::string path = write_temp("mcpage_io_fig1.json", kFig1Json);

    SECTION("simulate emits the table, the schedules and the costs") {
        const CmdResult res = run_cli("simulate " + path);
        REQUIRE(res.status == 0);
        const std::string expected =
            "config: {\"command\":\"simulate\",\"input\":\"" + path +
            "\",\"policy\":\"lru\",\"params\":{\"k\":4,\"tau\":3,\"p\":2}}\n" + kFig1Table +
            "P1 schedule: a1 a1 a1 a2 a2 a2 a1 a5 a5\n"
            "P2 schedule: a3 a3 a3 a4 a4 a4 a5 a5 a5 a2\n"
            "makespan: 10\n"
            "total_time: 19\n"
            "miss_count: 6\n";
        CHECK(res.out == expected);
    }
    SECTION("trace emits the table alone") {
        const CmdResult res = run_cli("trace " + path);
        REQUIRE(res.status == 0);
        const std::string expected =
            "config: {\"command\":\"trace\",\"input\":\"" + path +
            "\",\"policy\":\"lru\",\"params\":{\"k\":4,\"tau\":3,\"p\":2}}\n" + kFig1Table;
        CHECK(res.out == expected);
    }
    SECTION("the JSON event log round-trips") {
        const CmdResult res = run_cli("simulate " + path + " --format json");
        REQUIRE(res.status == 0);
        const Json doc = Json::parse(res.out);
        const SimResult back = result_from_json(doc.at("result"));
        CHECK(result_to_json(back) == doc.at("result"));
        CHECK(doc.at("result").at("miss_count") == 6);
    }
    SECTION("repeated runs are byte-identical") {
        const CmdResult first = run_cli("simulate " + path);
        const CmdResult second = run_cli("simulate " + path);
        const CmdResult third = run_cli("simulate " + path);
        CHECK(first.out == second.out);
        CHECK(second.out == third.out);
    }
}

TEST_CASE("the command line tool computes relation verdicts", "[io][cli]") {
    SECTION("lru and fifo are equivalent at the small horizon") {
        const CmdResult res =
            run_cli("check-relation lru fifo --measure total-time --max-len 3");
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("verdict: equivalent"));
    }
    SECTION("lru dominates fwf with a strict witness") {
        const CmdResult res = run_cli("check-relation lru fwf --measure total-time --max-len 3");
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("verdict: lru <= fwf, strict"));
        CHECK_THAT(res.out, ContainsSubstring("witness:"));
    }
    SECTION("cyclic mode reports the gap threshold") {
        const CmdResult res = run_cli("check-relation lru fwf --mode cyclic --ceiling 7");
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("verdict: lru <= fwf, strict"));
        CHECK_THAT(res.out, ContainsSubstring("gap_threshold: 7"));
    }
    SECTION("the cost table CSV ships both policies") {
        const std::string csv_path = temp_path("mcpage_io_costs.csv");
        const CmdResult res = run_cli("check-relation lru fifo --max-len 1 --csv " + csv_path);
        REQUIRE(res.status == 0);
        std::ifstream in(csv_path);
        std::string header;
        std::getline(in, header);
        CHECK(header ==
              "id,lengths,lru:total_time,lru:makespan,lru:miss_count,"
              "fifo:total_time,fifo:makespan,fifo:miss_count");
    }
}

TEST_CASE("the command line tool reports errors by exit code", "[io][cli]") {
    const std::string path = write_temp("mcpage_io_fig1.json", kFig1Json);
    CHECK(run_cli("simulate " + path + " --policy bogus").status == 1);
    CHECK(run_cli("simulate " + temp_path("mcpage_io_missing.json")).status == 1);
    CHECK(run_cli("no-such-command").status == 1);
    CHECK(run_cli("check-relation lru fwf --mode cyclic --ceiling 40").status == 2);
    CHECK(run_cli("--help").status == 0);
}

TEST_CASE("gen-adversary emits loadable inputs", "[io][cli]") {
    SECTION("the cycling family") {
        const CmdResult res = run_cli("gen-adversary --family lru-hass --k 4 --p 2 --ell 2");
        REQUIRE(res.status == 0);
        const InputFile file = input_from_json(Json::parse(res.out));
        CHECK(file.input == gen_lru_hass(4, 2, 2));
        CHECK(file.universe.size == 6);
    }
    SECTION("the red and blue construction") {
        const CmdResult res =
            run_cli("gen-adversary --family lower-shared --k 4 --tau 2 --ell 4 --phi 1");
        REQUIRE(res.status == 0);
        const InputFile file = input_from_json(Json::parse(res.out));
        LruPolicy lru;
        CHECK(file.input == gen_lower_shared(4, 2, 4, 1, lru, SimParams{4, 2, 2}));
        CHECK(file.universe.size == 8);
        CHECK(file.params.fetch_delay == 2);
    }
}

TEST_CASE("the command line tool checks locality and boundedness", "[io][cli]") {
    const std::string input_path = write_temp("mcpage_io_fig1.json", kFig1Json);
    const std::string f_path = write_temp("mcpage_io_f.json", R"({"p": 2, "f": [2, 3, 4, 4]})");

    SECTION("an inconsistent pair names the witness window") {
        const CmdResult res = run_cli("check-locality " + input_path + " --f " + f_path);
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("consistent: no"));
        CHECK_THAT(res.out,
                   ContainsSubstring("witness: width 2 holds 4 distinct pages but f(2) = 3"));
    }
    SECTION("a consistent pair reports success") {
        const std::string small = write_temp(
            "mcpage_io_small.json",
            R"({"universe": 2, "params": {"k": 2, "tau": 1}, "sequences": [[0, 1], [0, 1]]})");
        const CmdResult res = run_cli("check-locality " + small + " --f " + f_path);
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("consistent: yes"));
    }
    SECTION("miss count is unbounded with the repetition family") {
        const CmdResult res = run_cli(
            "check-bounded --measure miss-count --universe 2 --cores 1 --k 1 --ceiling 2");
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("bounded: no"));
        CHECK_THAT(res.out, ContainsSubstring("witness_cost: 1"));
    }
    SECTION("total time is bounded on the same scan") {
        const CmdResult res = run_cli(
            "check-bounded --measure total-time --universe 2 --cores 1 --k 1 --ceiling 4");
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("bounded: yes"));
    }
}

TEST_CASE("the command line tool verifies the pi map and ratio curves", "[io][cli]") {
    const std::string f_path = write_temp("mcpage_io_f.json", R"({"p": 2, "f": [2, 3, 4, 4]})");

    SECTION("a short horizon keeps every pair in case 0") {
        const CmdResult res = run_cli("check-pi --j 5 --max-len 3 --f " + f_path);
        REQUIRE(res.status == 0);
        CHECK_THAT(res.out, ContainsSubstring("cases: case0=1600"));
        CHECK_THAT(res.out, ContainsSubstring("covers_codomain: yes"));
        CHECK_THAT(res.out, ContainsSubstring("cost_ok: yes"));
        const CmdResult again = run_cli("check-pi --j 5 --max-len 3 --f " + f_path);
        CHECK(again.out == res.out);
    }
    SECTION("the cycling family ratio curve is exact") {
        const CmdResult res = run_cli(
            "ratio-curve --family lru-hass --k 4 --p 2 --tau 2 --baseline fif "
            "--measure total-time --max-size 4");
        REQUIRE(res.status == 0);
        CHECK(res.out ==
              "size,n,cost_online,cost_baseline,ratio\n"
              "1,6,12,12,1\n"
              "2,12,24,18,1.33333\n"
              "3,18,36,24,1.5\n"
              "4,24,48,30,1.6\n");
    }
}
