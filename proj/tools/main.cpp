#include <algorithm>
#include <cstdint>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mcpage/io.hpp"

// Batch front end. Every command is deterministic given its flags and embeds
// its configuration in the output. Exit codes: 0 when a verdict or report was
// computed (negative verdicts included), 1 for usage and input errors, 2 when
// an enumeration exceeds its budget.

namespace {

using mcpage::Json;

mcpage::Measure measure_flag(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    return mcpage::parse_measure(s);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        mcpage::save_text_file(path, text);
}

std::string config_line(const Json& config) { return "config: " + config.dump() + "\n"; }

std::string json_doc(const Json& config, const char* key, Json body) {
    Json doc;
    doc["config"] = config;
    doc[key] = std::move(body);
    return doc.dump(2) + "\n";
}

std::string render_verdict(const mcpage::RelationReport& rep, const std::string& a,
                           const std::string& b) {
    using mcpage::Verdict;
    std::string line;
    switch (rep.verdict) {
        case Verdict::Equivalent: return "equivalent";
        case Verdict::Incomparable: return "incomparable-at-horizon";
        case Verdict::ANoWorse: line = a + " <= " + b; break;
        case Verdict::BNoWorse: line = b + " <= " + a; break;
    }
    if (rep.strict) line += ", strict";
    return line;
}

std::string sequences_text(const mcpage::MulticoreInput& in) {
    return mcpage::input_sequences_json(in).dump();
}

// --- simulate / trace -------------------------------------------------------

struct SimulateOpts {
    std::string input_path;
    std::string policy = "lru";
    std::string format = "text";
    std::string output;
    bool table_only = false;
};

void run_simulate(const SimulateOpts& opt) {
    const mcpage::InputFile file = mcpage::load_input_file(opt.input_path);
    const auto policy = mcpage::make_policy(opt.policy);
    mcpage::SimOptions sim_opts;
    sim_opts.record_trace = true;
    sim_opts.names = file.names;
    const mcpage::SimResult result =
        mcpage::simulate_free(file.input, *policy, file.params, sim_opts);

    Json config;
    config["command"] = opt.table_only ? "trace" : "simulate";
    config["input"] = opt.input_path;
    config["policy"] = opt.policy;
    config["params"] = Json{{"k", file.params.cache_size},
                            {"tau", file.params.fetch_delay},
                            {"p", file.params.core_count}};

    if (opt.format == "json") {
        emit(opt.output, json_doc(config, "result", mcpage::result_to_json(result)));
        return;
    }
    std::ostringstream out;
    out << config_line(config);
    out << mcpage::render_trace(result, file.names);
    if (!opt.table_only) {
        for (std::size_t c = 0; c < result.schedule.size(); ++c) {
            out << 'P' << c + 1 << " schedule:";
            for (mcpage::Page p : result.schedule[c]) out << ' ' << file.names.render(p);
            out << '\n';
        }
        out << "makespan: " << result.makespan() << '\n';
        out << "total_time: " << result.total_time() << '\n';
        out << "miss_count: " << result.miss_count() << '\n';
    }
    emit(opt.output, out.str());
}

// --- gen-adversary ----------------------------------------------------------

struct GenOpts {
    std::string family;
    std::size_t k = 4;
    std::size_t p = 2;
    mcpage::Timestep tau = 1;
    std::size_t ell = 4;
    std::size_t phi = 0;
    std::string policy = "lru";
    std::string output;
};

void run_gen(const GenOpts& opt) {
    mcpage::InputFile file;
    file.params.cache_size = opt.k;
    file.params.fetch_delay = opt.tau;
    if (opt.family == "lru-hass") {
        file.input = mcpage::gen_lru_hass(opt.k, opt.p, opt.ell);
        file.universe.size = opt.p * (opt.k / opt.p + 1);
        file.params.core_count = opt.p;
    } else {
        const mcpage::SimParams params{opt.k, opt.tau, 2};
        const auto target = mcpage::make_policy(opt.policy);
        file.input = mcpage::gen_lower_shared(opt.k, opt.tau, opt.ell, opt.phi, *target, params);
        file.universe.size = 2 * opt.k;
        file.params.core_count = 2;
    }
    emit(opt.output, mcpage::input_to_json(file).dump(2) + "\n");
}

// --- check-relation -----------------------------------------------------------

struct RelationOpts {
    std::string a;
    std::string b;
    std::string mode = "bijective";
    std::string measure = "total-time";
    std::size_t universe = 3;
    std::size_t cores = 2;
    std::size_t max_len = 3;
    std::int64_t total_cap = -1;
    std::size_t k = 2;
    mcpage::Timestep tau = 2;
    std::int64_t ceiling = 8;
    std::string f_path;
    int jobs = 1;
    std::string csv_path;
    std::string format = "text";
    std::string output;
};

void run_relation(const RelationOpts& opt) {
    const mcpage::Measure measure = measure_flag(opt.measure);
    const mcpage::SimParams params{opt.k, opt.tau, opt.cores};
    const auto a = mcpage::make_policy(opt.a);
    const auto b = mcpage::make_policy(opt.b);

    mcpage::ConcaveFunction f;
    const bool have_f = !opt.f_path.empty();
    if (have_f) f = mcpage::load_f_table(opt.f_path);

    mcpage::UniverseScan scan;
    mcpage::RelationReport rep;
    if (opt.mode == "cyclic") {
        // The closure rule needs every input that can cost <= ceiling, which
        // the simplex scan at the ceiling provides exactly.
        scan = mcpage::UniverseScan::simplex(opt.universe, opt.cores,
                                             static_cast<std::size_t>(opt.ceiling));
        rep = mcpage::cyclic_relation(*a, *b, scan, measure, params, opt.ceiling,
                                      have_f ? &f : nullptr, opt.jobs);
    } else {
        scan = mcpage::UniverseScan::box(opt.universe, opt.cores, opt.max_len);
        if (opt.total_cap >= 0) scan.total_cap = static_cast<std::size_t>(opt.total_cap);
        const auto inputs = mcpage::enumerate_universe(scan, have_f ? &f : nullptr);
        rep = mcpage::bijective_relation(*a, *b, inputs, measure, params, opt.jobs);
    }

    Json config;
    config["command"] = "check-relation";
    config["a"] = opt.a;
    config["b"] = opt.b;
    config["mode"] = opt.mode;
    config["measure"] = mcpage::measure_name(measure);
    config["universe"] = opt.universe;
    config["cores"] = opt.cores;
    if (opt.mode == "cyclic")
        config["ceiling"] = opt.ceiling;
    else
        config["max_len"] = opt.max_len;
    if (opt.total_cap >= 0 && opt.mode != "cyclic") config["total_cap"] = opt.total_cap;
    config["k"] = opt.k;
    config["tau"] = opt.tau;
    if (have_f) config["f"] = mcpage::f_to_json(f);
    config["jobs"] = opt.jobs;

    if (!opt.csv_path.empty()) {
        const auto inputs = mcpage::enumerate_universe(scan, have_f ? &f : nullptr);
        const std::vector<mcpage::Measure> all{mcpage::Measure::TotalTime,
                                               mcpage::Measure::Makespan,
                                               mcpage::Measure::MissCount};
        mcpage::save_text_file(opt.csv_path, mcpage::cost_csv(inputs, {opt.a, opt.b}, all, params));
    }

    if (opt.format == "json") {
        emit(opt.output, json_doc(config, "report", mcpage::relation_to_json(rep)));
        return;
    }
    std::ostringstream out;
    out << config_line(config);
    out << "verdict: " << render_verdict(rep, opt.a, opt.b) << '\n';
    out << "horizon: " << rep.horizon << '\n';
    if (rep.gap_threshold >= 0) out << "gap_threshold: " << rep.gap_threshold << '\n';
    if (rep.witness)
        out << "witness: " << sequences_text(*rep.witness) << " with costs " << rep.witness_cost_a
            << " vs " << rep.witness_cost_b << '\n';
    emit(opt.output, out.str());
}

// --- check-locality -----------------------------------------------------------

struct LocalityOpts {
    std::string input_path;
    std::string f_path;
    std::string policy = "lru";
    bool strict_concave = false;
    std::int64_t order_j = -1;
    mcpage::Page beta = 0;
    mcpage::Page delta = 1;
    std::string format = "text";
    std::string output;
};

void run_locality(const LocalityOpts& opt) {
    const mcpage::InputFile file = mcpage::load_input_file(opt.input_path);
    const mcpage::ConcaveFunction f = mcpage::load_f_table(opt.f_path);
    const mcpage::ConcaveVerdict f_verdict = mcpage::validate_concave(f, opt.strict_concave);
    const mcpage::ConsistencyVerdict verdict = mcpage::is_consistent(file.input, f);

    Json config;
    config["command"] = "check-locality";
    config["input"] = opt.input_path;
    config["f"] = mcpage::f_to_json(f);
    config["params"] = Json{{"k", file.params.cache_size},
                            {"tau", file.params.fetch_delay},
                            {"p", file.params.core_count}};

    Json body;
    body["f_valid"] = f_verdict.ok;
    if (!f_verdict.ok) body["f_message"] = f_verdict.message;
    body["consistency"] = mcpage::consistency_to_json(verdict);

    mcpage::LocalOrderReport order;
    const bool with_order = opt.order_j >= 0;
    if (with_order) {
        const auto policy = mcpage::make_policy(opt.policy);
        config["policy"] = opt.policy;
        config["order"] = Json{{"j", opt.order_j}, {"beta", opt.beta}, {"delta", opt.delta}};
        order = mcpage::check_local_order(file.input, *policy, file.params, f, opt.order_j,
                                          opt.beta, opt.delta);
        Json jo;
        switch (order.status) {
            case mcpage::LocalOrderReport::Status::NotApplicable:
                jo["status"] = "not-applicable";
                jo["reason"] = order.reason;
                break;
            case mcpage::LocalOrderReport::Status::Holds: jo["status"] = "holds"; break;
            case mcpage::LocalOrderReport::Status::Violated: jo["status"] = "violated"; break;
        }
        body["local_order"] = std::move(jo);
    }

    if (opt.format == "json") {
        emit(opt.output, json_doc(config, "report", body));
        return;
    }
    std::ostringstream out;
    out << config_line(config);
    out << "f: " << (f_verdict.ok ? "valid" : "invalid, " + f_verdict.message) << '\n';
    out << "consistent: " << (verdict.consistent ? "yes" : "no") << '\n';
    if (!verdict.consistent)
        out << "witness: width " << verdict.witness_width << " holds " << verdict.witness_distinct
            << " distinct pages but f(" << verdict.witness_width << ") = "
            << f.at(verdict.witness_width) << '\n';
    if (with_order) {
        const char* status = order.status == mcpage::LocalOrderReport::Status::Holds ? "holds"
                             : order.status == mcpage::LocalOrderReport::Status::Violated
                                 ? "violated"
                                 : "not-applicable";
        out << "local_order: " << status;
        if (!order.reason.empty()) out << ", " << order.reason;
        out << '\n';
    }
    emit(opt.output, out.str());
}

// --- check-bounded ------------------------------------------------------------

struct BoundedOpts {
    std::string measure = "total-time";
    std::string policy = "lru";
    std::size_t universe = 2;
    std::size_t cores = 2;
    std::size_t k = 2;
    mcpage::Timestep tau = 1;
    std::int64_t ceiling = 6;
    std::string format = "text";
    std::string output;
};

void run_bounded(const BoundedOpts& opt) {
    const mcpage::Measure measure = measure_flag(opt.measure);
    const mcpage::SimParams params{opt.k, opt.tau, opt.cores};
    const auto policy = mcpage::make_policy(opt.policy);
    const mcpage::Universe universe{opt.universe};
    const mcpage::BoundedCostReport rep =
        mcpage::bounded_shared_cost_check(measure, *policy, universe, params, opt.ceiling);

    Json config;
    config["command"] = "check-bounded";
    config["measure"] = mcpage::measure_name(measure);
    config["policy"] = opt.policy;
    config["universe"] = opt.universe;
    config["cores"] = opt.cores;
    config["k"] = opt.k;
    config["tau"] = opt.tau;
    config["ceiling"] = opt.ceiling;

    if (opt.format == "json") {
        emit(opt.output, json_doc(config, "report", mcpage::bounded_to_json(rep)));
        return;
    }
    std::ostringstream out;
    out << config_line(config);
    out << "bounded: " << (rep.bounded ? "yes" : "no") << '\n';
    if (!rep.bounded) {
        out << "witness_cost: " << rep.witness_cost << '\n';
        out << "witness_family:";
        for (const auto& in : rep.witness_family) out << ' ' << sequences_text(in);
        out << '\n';
    }
    emit(opt.output, out.str());
}

// --- check-pi -------------------------------------------------------------------

struct PiOpts {
    std::string base = "fifo";
    std::int64_t j = 5;
    std::size_t universe = 3;
    std::size_t cores = 2;
    std::size_t k = 2;
    mcpage::Timestep tau = 2;
    std::size_t max_len = 4;
    std::string f_path;
    std::string format = "text";
    std::string output;
};

void run_pi(const PiOpts& opt) {
    const mcpage::ConcaveFunction f = mcpage::load_f_table(opt.f_path);
    const mcpage::SimParams params{opt.k, opt.tau, opt.cores};
    const auto scan = mcpage::UniverseScan::box(opt.universe, opt.cores, opt.max_len);
    const auto base = mcpage::make_policy(opt.base);
    // A switches to tag-LRU after the split so the pairing survives the
    // prefix; B is the derived variant that switches at j.
    const auto a = mcpage::lru_like_after(*base, opt.j + 2);
    const auto b = mcpage::derive_lru_like_variant(*a, opt.j);
    const mcpage::PiSurjectionReport rep =
        mcpage::verify_pi_surjection(scan, *a, *b, opt.j, f, params);

    Json config;
    config["command"] = "check-pi";
    config["base"] = opt.base;
    config["j"] = opt.j;
    config["universe"] = opt.universe;
    config["cores"] = opt.cores;
    config["k"] = opt.k;
    config["tau"] = opt.tau;
    config["max_len"] = opt.max_len;
    config["f"] = mcpage::f_to_json(f);

    if (opt.format == "json") {
        emit(opt.output, json_doc(config, "report", mcpage::pi_report_to_json(rep)));
        return;
    }
    const Json body = mcpage::pi_report_to_json(rep);
    std::ostringstream out;
    out << config_line(config);
    out << "domain: " << rep.domain.size() << " inputs\n";
    out << "cases:";
    for (const auto& [key, count] : body.at("case_histogram").items())
        out << ' ' << key << '=' << count.get<std::uint64_t>();
    out << '\n';
    out << "off_domain: " << rep.off_domain.size() << '\n';
    out << "overflow: " << rep.overflow.size() << '\n';
    out << "max_multiplicity: " << rep.max_multiplicity << '\n';
    out << "covers_codomain: " << (rep.covers_codomain ? "yes" : "no") << '\n';
    out << "cost_ok: " << (rep.cost_ok ? "yes" : "no") << '\n';
    emit(opt.output, out.str());
}

// --- ratio-curve ----------------------------------------------------------------

struct RatioOpts {
    std::string family = "lru-hass";
    std::size_t k = 4;
    std::size_t p = 2;
    mcpage::Timestep tau = 1;
    std::size_t ell = 4;
    std::size_t min_size = 1;
    std::size_t max_size = 8;
    std::string policy = "lru";
    std::string baseline = "fif";
    std::string measure = "total-time";
    std::string format = "csv";
    std::string output;
};

void run_ratio(const RatioOpts& opt) {
    const mcpage::Measure measure = measure_flag(opt.measure);
    if (opt.max_size < opt.min_size)
        throw std::invalid_argument("max-size must be >= min-size");
    std::vector<std::size_t> sizes;
    for (std::size_t s = opt.min_size; s <= opt.max_size; ++s) sizes.push_back(s);

    const std::size_t cores = opt.family == "lower-shared" ? 2 : opt.p;
    const mcpage::SimParams params{opt.k, opt.tau, cores};
    const auto online = mcpage::make_policy(opt.policy);
    const auto baseline_policy = mcpage::make_policy(opt.baseline);

    std::function<mcpage::MulticoreInput(std::size_t)> generator;
    if (opt.family == "lru-hass") {
        generator = [&](std::size_t ell) { return mcpage::gen_lru_hass(opt.k, opt.p, ell); };
    } else {
        // Sizes grow the round count phi; ell stays fixed.
        generator = [&](std::size_t phi) {
            return mcpage::gen_lower_shared(opt.k, opt.tau, opt.ell, phi, *online, params);
        };
    }
    const mcpage::RatioCurveReport rep =
        mcpage::ratio_curve(generator, *online,
                            mcpage::sequential_baseline(*baseline_policy, measure, params), sizes,
                            measure, params);

    Json config;
    config["command"] = "ratio-curve";
    config["family"] = opt.family;
    config["k"] = opt.k;
    config["p"] = cores;
    config["tau"] = opt.tau;
    if (opt.family == "lower-shared") config["ell"] = opt.ell;
    config["sizes"] = Json{{"min", opt.min_size}, {"max", opt.max_size}};
    config["policy"] = opt.policy;
    config["baseline"] = opt.baseline;
    config["measure"] = mcpage::measure_name(measure);

    if (opt.format == "json") {
        emit(opt.output, json_doc(config, "report", mcpage::ratio_curve_to_json(rep)));
        return;
    }
    if (opt.format == "csv") {
        emit(opt.output, mcpage::ratio_curve_csv(rep));
        return;
    }
    std::ostringstream out;
    out << config_line(config);
    out << mcpage::ratio_curve_csv(rep);
    out << "increasing: " << (rep.increasing ? "yes" : "no") << '\n';
    emit(opt.output, out.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and analysis toolkit for free-interleaving multicore paging"};
    app.require_subcommand(1);

    SimulateOpts sim_opt;
    auto add_simulate = [&](CLI::App* cmd, bool table_only) {
        cmd->add_option("input", sim_opt.input_path, "input JSON file")->required();
        cmd->add_option("--policy", sim_opt.policy, "eviction policy name");
        cmd->add_option("--format", sim_opt.format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("-o,--output", sim_opt.output, "write the report here");
        cmd->callback([&, table_only] {
            sim_opt.table_only = table_only;
            run_simulate(sim_opt);
        });
    };
    add_simulate(app.add_subcommand("simulate", "run one simulation and report costs"), false);
    add_simulate(app.add_subcommand("trace", "render the fig-style trace table"), true);

    GenOpts gen_opt;
    {
        CLI::App* cmd = app.add_subcommand("gen-adversary", "emit an adversarial input family");
        cmd->add_option("--family", gen_opt.family, "lru-hass or lower-shared")
            ->required()
            ->check(CLI::IsMember({"lru-hass", "lower-shared"}));
        cmd->add_option("--k", gen_opt.k, "cache size");
        cmd->add_option("--p", gen_opt.p, "core count (lru-hass)");
        cmd->add_option("--tau", gen_opt.tau, "fetch delay");
        cmd->add_option("--ell", gen_opt.ell, "phase length");
        cmd->add_option("--phi", gen_opt.phi, "subsequent round count (lower-shared)");
        cmd->add_option("--policy", gen_opt.policy, "target policy (lower-shared)");
        cmd->add_option("-o,--output", gen_opt.output, "write the input here");
        cmd->callback([&] { run_gen(gen_opt); });
    }

    RelationOpts rel_opt;
    {
        CLI::App* cmd = app.add_subcommand("check-relation", "bijective or cyclic comparison");
        cmd->add_option("a", rel_opt.a, "policy A")->required();
        cmd->add_option("b", rel_opt.b, "policy B")->required();
        cmd->add_option("--mode", rel_opt.mode, "bijective or cyclic")
            ->check(CLI::IsMember({"bijective", "cyclic"}));
        cmd->add_option("--measure", rel_opt.measure, "total-time, makespan or miss-count");
        cmd->add_option("--universe", rel_opt.universe, "universe size");
        cmd->add_option("--cores", rel_opt.cores, "core count");
        cmd->add_option("--max-len", rel_opt.max_len, "per-core length cap (bijective)");
        cmd->add_option("--total-cap", rel_opt.total_cap, "total request cap (bijective)");
        cmd->add_option("--k", rel_opt.k, "cache size");
        cmd->add_option("--tau", rel_opt.tau, "fetch delay");
        cmd->add_option("--ceiling", rel_opt.ceiling, "cost ceiling (cyclic)");
        cmd->add_option("--f", rel_opt.f_path, "restrict the scan to f-consistent inputs");
        cmd->add_option("--jobs", rel_opt.jobs, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--csv", rel_opt.csv_path, "also dump the cost table as CSV");
        cmd->add_option("--format", rel_opt.format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("-o,--output", rel_opt.output, "write the report here");
        cmd->callback([&] { run_relation(rel_opt); });
    }

    LocalityOpts loc_opt;
    {
        CLI::App* cmd = app.add_subcommand("check-locality", "consistency against an f table");
        cmd->add_option("input", loc_opt.input_path, "input JSON file")->required();
        cmd->add_option("--f", loc_opt.f_path, "f table JSON file")->required();
        cmd->add_option("--policy", loc_opt.policy, "policy for the order lemma");
        cmd->add_flag("--strict-concave", loc_opt.strict_concave,
                      "validate f with diminishing increments");
        cmd->add_option("--order-j", loc_opt.order_j, "also check the order lemma at this split");
        cmd->add_option("--beta", loc_opt.beta, "page beta for the order lemma");
        cmd->add_option("--delta", loc_opt.delta, "page delta for the order lemma");
        cmd->add_option("--format", loc_opt.format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("-o,--output", loc_opt.output, "write the report here");
        cmd->callback([&] { run_locality(loc_opt); });
    }

    BoundedOpts bnd_opt;
    {
        CLI::App* cmd = app.add_subcommand("check-bounded", "bounded-shared-cost property");
        cmd->add_option("--measure", bnd_opt.measure, "total-time, makespan or miss-count");
        cmd->add_option("--policy", bnd_opt.policy, "eviction policy name");
        cmd->add_option("--universe", bnd_opt.universe, "universe size");
        cmd->add_option("--cores", bnd_opt.cores, "core count");
        cmd->add_option("--k", bnd_opt.k, "cache size");
        cmd->add_option("--tau", bnd_opt.tau, "fetch delay");
        cmd->add_option("--ceiling", bnd_opt.ceiling, "cost ceiling");
        cmd->add_option("--format", bnd_opt.format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("-o,--output", bnd_opt.output, "write the report here");
        cmd->callback([&] { run_bounded(bnd_opt); });
    }

    PiOpts pi_opt;
    {
        CLI::App* cmd = app.add_subcommand("check-pi", "verify the pi-map surjection");
        cmd->add_option("--base", pi_opt.base, "base policy for A");
        cmd->add_option("--j", pi_opt.j, "switch timestep")->required();
        cmd->add_option("--universe", pi_opt.universe, "universe size");
        cmd->add_option("--cores", pi_opt.cores, "core count");
        cmd->add_option("--k", pi_opt.k, "cache size");
        cmd->add_option("--tau", pi_opt.tau, "fetch delay");
        cmd->add_option("--max-len", pi_opt.max_len, "per-core length cap");
        cmd->add_option("--f", pi_opt.f_path, "f table JSON file")->required();
        cmd->add_option("--format", pi_opt.format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("-o,--output", pi_opt.output, "write the report here");
        cmd->callback([&] { run_pi(pi_opt); });
    }

    RatioOpts ratio_opt;
    {
        CLI::App* cmd = app.add_subcommand("ratio-curve", "online vs baseline cost ratios");
        cmd->add_option("--family", ratio_opt.family, "lru-hass or lower-shared")
            ->check(CLI::IsMember({"lru-hass", "lower-shared"}));
        cmd->add_option("--k", ratio_opt.k, "cache size");
        cmd->add_option("--p", ratio_opt.p, "core count (lru-hass)");
        cmd->add_option("--tau", ratio_opt.tau, "fetch delay");
        cmd->add_option("--ell", ratio_opt.ell, "phase length (lower-shared)");
        cmd->add_option("--min-size", ratio_opt.min_size, "first family size");
        cmd->add_option("--max-size", ratio_opt.max_size, "last family size");
        cmd->add_option("--policy", ratio_opt.policy, "online policy");
        cmd->add_option("--baseline", ratio_opt.baseline, "sequential baseline policy");
        cmd->add_option("--measure", ratio_opt.measure, "total-time, makespan or miss-count");
        cmd->add_option("--format", ratio_opt.format, "csv, text or json")
            ->check(CLI::IsMember({"csv", "text", "json"}));
        cmd->add_option("-o,--output", ratio_opt.output, "write the report here");
        cmd->callback([&] { run_ratio(ratio_opt); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const mcpage::BudgetError& e) {
        std::cerr << "budget error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
