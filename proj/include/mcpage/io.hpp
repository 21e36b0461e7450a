#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "adversary.hpp"
#include "analysis.hpp"
#include "core.hpp"
#include "engine.hpp"
#include "locality.hpp"
#include "measures.hpp"
#include "policies.hpp"

// JSON and CSV encodings for inputs, f tables, simulation results and
// analysis reports, plus the fig-style trace table renderer. Cores are
// 1-based in every serialized form; the in-memory structures stay 0-based.

namespace mcpage {

using Json = nlohmann::ordered_json;

// --- file plumbing ---------------------------------------------------------

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

inline void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

// --- input files -------------------------------------------------------------

// On-disk form. core_count is implied by the sequences; the universe bounds
// every page id and the optional names array aliases page ids for rendering.
struct InputFile {
    Universe universe;
    SimParams params;
    MulticoreInput input;
    PageNames names;
};

inline InputFile input_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("input file must be a JSON object");
    InputFile file;
    file.universe.size = j.at("universe").get<std::size_t>();
    const Json& p = j.at("params");
    file.params.cache_size = p.at("k").get<std::size_t>();
    file.params.fetch_delay = p.at("tau").get<Timestep>();
    for (const auto& seq : j.at("sequences")) {
        RequestSequence s;
        for (const auto& v : seq) s.push_back(v.get<Page>());
        file.input.sequences.push_back(std::move(s));
    }
    file.params.core_count = file.input.core_count();
    if (j.contains("names")) file.names.names = j.at("names").get<std::vector<std::string>>();
    if (!file.params.valid())
        throw std::invalid_argument("params must satisfy k >= 1 and tau >= 1");
    if (file.input.core_count() == 0)
        throw std::invalid_argument("the input needs at least one sequence");
    ValidationResult v = validate_input(file.input, file.universe);
    if (!v.ok) throw std::invalid_argument(v.message);
    return file;
}

inline Json input_to_json(const InputFile& file) {
    Json j;
    j["universe"] = file.universe.size;
    j["params"] = Json{{"k", file.params.cache_size}, {"tau", file.params.fetch_delay}};
    j["sequences"] = file.input.sequences;
    if (!file.names.names.empty()) j["names"] = file.names.names;
    return j;
}

inline InputFile load_input_file(const std::string& path) {
    return input_from_json(load_json_file(path));
}

// --- f tables ----------------------------------------------------------------

inline ConcaveFunction f_from_json(const Json& j) {
    ConcaveFunction f;
    f.core_count = j.at("p").get<std::size_t>();
    f.table = j.at("f").get<std::vector<double>>();
    return f;
}

inline Json f_to_json(const ConcaveFunction& f) {
    return Json{{"p", f.core_count}, {"f", f.table}};
}

inline ConcaveFunction load_f_table(const std::string& path) {
    return f_from_json(load_json_file(path));
}

// --- results and event logs ----------------------------------------------------

inline SpanKind parse_span_kind(const std::string& s) {
    if (s == "hit") return SpanKind::Hit;
    if (s == "full_miss") return SpanKind::FullMiss;
    if (s == "shared_wait") return SpanKind::SharedWait;
    throw std::invalid_argument("unknown span kind '" + s + "'");
}

// Event log plus the derived summary numbers. Events are flattened across
// cores and sorted by (begin, core) so the log reads chronologically.
inline Json result_to_json(const SimResult& r) {
    Json j;
    j["makespan"] = r.makespan();
    j["total_time"] = r.total_time();
    j["miss_count"] = r.miss_count();
    j["per_core_finish"] = r.per_core_finish;
    j["schedule"] = r.schedule;

    std::vector<std::pair<std::size_t, const ServiceSpan*>> flat;
    for (std::size_t c = 0; c < r.spans.size(); ++c)
        for (const auto& sp : r.spans[c]) flat.emplace_back(c, &sp);
    std::sort(flat.begin(), flat.end(), [](const auto& x, const auto& y) {
        if (x.second->begin != y.second->begin) return x.second->begin < y.second->begin;
        return x.first < y.first;
    });

    Json events = Json::array();
    for (const auto& [core, sp] : flat) {
        Json e;
        e["core"] = core + 1;
        e["index"] = sp->request_index;
        e["page"] = sp->page;
        e["begin"] = sp->begin;
        e["end"] = sp->end;
        e["kind"] = span_kind_name(sp->kind);
        if (!sp->evicted.empty()) e["evicted"] = sp->evicted;
        events.push_back(std::move(e));
    }
    j["events"] = std::move(events);
    return j;
}

// Inverse of result_to_json on the serialized fields. The trace is a render
// artifact and is not carried through JSON.
inline SimResult result_from_json(const Json& j) {
    SimResult r;
    r.schedule = j.at("schedule").get<Schedule>();
    r.per_core_finish = j.at("per_core_finish").get<std::vector<Timestep>>();
    r.spans.resize(r.schedule.size());
    for (const auto& e : j.at("events")) {
        const std::size_t core = e.at("core").get<std::size_t>();
        if (core < 1 || core > r.spans.size())
            throw std::invalid_argument("event core out of range");
        ServiceSpan sp;
        sp.request_index = e.at("index").get<std::size_t>();
        sp.page = e.at("page").get<Page>();
        sp.begin = e.at("begin").get<Timestep>();
        sp.end = e.at("end").get<Timestep>();
        sp.kind = parse_span_kind(e.at("kind").get<std::string>());
        if (e.contains("evicted")) sp.evicted = e.at("evicted").get<std::vector<Page>>();
        r.spans[core - 1].push_back(std::move(sp));
    }
    for (auto& core_spans : r.spans)
        std::sort(core_spans.begin(), core_spans.end(),
                  [](const ServiceSpan& a, const ServiceSpan& b) { return a.begin < b.begin; });
    return r;
}

// --- reports -----------------------------------------------------------------

inline Json input_sequences_json(const MulticoreInput& in) { return Json(in.sequences); }

inline Json relation_to_json(const RelationReport& rep) {
    Json j;
    j["verdict"] = verdict_name(rep.verdict);
    j["strict"] = rep.strict;
    j["horizon"] = rep.horizon;
    if (rep.gap_threshold >= 0) j["gap_threshold"] = rep.gap_threshold;
    if (rep.witness) {
        j["witness"] = Json{{"sequences", rep.witness->sequences},
                            {"cost_a", rep.witness_cost_a},
                            {"cost_b", rep.witness_cost_b}};
    }
    return j;
}

inline Json mapping_to_json(const FiniteMapping& m) {
    Json j;
    j["domain_costs"] = m.domain_costs;
    j["image_costs"] = m.image_costs;
    Json map = Json::array();
    for (const auto& to : m.map) {
        if (to)
            map.push_back(*to);
        else
            map.push_back(nullptr);
    }
    j["map"] = std::move(map);
    j["injective"] = m.injective();
    j["surjective"] = m.surjective();
    j["cost_respecting"] = m.cost_respecting();
    return j;
}

inline FiniteMapping mapping_from_json(const Json& j) {
    FiniteMapping m;
    m.domain_costs = j.at("domain_costs").get<std::vector<std::int64_t>>();
    m.image_costs = j.at("image_costs").get<std::vector<std::int64_t>>();
    for (const auto& v : j.at("map")) {
        if (v.is_null())
            m.map.push_back(std::nullopt);
        else
            m.map.push_back(v.get<std::size_t>());
    }
    return m;
}

inline Json bounded_to_json(const BoundedCostReport& rep) {
    Json j;
    j["measure"] = measure_name(rep.measure);
    j["cost_ceiling"] = rep.cost_ceiling;
    j["base_horizon"] = rep.base_horizon;
    j["bounded"] = rep.bounded;
    Json counts = Json::array();
    for (const auto& [cost, n] : rep.counts) counts.push_back(Json::array({cost, n}));
    j["counts"] = std::move(counts);
    if (!rep.bounded) {
        j["witness_cost"] = rep.witness_cost;
        Json fam = Json::array();
        for (const auto& in : rep.witness_family) fam.push_back(in.sequences);
        j["witness_family"] = std::move(fam);
    }
    return j;
}

inline Json consistency_to_json(const ConsistencyVerdict& v) {
    Json j;
    j["consistent"] = v.consistent;
    if (!v.consistent) {
        j["witness_width"] = v.witness_width;
        j["witness_distinct"] = v.witness_distinct;
    }
    return j;
}

inline Json pi_report_to_json(const PiSurjectionReport& rep) {
    Json j;
    j["domain_size"] = rep.domain.size();
    std::map<int, std::uint64_t> histogram;
    for (int tag : rep.case_tags) ++histogram[tag];
    Json tags;
    for (const auto& [tag, count] : histogram) tags["case" + std::to_string(tag)] = count;
    j["case_histogram"] = std::move(tags);
    j["off_domain"] = rep.off_domain.size();
    j["overflow"] = rep.overflow.size();
    j["max_multiplicity"] = rep.max_multiplicity;
    j["covers_codomain"] = rep.covers_codomain;
    j["cost_ok"] = rep.cost_ok;
    return j;
}

// --- CSV ---------------------------------------------------------------------

inline std::string join_lengths(const std::vector<std::size_t>& lens) {
    std::ostringstream out;
    for (std::size_t i = 0; i < lens.size(); ++i) out << (i ? ";" : "") << lens[i];
    return out.str();
}

// One row per input: id, the length vector, then a cost column for every
// policy and measure combination. Policies simulate once per input.
inline std::string cost_csv(const std::vector<MulticoreInput>& inputs,
                            const std::vector<std::string>& policy_names,
                            const std::vector<Measure>& measures, const SimParams& params) {
    std::vector<std::unique_ptr<EvictionPolicy>> policies;
    for (const auto& name : policy_names) policies.push_back(make_policy(name));

    std::ostringstream out;
    out << "id,lengths";
    for (const auto& name : policy_names)
        for (Measure m : measures) out << ',' << name << ':' << measure_name(m);
    out << '\n';
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        out << i << ',' << join_lengths(inputs[i].length_vector());
        for (const auto& pol : policies) {
            const SimResult r = simulate_free(inputs[i], *pol, params);
            for (Measure m : measures) out << ',' << evaluate(m, r);
        }
        out << '\n';
    }
    return out.str();
}

inline std::string ratio_curve_csv(const RatioCurveReport& rep) {
    std::ostringstream out;
    out << "size,n,cost_online,cost_baseline,ratio\n";
    for (const auto& row : rep.rows)
        out << row.size << ',' << row.n << ',' << row.cost_online << ',' << row.cost_baseline
            << ',' << row.ratio << '\n';
    return out.str();
}

inline Json ratio_curve_to_json(const RatioCurveReport& rep) {
    Json rows = Json::array();
    for (const auto& row : rep.rows)
        rows.push_back(Json{{"size", row.size},
                            {"n", row.n},
                            {"cost_online", row.cost_online},
                            {"cost_baseline", row.cost_baseline},
                            {"ratio", row.ratio}});
    return Json{{"rows", std::move(rows)}, {"increasing", rep.increasing}};
}

// --- trace rendering -----------------------------------------------------------

namespace detail {

// A slot shows its page name only once the page is usable; empty and
// still-fetching slots both render as the bottom symbol, as in the figure.
inline std::string render_cache_cell(const std::vector<SlotSnapshot>& slots,
                                     const PageNames& names) {
    std::string out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i) out += ' ';
        out += slots[i].kind == Slot::Kind::Resident ? names.render(slots[i].page)
                                                     : std::string("⊥");
    }
    return out;
}

inline std::string render_schedule_cell(const std::vector<std::optional<Page>>& served,
                                        const PageNames& names) {
    std::string out = "(";
    for (std::size_t i = 0; i < served.size(); ++i) {
        if (i) out += ", ";
        out += served[i] ? names.render(*served[i]) : std::string("-");
    }
    return out + ")";
}

// Column width in display cells rather than bytes; the only multibyte
// sequence we emit is the 3-byte bottom symbol.
inline std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char ch : s)
        if ((ch & 0xc0) != 0x80) ++w;
    return w;
}

}  // namespace detail

// Fig-style text table: timestep, cache before the step, one status column
// per core, and the tuple of pages served that step. Needs a result recorded
// with SimOptions::record_trace.
inline std::string render_trace(const SimResult& result, const PageNames& names = {}) {
    if (result.trace.empty())
        throw std::invalid_argument("render_trace needs a result recorded with tracing on");
    const std::size_t cores = result.schedule.size();

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"t", "cache"};
    for (std::size_t c = 0; c < cores; ++c) header.push_back("P" + std::to_string(c + 1));
    header.push_back("schedule");
    cells.push_back(header);

    for (const auto& row : result.trace) {
        std::vector<std::string> line;
        line.push_back(std::to_string(row.t));
        line.push_back(detail::render_cache_cell(row.cache_before, names));
        for (std::size_t c = 0; c < cores; ++c)
            line.push_back(c < row.notes.size() ? row.notes[c] : "");
        line.push_back(detail::render_schedule_cell(row.schedule_at, names));
        cells.push_back(std::move(line));
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i)
            width[i] = std::max(width[i], detail::display_width(line[i]));

    std::ostringstream out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        const auto& line = cells[r];
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) out << " | ";
            out << line[i];
            if (i + 1 < line.size())
                out << std::string(width[i] - detail::display_width(line[i]), ' ');
        }
        out << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 3 : 0);
            out << std::string(total, '-') << '\n';
        }
    }
    return out.str();
}

}  // namespace mcpage
