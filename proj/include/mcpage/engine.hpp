#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

// Free-interleaving execution engine. All p cores share one cache of k slots;
// every timestep each core serves (or keeps serving) its next request. A miss
// occupies the core for tau timesteps while the page is fetched; a request to
// a page already in flight blocks the core until that fetch lands. Cores are
// processed in ascending index within a timestep and see the effects of
// lower-index cores immediately. A fetched page becomes resident (and
// servable by other cores) the timestep after the fetch's last timestep.

namespace mcpage {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Slot {
    enum class Kind { Empty, Resident, Reserved };

    Kind kind = Kind::Empty;
    Page page = 0;
    Timestep tag = 0;        // last access (Resident only)
    Timestep completes = 0;  // absolute fetch-completion timestep (Reserved only)
    int owner = -1;          // core that initiated the fetch (Reserved only)
};

struct CacheState {
    std::vector<Slot> slots;

    explicit CacheState(std::size_t k = 0) : slots(k) {}

    int find(Page p, Slot::Kind kind) const {
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].kind == kind && slots[i].page == p) return static_cast<int>(i);
        return -1;
    }

    int find_resident(Page p) const { return find(p, Slot::Kind::Resident); }
    int find_reserved(Page p) const { return find(p, Slot::Kind::Reserved); }

    int first_empty() const {
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].kind == Slot::Kind::Empty) return static_cast<int>(i);
        return -1;
    }

    bool full() const { return first_empty() < 0; }

    std::size_t resident_count() const {
        std::size_t n = 0;
        for (const auto& s : slots) n += s.kind == Slot::Kind::Resident;
        return n;
    }

    std::vector<Page> resident_pages() const {
        std::vector<Page> v;
        for (const auto& s : slots)
            if (s.kind == Slot::Kind::Resident) v.push_back(s.page);
        return v;
    }
};

enum class SpanKind { Hit, FullMiss, SharedWait };

inline const char* span_kind_name(SpanKind k) {
    switch (k) {
        case SpanKind::Hit: return "hit";
        case SpanKind::FullMiss: return "full_miss";
        case SpanKind::SharedWait: return "shared_wait";
    }
    return "?";
}

// One request's service window on its core's timeline: the request occupies
// timesteps [begin, end] of that core's schedule.
struct ServiceSpan {
    std::size_t request_index = 0;  // 0-based position in the core's sequence
    Page page = 0;
    Timestep begin = 0;  // 1-based
    Timestep end = 0;
    SpanKind kind = SpanKind::Hit;
    std::vector<Page> evicted;  // pages evicted when this miss was handled

    Timestep length() const { return end - begin + 1; }
};

struct MissEvent {
    Timestep t = 0;  // 1-based timestep the miss occurred
    int core = 0;    // 0-based
    Page page = 0;
    SpanKind kind = SpanKind::FullMiss;  // FullMiss or SharedWait
    Timestep wait = 0;                   // timesteps the core is blocked
    std::vector<Page> evicted;
};

struct HitEvent {
    Timestep t = 0;
    int core = 0;
    Page page = 0;
};

struct SlotSnapshot {
    Slot::Kind kind = Slot::Kind::Empty;
    Page page = 0;
    Timestep tag = 0;
};

// Fig-style row recorded per executed timestep when tracing is on.
struct TraceRow {
    Timestep t = 0;
    std::vector<SlotSnapshot> cache_before;
    std::vector<std::string> notes;                 // one line per core action
    std::vector<std::optional<Page>> schedule_at;   // entry per core, nullopt once finished
};

struct SimResult {
    Schedule schedule;                           // per-core served pages
    std::vector<std::vector<ServiceSpan>> spans; // per-core service windows
    std::vector<Timestep> per_core_finish;
    std::vector<TraceRow> trace;                 // populated only when requested

    Timestep makespan() const {
        Timestep m = 0;
        for (Timestep f : per_core_finish) m = std::max(m, f);
        return m;
    }

    Timestep total_time() const {
        Timestep s = 0;
        for (Timestep f : per_core_finish) s += f;
        return s;
    }

    std::vector<MissEvent> miss_events() const {
        std::vector<MissEvent> out;
        for (std::size_t c = 0; c < spans.size(); ++c)
            for (const auto& sp : spans[c])
                if (sp.kind != SpanKind::Hit)
                    out.push_back(MissEvent{sp.begin, static_cast<int>(c), sp.page, sp.kind,
                                            sp.length(), sp.evicted});
        std::sort(out.begin(), out.end(),
                  [](const MissEvent& a, const MissEvent& b) {
                      return std::pair(a.t, a.core) < std::pair(b.t, b.core);
                  });
        return out;
    }

    std::vector<HitEvent> hit_events() const {
        std::vector<HitEvent> out;
        for (std::size_t c = 0; c < spans.size(); ++c)
            for (const auto& sp : spans[c])
                if (sp.kind == SpanKind::Hit)
                    out.push_back(HitEvent{sp.begin, static_cast<int>(c), sp.page});
        std::sort(out.begin(), out.end(),
                  [](const HitEvent& a, const HitEvent& b) {
                      return std::pair(a.t, a.core) < std::pair(b.t, b.core);
                  });
        return out;
    }

    std::size_t miss_count() const {
        std::size_t n = 0;
        for (const auto& cs : spans)
            for (const auto& sp : cs) n += sp.kind != SpanKind::Hit;
        return n;
    }

    // Collapsing each service span back to its request recovers the input.
    RequestSequence collapse_runs(std::size_t core) const {
        RequestSequence seq;
        for (const auto& sp : spans[core]) seq.push_back(sp.page);
        return seq;
    }
};

struct EvictionContext {
    const CacheState& cache;
    int core = 0;  // 0-based faulting core
    Page request = 0;
    Timestep now = 0;
    std::span<const std::size_t> cursors;  // per-core next unserved request index
    const MulticoreInput* input = nullptr; // full input, for offline policies
    const std::vector<Page>* excluded = nullptr;  // already chosen this decision
    bool cache_full = false;

    bool is_excluded(Page p) const {
        return excluded &&
               std::find(excluded->begin(), excluded->end(), p) != excluded->end();
    }
};

class EvictionPolicy {
  public:
    virtual ~EvictionPolicy() = default;
    virtual std::string name() const = 0;
    virtual std::unique_ptr<EvictionPolicy> clone() const = 0;
    virtual void reset() {}

    // Called on a full miss. Must return resident pages to evict; returning
    // an empty list is a contract violation when the cache is full.
    virtual std::vector<Page> decide_evictions(const EvictionContext& ctx) = 0;

    virtual void on_hit(int /*core*/, Page, Timestep) {}
    virtual void on_fetch_begin(int /*core*/, Page, Timestep) {}
    virtual void on_fetch_complete(int /*core*/, Page, Timestep) {}
    virtual void on_evict(Page, Timestep) {}
};

struct SimOptions {
    bool record_trace = false;
    PageNames names;  // used only for trace notes
};

// Stepping state machine. simulate_free drives it to completion; adaptive
// adversaries step it manually and append requests as cores become ready.
class Simulation {
  public:
    Simulation(MulticoreInput input, const EvictionPolicy& policy, SimParams params,
               SimOptions opts = {})
        : input_(std::move(input)),
          policy_(policy.clone()),
          params_(params),
          opts_(std::move(opts)),
          cache_(params.cache_size) {
        if (!params_.valid()) throw EngineError("invalid simulation parameters");
        if (input_.core_count() != params_.core_count)
            throw EngineError("input has " + std::to_string(input_.core_count()) +
                              " sequences but core_count is " +
                              std::to_string(params_.core_count));
        const std::size_t p = params_.core_count;
        cores_.resize(p);
        result_.schedule.resize(p);
        result_.spans.resize(p);
        result_.per_core_finish.assign(p, 0);
        cursors_.assign(p, 0);
        policy_->reset();
    }

    Timestep now() const { return clock_ + 1; }  // timestep the next step() executes
    const CacheState& cache() const { return cache_; }
    const EvictionPolicy& policy() const { return *policy_; }
    const MulticoreInput& input() const { return input_; }
    std::span<const std::size_t> cursors() const { return cursors_; }

    bool finished(std::size_t core) const { return cores_[core].done; }

    // True when the core will consume a fresh request on the next step and
    // has none queued: an adaptive generator must append one first.
    bool wants_request(std::size_t core) const {
        const CoreState& c = cores_[core];
        return !c.done && c.mode == Mode::Ready && cursors_[core] >= input_.sequences[core].size();
    }

    void append_request(std::size_t core, Page page) {
        if (cores_[core].done) throw EngineError("append_request on a finished core");
        input_.sequences[core].push_back(page);
    }

    bool done() const {
        for (const auto& c : cores_)
            if (!c.done) return false;
        return true;
    }

    // Executes one timestep; returns false (and does nothing) once all cores
    // are done. A core with no request left is flagged done before the
    // timestep runs, so adaptive drivers must append requests beforehand.
    bool step() {
        for (std::size_t i = 0; i < cores_.size(); ++i) {
            CoreState& c = cores_[i];
            if (!c.done && c.mode == Mode::Ready && cursors_[i] >= input_.sequences[i].size())
                c.done = true;
        }
        if (done()) return false;
        const Timestep t = ++clock_;
        TraceRow row;
        if (opts_.record_trace) {
            row.t = t;
            for (const auto& s : cache_.slots)
                row.cache_before.push_back(SlotSnapshot{s.kind, s.page, s.tag});
            row.schedule_at.assign(cores_.size(), std::nullopt);
        }

        for (std::size_t i = 0; i < cores_.size(); ++i) {
            CoreState& c = cores_[i];
            if (c.done) {
                if (opts_.record_trace)
                    row.notes.push_back(core_label(i) + " has completed its sequence");
                continue;
            }
            switch (c.mode) {
                case Mode::Ready: serve_next(static_cast<int>(i), t, row); break;
                case Mode::Fetching:
                case Mode::Waiting: continue_service(static_cast<int>(i), t, row); break;
            }
        }

        // Fetch completions land at end of timestep, in owner-core order;
        // the page is servable by everyone from t+1 on.
        std::vector<int> landed;
        for (std::size_t s = 0; s < cache_.slots.size(); ++s) {
            Slot& slot = cache_.slots[s];
            if (slot.kind == Slot::Kind::Reserved && slot.completes == t)
                landed.push_back(static_cast<int>(s));
        }
        std::sort(landed.begin(), landed.end(), [&](int a, int b) {
            return cache_.slots[a].owner < cache_.slots[b].owner;
        });
        for (int s : landed) {
            Slot& slot = cache_.slots[s];
            slot.kind = Slot::Kind::Resident;
            slot.tag = t;
            policy_->on_fetch_complete(slot.owner, slot.page, t);
            slot.owner = -1;
        }

        for (std::size_t i = 0; i < cores_.size(); ++i) {
            CoreState& c = cores_[i];
            if (c.done || c.mode == Mode::Ready) continue;
            if (c.until == t) {  // this request's service ends now
                close_span(i, t);
                c.mode = Mode::Ready;
            }
        }
        if (opts_.record_trace) result_.trace.push_back(std::move(row));
        return true;
    }

    void run() {
        while (step()) {}
    }

    SimResult take_result() {
        if (!done()) run();
        return std::move(result_);
    }

  private:
    enum class Mode { Ready, Fetching, Waiting };

    struct CoreState {
        Mode mode = Mode::Ready;
        bool done = false;
        Timestep until = 0;  // last timestep of the current service window
    };

    std::string core_label(std::size_t i) const { return "P" + std::to_string(i + 1); }
    std::string page_label(Page p) const { return opts_.names.render(p); }

    void open_span(int core, std::size_t index, Page page, Timestep begin, Timestep end,
                   SpanKind kind, std::vector<Page> evicted) {
        ServiceSpan sp;
        sp.request_index = index;
        sp.page = page;
        sp.begin = begin;
        sp.end = end;
        sp.kind = kind;
        sp.evicted = std::move(evicted);
        result_.spans[core].push_back(std::move(sp));
    }

    void close_span(std::size_t core, Timestep /*t*/) { ++cursors_[core]; }

    void emit(int core, Page page, Timestep t, TraceRow& row) {
        result_.schedule[core].push_back(page);
        result_.per_core_finish[core] = t;
        if (opts_.record_trace) row.schedule_at[core] = page;
    }

    void serve_next(int core, Timestep t, TraceRow& row) {
        CoreState& c = cores_[core];
        const auto& seq = input_.sequences[core];
        if (cursors_[core] >= seq.size()) {
            c.done = true;
            if (opts_.record_trace)
                row.notes.push_back(core_label(core) + " has completed its sequence");
            return;
        }
        const Page page = seq[cursors_[core]];

        if (int s = cache_.find_resident(page); s >= 0) {
            cache_.slots[s].tag = t;
            policy_->on_hit(core, page, t);
            open_span(core, cursors_[core], page, t, t, SpanKind::Hit, {});
            emit(core, page, t, row);
            ++cursors_[core];
            if (opts_.record_trace)
                row.notes.push_back(core_label(core) + " has a hit for " + page_label(page));
            return;
        }

        if (int s = cache_.find_reserved(page); s >= 0) {
            // Someone is already fetching this page: block until it lands.
            const Timestep until = cache_.slots[s].completes;
            c.mode = Mode::Waiting;
            c.until = until;
            open_span(core, cursors_[core], page, t, until, SpanKind::SharedWait, {});
            emit(core, page, t, row);
            if (opts_.record_trace)
                row.notes.push_back(core_label(core) + " misses, waits for " + page_label(page));
            return;
        }

        // Full miss: consult the policy, evict, reserve a slot.
        std::vector<Page> chosen;
        EvictionContext ctx{cache_, core, page, t, cursors_, &input_, &chosen, cache_.full()};
        std::vector<Page> evictions = policy_->decide_evictions(ctx);
        // A multi-page decision is a set; canonical id order keeps results
        // comparable across policies that rank their victims differently.
        std::sort(evictions.begin(), evictions.end());
        if (ctx.cache_full && evictions.empty())
            throw EngineError("policy " + policy_->name() +
                              " returned no eviction on a full cache (core " +
                              std::to_string(core + 1) + ", timestep " + std::to_string(t) + ")");
        for (Page victim : evictions) {
            int vs = cache_.find_resident(victim);
            if (vs < 0)
                throw EngineError("policy " + policy_->name() + " evicted non-resident page " +
                                  std::to_string(victim) + " (core " + std::to_string(core + 1) +
                                  ", timestep " + std::to_string(t) + ")");
            cache_.slots[vs] = Slot{};
            policy_->on_evict(victim, t);
        }
        int slot = cache_.first_empty();
        if (slot < 0)
            throw EngineError("no free slot after evictions (core " + std::to_string(core + 1) +
                              ", timestep " + std::to_string(t) + ")");
        Slot& sl = cache_.slots[slot];
        sl.kind = Slot::Kind::Reserved;
        sl.page = page;
        sl.completes = t + params_.fetch_delay - 1;
        sl.owner = core;
        policy_->on_fetch_begin(core, page, t);
        c.mode = Mode::Fetching;
        c.until = sl.completes;
        open_span(core, cursors_[core], page, t, sl.completes, SpanKind::FullMiss,
                  std::move(evictions));
        emit(core, page, t, row);
        if (opts_.record_trace)
            row.notes.push_back(core_label(core) + " misses, starts fetching " + page_label(page));
    }

    void continue_service(int core, Timestep t, TraceRow& row) {
        CoreState& c = cores_[core];
        const Page page = result_.spans[core].back().page;
        emit(core, page, t, row);
        if (opts_.record_trace) {
            if (c.until == t)
                row.notes.push_back(core_label(core) + " completes " +
                                    (c.mode == Mode::Fetching ? "fetching " : "waiting for ") +
                                    page_label(page));
            else
                row.notes.push_back(core_label(core) +
                                    (c.mode == Mode::Fetching ? " is fetching " : " waits for ") +
                                    page_label(page));
        }
    }

    MulticoreInput input_;
    std::unique_ptr<EvictionPolicy> policy_;
    SimParams params_;
    SimOptions opts_;
    CacheState cache_;
    std::vector<CoreState> cores_;
    std::vector<std::size_t> cursors_;
    Timestep clock_ = 0;
    SimResult result_;
};

inline SimResult simulate_free(const MulticoreInput& input, const EvictionPolicy& policy,
                               const SimParams& params, SimOptions opts = {}) {
    Simulation sim(input, policy, params, std::move(opts));
    sim.run();
    return sim.take_result();
}

// A total service order for explicit-interleaving mode: (core, request index)
// pairs, 0-based, covering the input exactly with per-core indices ascending.
using Interleaving = std::vector<std::pair<int, std::size_t>>;

inline Interleaving sequential_order(const MulticoreInput& input) {
    Interleaving order;
    for (std::size_t c = 0; c < input.core_count(); ++c)
        for (std::size_t j = 0; j < input.sequences[c].size(); ++j)
            order.emplace_back(static_cast<int>(c), j);
    return order;
}

// Explicit mode serves one request at a time with single-core semantics (a
// miss costs tau, a hit costs 1). Spans and finish times are recorded on each
// core's own projection timeline, so per_core_finish stays the projection
// length; there is no shared-fetch waiting because nothing overlaps.
inline SimResult simulate_explicit(const MulticoreInput& input, const Interleaving& order,
                                   const EvictionPolicy& policy, const SimParams& params) {
    if (!params.valid()) throw EngineError("invalid simulation parameters");
    if (input.core_count() != params.core_count)
        throw EngineError("input core count does not match params");
    std::vector<std::size_t> next(input.core_count(), 0);
    for (const auto& [core, idx] : order) {
        if (core < 0 || static_cast<std::size_t>(core) >= input.core_count())
            throw EngineError("interleaving names core " + std::to_string(core + 1) +
                              " outside the input");
        if (idx != next[core])
            throw EngineError("interleaving is not order-preserving for core " +
                              std::to_string(core + 1));
        ++next[core];
    }
    for (std::size_t c = 0; c < input.core_count(); ++c)
        if (next[c] != input.sequences[c].size())
            throw EngineError("interleaving does not cover core " + std::to_string(c + 1) +
                              " exactly");

    auto pol = policy.clone();
    pol->reset();
    CacheState cache(params.cache_size);
    SimResult result;
    result.schedule.resize(input.core_count());
    result.spans.resize(input.core_count());
    result.per_core_finish.assign(input.core_count(), 0);
    std::vector<std::size_t> cursors(input.core_count(), 0);
    Timestep global = 0;

    for (const auto& [core, idx] : order) {
        const Page page = input.sequences[core][idx];
        const Timestep local_begin = result.per_core_finish[core] + 1;
        if (int s = cache.find_resident(page); s >= 0) {
            global += 1;
            cache.slots[s].tag = global;
            pol->on_hit(core, page, global);
            ServiceSpan sp{idx, page, local_begin, local_begin, SpanKind::Hit, {}};
            result.spans[core].push_back(sp);
            result.schedule[core].push_back(page);
            result.per_core_finish[core] = local_begin;
        } else {
            std::vector<Page> chosen;
            EvictionContext ctx{cache, core, page, global + 1, cursors, &input, &chosen,
                                cache.full()};
            std::vector<Page> evictions = pol->decide_evictions(ctx);
            if (ctx.cache_full && evictions.empty())
                throw EngineError("policy " + pol->name() +
                                  " returned no eviction on a full cache (explicit mode)");
            for (Page victim : evictions) {
                int vs = cache.find_resident(victim);
                if (vs < 0)
                    throw EngineError("policy " + pol->name() +
                                      " evicted non-resident page (explicit mode)");
                cache.slots[vs] = Slot{};
                pol->on_evict(victim, global + 1);
            }
            int slot = cache.first_empty();
            pol->on_fetch_begin(core, page, global + 1);
            global += params.fetch_delay;
            Slot& sl = cache.slots[slot];
            sl.kind = Slot::Kind::Resident;
            sl.page = page;
            sl.tag = global;
            pol->on_fetch_complete(core, page, global);
            ServiceSpan sp{idx, page, local_begin, local_begin + params.fetch_delay - 1,
                           SpanKind::FullMiss, std::move(evictions)};
            result.spans[core].push_back(sp);
            for (Timestep r = 0; r < params.fetch_delay; ++r)
                result.schedule[core].push_back(page);
            result.per_core_finish[core] = sp.end;
        }
        ++cursors[core];
    }
    return result;
}

// --- Splits -----------------------------------------------------------------

struct ScheduleSplit {
    Schedule prefix;                           // timesteps 1..j per core
    std::vector<std::optional<Page>> at;       // entry at timestep j+1, if any
    Schedule suffix;                           // timesteps j+2.. per core
};

inline ScheduleSplit schedule_split(const SimResult& result, Timestep j) {
    if (j < 1 || j >= result.makespan())
        throw std::out_of_range("schedule split index j=" + std::to_string(j) +
                                " outside [1, makespan)");
    ScheduleSplit out;
    const std::size_t p = result.schedule.size();
    out.prefix.resize(p);
    out.at.resize(p);
    out.suffix.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        const auto& sched = result.schedule[c];
        const std::size_t m = sched.size();
        const std::size_t cut = std::min<std::size_t>(m, static_cast<std::size_t>(j));
        out.prefix[c].assign(sched.begin(), sched.begin() + cut);
        if (static_cast<std::size_t>(j) < m) out.at[c] = sched[j];
        if (static_cast<std::size_t>(j + 1) < m)
            out.suffix[c].assign(sched.begin() + j + 1, sched.end());
    }
    return out;
}

struct RequestAt {
    Page page = 0;
    bool began_in_prefix = false;  // service started at or before timestep j
};

struct RequestSplit {
    std::vector<RequestSequence> prefix;      // requests whose service began <= j
    std::vector<std::optional<RequestAt>> at; // request in service at timestep j+1
    std::vector<RequestSequence> suffix;      // requests whose service began >= j+2

    // prefix + (at where service began at j+1) + suffix == input
    std::vector<RequestSequence> reassemble() const {
        std::vector<RequestSequence> out(prefix.size());
        for (std::size_t c = 0; c < prefix.size(); ++c) {
            out[c] = prefix[c];
            if (at[c] && !at[c]->began_in_prefix) out[c].push_back(at[c]->page);
            out[c].insert(out[c].end(), suffix[c].begin(), suffix[c].end());
        }
        return out;
    }
};

inline RequestSplit request_split(const SimResult& result, Timestep j) {
    if (j < 1 || j >= result.makespan())
        throw std::out_of_range("request split index j=" + std::to_string(j) +
                                " outside [1, makespan)");
    RequestSplit out;
    const std::size_t p = result.spans.size();
    out.prefix.resize(p);
    out.at.resize(p);
    out.suffix.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        for (const auto& sp : result.spans[c]) {
            if (sp.begin <= j) out.prefix[c].push_back(sp.page);
            if (sp.begin <= j + 1 && j + 1 <= sp.end)
                out.at[c] = RequestAt{sp.page, sp.begin <= j};
            if (sp.begin >= j + 2) out.suffix[c].push_back(sp.page);
        }
    }
    return out;
}

}  // namespace mcpage
