#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "engine.hpp"

// Eviction policies. All shipped policies are deterministic and their
// decide_evictions is free of side effects, which lets wrappers probe a base
// policy's hypothetical choice.

namespace mcpage {

namespace detail {

// Canonical tag-based LRU choice: minimum tag, ties by smallest page id.
// keys, when provided, replace the page id in the tie-break.
template <typename TagOf, typename KeyOf>
std::optional<Page> min_tag_page(const EvictionContext& ctx, TagOf tag_of, KeyOf key_of) {
    std::optional<Page> best;
    Timestep best_tag = 0;
    Page best_key = 0;
    for (const auto& s : ctx.cache.slots) {
        if (s.kind != Slot::Kind::Resident || ctx.is_excluded(s.page)) continue;
        const Timestep tag = tag_of(s);
        const Page key = key_of(s.page);
        if (!best || tag < best_tag || (tag == best_tag && key < best_key)) {
            best = s.page;
            best_tag = tag;
            best_key = key;
        }
    }
    return best;
}

}  // namespace detail

class LruPolicy final : public EvictionPolicy {
  public:
    std::string name() const override { return "lru"; }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<LruPolicy>(*this);
    }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (!ctx.cache_full) return {};
        auto victim = detail::min_tag_page(
            ctx, [](const Slot& s) { return s.tag; }, [](Page p) { return p; });
        if (!victim) return {};
        return {*victim};
    }
};

class FifoPolicy final : public EvictionPolicy {
  public:
    std::string name() const override { return "fifo"; }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<FifoPolicy>(*this);
    }
    void reset() override { completed_.clear(); }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (!ctx.cache_full) return {};
        std::optional<Page> best;
        Timestep best_t = 0;
        for (const auto& s : ctx.cache.slots) {
            if (s.kind != Slot::Kind::Resident || ctx.is_excluded(s.page)) continue;
            auto it = completed_.find(s.page);
            const Timestep arrived = it == completed_.end() ? 0 : it->second;
            if (!best || arrived < best_t || (arrived == best_t && s.page < *best)) {
                best = s.page;
                best_t = arrived;
            }
        }
        if (!best) return {};
        return {*best};
    }

    void on_fetch_complete(int, Page p, Timestep t) override { completed_[p] = t; }
    void on_evict(Page p, Timestep) override { completed_.erase(p); }

  private:
    std::map<Page, Timestep> completed_;
};

// Flush-when-full: a full miss with no empty slot evicts every resident page.
// In-flight fetches are untouched.
class FwfPolicy final : public EvictionPolicy {
  public:
    std::string name() const override { return "fwf"; }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<FwfPolicy>(*this);
    }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (!ctx.cache_full) return {};
        return ctx.cache.resident_pages();
    }
};

// FWF_i: on a full miss with no empty slot, evicts the i pages the base
// policy would discard in sequence. i=1 reproduces the base, i=k flushes.
class FwfIPolicy final : public EvictionPolicy {
  public:
    FwfIPolicy(std::unique_ptr<EvictionPolicy> base, std::size_t i)
        : base_(std::move(base)), i_(i) {}
    FwfIPolicy(const FwfIPolicy& o) : base_(o.base_->clone()), i_(o.i_) {}

    std::string name() const override {
        return "fwf_i:" + base_->name() + ":" + std::to_string(i_);
    }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<FwfIPolicy>(*this);
    }
    void reset() override { base_->reset(); }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (!ctx.cache_full) return {};
        return rank_evictions(*base_, ctx, i_);
    }

    static std::vector<Page> rank_evictions(EvictionPolicy& base, const EvictionContext& ctx,
                                            std::size_t count) {
        std::vector<Page> chosen;
        if (ctx.excluded) chosen = *ctx.excluded;
        const std::size_t already = chosen.size();
        for (std::size_t r = 0; r < count; ++r) {
            EvictionContext sub{ctx.cache,  ctx.core,  ctx.request,   ctx.now,
                                ctx.cursors, ctx.input, &chosen, ctx.cache_full};
            std::vector<Page> pick = base.decide_evictions(sub);
            if (pick.empty()) break;
            chosen.push_back(pick.front());
        }
        return {chosen.begin() + already, chosen.end()};
    }

    void on_hit(int c, Page p, Timestep t) override { base_->on_hit(c, p, t); }
    void on_fetch_begin(int c, Page p, Timestep t) override { base_->on_fetch_begin(c, p, t); }
    void on_fetch_complete(int c, Page p, Timestep t) override {
        base_->on_fetch_complete(c, p, t);
    }
    void on_evict(Page p, Timestep t) override { base_->on_evict(p, t); }

  private:
    std::unique_ptr<EvictionPolicy> base_;
    std::size_t i_;
};

// FWF_i^t: FWF_i up to and including timestep t, FWF_{i+1} afterwards.
class FwfItPolicy final : public EvictionPolicy {
  public:
    FwfItPolicy(std::unique_ptr<EvictionPolicy> base, std::size_t i, Timestep t)
        : base_(std::move(base)), i_(i), t_(t) {}
    FwfItPolicy(const FwfItPolicy& o) : base_(o.base_->clone()), i_(o.i_), t_(o.t_) {}

    std::string name() const override {
        return "fwf_it:" + base_->name() + ":" + std::to_string(i_) + ":" + std::to_string(t_);
    }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<FwfItPolicy>(*this);
    }
    void reset() override { base_->reset(); }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (!ctx.cache_full) return {};
        const std::size_t count = ctx.now <= t_ ? i_ : i_ + 1;
        return FwfIPolicy::rank_evictions(*base_, ctx, count);
    }

    void on_hit(int c, Page p, Timestep t) override { base_->on_hit(c, p, t); }
    void on_fetch_begin(int c, Page p, Timestep t) override { base_->on_fetch_begin(c, p, t); }
    void on_fetch_complete(int c, Page p, Timestep t) override {
        base_->on_fetch_complete(c, p, t);
    }
    void on_evict(Page p, Timestep t) override { base_->on_evict(p, t); }

  private:
    std::unique_ptr<EvictionPolicy> base_;
    std::size_t i_;
    Timestep t_;
};

// Furthest-in-future, offline. A page's distance is the number of requests
// until its next occurrence, minimized over cores (each counted from that
// core's cursor); pages never requested again are furthest of all. Ties are
// broken towards the smallest page id.
class FifPolicy final : public EvictionPolicy {
  public:
    std::string name() const override { return "fif"; }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<FifPolicy>(*this);
    }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (!ctx.cache_full) return {};
        if (!ctx.input) throw EngineError("fif policy needs the full input");
        constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
        std::optional<Page> best;
        std::uint64_t best_d = 0;
        for (const auto& s : ctx.cache.slots) {
            if (s.kind != Slot::Kind::Resident || ctx.is_excluded(s.page)) continue;
            std::uint64_t d = kNever;
            for (std::size_t c = 0; c < ctx.input->core_count(); ++c) {
                const auto& seq = ctx.input->sequences[c];
                for (std::size_t idx = ctx.cursors[c]; idx < seq.size(); ++idx) {
                    if (seq[idx] == s.page) {
                        d = std::min<std::uint64_t>(d, idx - ctx.cursors[c]);
                        break;
                    }
                }
            }
            if (!best || d > best_d || (d == best_d && s.page < *best)) {
                best = s.page;
                best_d = d;
            }
        }
        if (!best) return {};
        return {*best};
    }
};

// --- Tag replay -------------------------------------------------------------

// Reconstructs resident pages and their tags at any timestep from a
// SimResult, mirroring the engine's within-timestep order: core events in
// ascending core index, fetch completions at end of timestep in owner order.
class TagReplay {
  public:
    explicit TagReplay(const SimResult& result) {
        for (std::size_t c = 0; c < result.spans.size(); ++c) {
            for (const auto& sp : result.spans[c]) {
                if (sp.kind == SpanKind::Hit) {
                    events_.push_back({sp.begin, 0, static_cast<int>(c), Ev::Hit, sp.page, {}});
                } else if (sp.kind == SpanKind::FullMiss) {
                    events_.push_back(
                        {sp.begin, 0, static_cast<int>(c), Ev::MissBegin, sp.page, sp.evicted});
                    events_.push_back({sp.end, 1, static_cast<int>(c), Ev::Land, sp.page, {}});
                }
            }
        }
        std::sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
            return std::tie(a.t, a.phase, a.core) < std::tie(b.t, b.phase, b.core);
        });
    }

    struct Resident {
        Page page;
        Timestep tag;
    };

    // State just before core `core` acts at timestep t (earlier cores' same-
    // timestep effects applied). core < 0 means before any core acts.
    std::vector<Resident> residents_before(Timestep t, int core = -1) const {
        std::map<Page, Timestep> tags;
        for (const auto& e : events_) {
            if (e.t > t) break;
            if (e.t == t && (core < 0 || e.phase == 1 || e.core >= core)) break;
            apply(tags, e);
        }
        std::vector<Resident> out;
        out.reserve(tags.size());
        for (auto& [p, tag] : tags) out.push_back({p, tag});
        return out;
    }

  private:
    enum class Ev { Hit, MissBegin, Land };
    struct Event {
        Timestep t;
        int phase;  // 0 = core action, 1 = end-of-timestep landing
        int core;
        Ev kind;
        Page page;
        std::vector<Page> evicted;
    };

    static void apply(std::map<Page, Timestep>& tags, const Event& e) {
        switch (e.kind) {
            case Ev::Hit: tags[e.page] = e.t; break;
            case Ev::MissBegin:
                for (Page v : e.evicted) tags.erase(v);
                break;
            case Ev::Land: tags[e.page] = e.t; break;
        }
    }

    std::vector<Event> events_;
};

// --- LRU-likeness -----------------------------------------------------------

// True iff every eviction `result` performs at timestep t discards a page of
// minimum tag in the cache state right before that eviction. lru_result is
// the reference run used to validate that histories agree through t-1.
inline bool is_lru_like_at(const SimResult& result, const SimResult& lru_result, Timestep t) {
    if (t < 1) throw std::out_of_range("timestep must be >= 1");
    auto prefix_equal = [&](const SimResult& a, const SimResult& b) {
        if (a.schedule.size() != b.schedule.size()) return false;
        for (std::size_t c = 0; c < a.schedule.size(); ++c) {
            const auto& sa = a.schedule[c];
            const auto& sb = b.schedule[c];
            const std::size_t cut = static_cast<std::size_t>(t - 1);
            const std::size_t la = std::min(sa.size(), cut);
            const std::size_t lb = std::min(sb.size(), cut);
            if (la != lb || !std::equal(sa.begin(), sa.begin() + la, sb.begin())) return false;
        }
        return true;
    };
    if (!prefix_equal(result, lru_result))
        throw std::invalid_argument("histories diverge before timestep " + std::to_string(t));

    TagReplay replay(result);
    for (std::size_t c = 0; c < result.spans.size(); ++c) {
        for (const auto& sp : result.spans[c]) {
            if (sp.kind != SpanKind::FullMiss || sp.begin != t || sp.evicted.empty()) continue;
            auto residents = replay.residents_before(t, static_cast<int>(c));
            std::set<Page> gone;
            for (Page victim : sp.evicted) {
                Timestep min_tag = std::numeric_limits<Timestep>::max();
                bool found = false;
                Timestep victim_tag = 0;
                for (const auto& r : residents) {
                    if (gone.count(r.page)) continue;
                    min_tag = std::min(min_tag, r.tag);
                    if (r.page == victim) {
                        victim_tag = r.tag;
                        found = true;
                    }
                }
                if (!found || victim_tag != min_tag) return false;
                gone.insert(victim);
            }
        }
    }
    return true;
}

// --- Hybrid: base policy up to a switch point, tag-based afterwards ---------

// Runs the base policy for every decision before `switch_from`. From
// switch_from on it is tag-based: evict the resident page of minimum tag,
// ties by page id. When `swap_and_demote` is set and the base policy would
// discard a non-LRU page at the switch timestep, the canonical LRU page is
// evicted instead, the kept page inherits the evicted page's tag until it is
// re-accessed or evicted, and the two pages trade tie-break ids for the rest
// of the run.
class HybridTagPolicy final : public EvictionPolicy {
  public:
    HybridTagPolicy(std::unique_ptr<EvictionPolicy> base, Timestep switch_from,
                    bool swap_and_demote, std::string label)
        : base_(std::move(base)),
          switch_from_(switch_from),
          swap_(swap_and_demote),
          label_(std::move(label)) {}
    HybridTagPolicy(const HybridTagPolicy& o)
        : base_(o.base_->clone()),
          switch_from_(o.switch_from_),
          swap_(o.swap_),
          label_(o.label_),
          tag_override_(o.tag_override_),
          key_override_(o.key_override_) {}

    std::string name() const override { return label_; }
    std::unique_ptr<EvictionPolicy> clone() const override {
        return std::make_unique<HybridTagPolicy>(*this);
    }
    void reset() override {
        base_->reset();
        tag_override_.clear();
        key_override_.clear();
    }

    std::vector<Page> decide_evictions(const EvictionContext& ctx) override {
        if (ctx.now < switch_from_) return base_->decide_evictions(ctx);
        if (ctx.now == switch_from_ && swap_) return switch_decision(ctx);
        return tag_decision(ctx);
    }

    void on_hit(int c, Page p, Timestep t) override {
        tag_override_.erase(p);
        base_->on_hit(c, p, t);
    }
    void on_fetch_begin(int c, Page p, Timestep t) override { base_->on_fetch_begin(c, p, t); }
    void on_fetch_complete(int c, Page p, Timestep t) override {
        tag_override_.erase(p);
        base_->on_fetch_complete(c, p, t);
    }
    void on_evict(Page p, Timestep t) override {
        tag_override_.erase(p);
        base_->on_evict(p, t);
    }

    // Last divergence recorded at the switch timestep, if any.
    struct SwapPair {
        Page sigma_lru;
        Page sigma_nlru;
    };
    const std::vector<SwapPair>& swaps() const { return swaps_; }

  private:
    Timestep effective_tag(const Slot& s) const {
        auto it = tag_override_.find(s.page);
        return it == tag_override_.end() ? s.tag : it->second;
    }
    Page effective_key(Page p) const {
        auto it = key_override_.find(p);
        return it == key_override_.end() ? p : it->second;
    }

    std::vector<Page> tag_decision(const EvictionContext& ctx) const {
        if (!ctx.cache_full) return {};
        auto victim = detail::min_tag_page(
            ctx, [this](const Slot& s) { return effective_tag(s); },
            [this](Page p) { return effective_key(p); });
        if (!victim) return {};
        return {*victim};
    }

    std::vector<Page> switch_decision(const EvictionContext& ctx) {
        std::vector<Page> base_pick = base_->decide_evictions(ctx);
        std::vector<Page> chosen;
        std::vector<Page> exclude = ctx.excluded ? *ctx.excluded : std::vector<Page>{};
        for (Page nlru : base_pick) {
            EvictionContext sub{ctx.cache,  ctx.core,  ctx.request,   ctx.now,
                                ctx.cursors, ctx.input, &exclude, ctx.cache_full};
            auto canonical = detail::min_tag_page(
                sub, [this](const Slot& s) { return effective_tag(s); },
                [this](Page p) { return effective_key(p); });
            if (!canonical) break;
            const Page lru = *canonical;
            Timestep lru_tag = 0;
            Timestep nlru_tag = 0;
            bool nlru_found = false;
            for (const auto& s : ctx.cache.slots) {
                if (s.kind != Slot::Kind::Resident) continue;
                if (s.page == lru) lru_tag = effective_tag(s);
                if (s.page == nlru) {
                    nlru_tag = effective_tag(s);
                    nlru_found = true;
                }
            }
            // A tied pick already has minimum tag, so it counts as LRU-like
            // and the base decision stands.
            if (lru == nlru || (nlru_found && nlru_tag == lru_tag)) {
                chosen.push_back(nlru);
                exclude.push_back(nlru);
                continue;
            }
            // Keep sigma_nlru; it inherits sigma_lru's recency. The two pages
            // also trade tie-break ids for the rest of the run so that later
            // tag ties resolve the same way they would for the mirrored pair.
            const Page lru_key = effective_key(lru);
            const Page nlru_key = effective_key(nlru);
            tag_override_[nlru] = lru_tag;
            key_override_[nlru] = lru_key;
            key_override_[lru] = nlru_key;
            swaps_.push_back({lru, nlru});
            chosen.push_back(lru);
            exclude.push_back(lru);
        }
        return chosen;
    }

    std::unique_ptr<EvictionPolicy> base_;
    Timestep switch_from_;
    bool swap_;
    std::string label_;
    std::map<Page, Timestep> tag_override_;
    std::map<Page, Page> key_override_;
    std::vector<SwapPair> swaps_;
};

// B in the surjection argument: base decisions through timestep j, the
// LRU-like choice (with tag demotion) at j+1, tag-based afterwards.
inline std::unique_ptr<EvictionPolicy> derive_lru_like_variant(const EvictionPolicy& base,
                                                               Timestep j) {
    if (j < 0) throw std::out_of_range("j must be >= 0");
    return std::make_unique<HybridTagPolicy>(base.clone(), j + 1, true,
                                             "lru_like:" + base.name() + ":" +
                                                 std::to_string(j));
}

// A in the surjection argument: base decisions through timestep t0-1,
// tag-based from t0 on (no swap).
inline std::unique_ptr<EvictionPolicy> lru_like_after(const EvictionPolicy& base, Timestep t0) {
    return std::make_unique<HybridTagPolicy>(base.clone(), t0, false,
                                             "lru_after:" + base.name() + ":" +
                                                 std::to_string(t0));
}

// --- Laziness ---------------------------------------------------------------

struct LazyCounterexample {
    std::size_t input_index = 0;
    Timestep t = 0;
    int core = 0;  // 1-based for reporting
    Page page = 0;
};

struct LazinessReport {
    // 1: evicts only on a miss; 2: at most one eviction per miss;
    // 3: never evicts a page hit in the same timestep; 4: evicts only when
    // no empty slot is left.
    bool evicts_only_on_miss = true;
    bool evictions_bounded_by_misses = true;
    bool never_evicts_same_timestep_hit = true;
    bool evicts_only_when_full = true;
    std::optional<LazyCounterexample> ce1, ce2, ce3, ce4;

    bool lazy() const {
        return evicts_only_on_miss && evictions_bounded_by_misses &&
               never_evicts_same_timestep_hit && evicts_only_when_full;
    }
};

inline LazinessReport check_lazy(const EvictionPolicy& policy,
                                 const std::vector<MulticoreInput>& inputs,
                                 const SimParams& params) {
    LazinessReport report;
    for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
        SimResult res = simulate_free(inputs[idx], policy, params);

        struct Act {
            Timestep t;
            int core;
            SpanKind kind;
            Page page;
            const std::vector<Page>* evicted;
        };
        std::vector<Act> acts;
        for (std::size_t c = 0; c < res.spans.size(); ++c)
            for (const auto& sp : res.spans[c])
                acts.push_back({sp.begin, static_cast<int>(c), sp.kind, sp.page, &sp.evicted});
        std::sort(acts.begin(), acts.end(), [](const Act& a, const Act& b) {
            return std::tie(a.t, a.core) < std::tie(b.t, b.core);
        });

        std::map<Timestep, std::size_t> misses_at, evictions_at;
        std::map<Timestep, std::set<Page>> hits_at, evicted_at;
        for (const auto& a : acts) {
            if (a.kind == SpanKind::Hit)
                hits_at[a.t].insert(a.page);
            else
                ++misses_at[a.t];
            for (Page v : *a.evicted) {
                ++evictions_at[a.t];
                evicted_at[a.t].insert(v);
            }
        }

        // Occupancy (resident + in-flight) replayed in decision order; each
        // single eviction made while an empty slot existed breaks property 4.
        const std::size_t k = params.cache_size;
        std::size_t occupied = 0;
        for (const auto& a : acts) {
            if (a.kind != SpanKind::FullMiss) continue;
            for (Page v : *a.evicted) {
                if (occupied < k) {
                    report.evicts_only_when_full = false;
                    if (!report.ce4) report.ce4 = LazyCounterexample{idx, a.t, a.core + 1, v};
                }
                --occupied;
            }
            ++occupied;  // reservation for the fetched page
        }

        for (const auto& [t, n] : evictions_at) {
            const std::size_t m = misses_at.count(t) ? misses_at[t] : 0;
            if (m == 0) {
                LazyCounterexample ce{idx, t, 0, *evicted_at[t].begin()};
                report.evicts_only_on_miss = false;
                if (!report.ce1) report.ce1 = ce;
            }
            if (n > m) {
                LazyCounterexample ce{idx, t, 0, *evicted_at[t].begin()};
                report.evictions_bounded_by_misses = false;
                if (!report.ce2) report.ce2 = ce;
            }
        }
        for (const auto& [t, pages] : evicted_at) {
            if (!hits_at.count(t)) continue;
            for (Page v : pages)
                if (hits_at[t].count(v)) {
                    report.never_evicts_same_timestep_hit = false;
                    if (!report.ce3) report.ce3 = LazyCounterexample{idx, t, 0, v};
                }
        }
    }
    return report;
}

// --- Registry ---------------------------------------------------------------

// Names: lru | fifo | fwf | fif | fwf_i:<base>:<i> | fwf_it:<base>:<i>:<t>
inline std::unique_ptr<EvictionPolicy> make_policy(const std::string& name) {
    if (name == "lru") return std::make_unique<LruPolicy>();
    if (name == "fifo") return std::make_unique<FifoPolicy>();
    if (name == "fwf") return std::make_unique<FwfPolicy>();
    if (name == "fif") return std::make_unique<FifPolicy>();

    auto split_tail = [](const std::string& s, std::string& head, std::string& tail) {
        auto pos = s.rfind(':');
        if (pos == std::string::npos) return false;
        head = s.substr(0, pos);
        tail = s.substr(pos + 1);
        return !head.empty() && !tail.empty();
    };
    auto parse_num = [](const std::string& s, std::int64_t& out) {
        try {
            std::size_t used = 0;
            out = std::stoll(s, &used);
            return used == s.size();
        } catch (...) {
            return false;
        }
    };

    if (name.rfind("fwf_i:", 0) == 0) {
        std::string head, tail;
        std::int64_t i = 0;
        if (!split_tail(name, head, tail) || !parse_num(tail, i) || i < 1)
            throw std::invalid_argument("bad policy spec: " + name);
        return std::make_unique<FwfIPolicy>(make_policy(head.substr(6)),
                                            static_cast<std::size_t>(i));
    }
    if (name.rfind("fwf_it:", 0) == 0) {
        std::string head, t_str, i_str;
        std::int64_t t = 0, i = 0;
        if (!split_tail(name, head, t_str) || !parse_num(t_str, t) || t < 0)
            throw std::invalid_argument("bad policy spec: " + name);
        std::string head2;
        if (!split_tail(head, head2, i_str) || !parse_num(i_str, i) || i < 1)
            throw std::invalid_argument("bad policy spec: " + name);
        return std::make_unique<FwfItPolicy>(make_policy(head2.substr(7)),
                                             static_cast<std::size_t>(i), t);
    }
    throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace mcpage
