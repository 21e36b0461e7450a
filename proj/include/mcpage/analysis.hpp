#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "core.hpp"
#include "engine.hpp"
#include "locality.hpp"
#include "measures.hpp"
#include "policies.hpp"
#include "scan.hpp"

// Measure comparison between eviction policies: exhaustive cost tables,
// bijective and cyclic dominance verdicts, the unzip construction that turns
// a natural surjection into a bijection, and the sequence mappings used to
// trade one non-LRU eviction for an LRU-like one (continuation swaps,
// inverse inputs, the four-case pi map).

namespace mcpage {

// --- universe enumeration ----------------------------------------------

// Materializes a scan in canonical order; with f given, keeps only the
// inputs consistent with f.
inline std::vector<MulticoreInput> enumerate_universe(const UniverseScan& scan,
                                                      const ConcaveFunction* f = nullptr,
                                                      std::uint64_t budget = 50'000'000ULL) {
    std::vector<MulticoreInput> out;
    for_each_input(
        scan,
        [&](const MulticoreInput& in) {
            if (!f || is_consistent(in, *f).consistent) out.push_back(in);
        },
        budget);
    return out;
}

// --- cost tables ---------------------------------------------------------

struct CostRow {
    MulticoreInput input;
    std::int64_t cost_a = 0;
    std::int64_t cost_b = 0;
};

struct CostTable {
    Measure measure = Measure::TotalTime;
    std::vector<CostRow> rows;
};

// Row i is always inputs[i], whatever the job count, so parallel runs are
// byte-for-byte reproducible.
inline CostTable build_cost_table(const std::vector<MulticoreInput>& inputs,
                                  const EvictionPolicy& a, const EvictionPolicy& b,
                                  Measure measure, const SimParams& params, int jobs = 1) {
    CostTable table;
    table.measure = measure;
    table.rows.resize(inputs.size());
    auto work = [&](std::size_t first, std::size_t step) {
        for (std::size_t i = first; i < inputs.size(); i += step) {
            CostRow& row = table.rows[i];
            row.input = inputs[i];
            row.cost_a = evaluate(measure, simulate_free(inputs[i], a, params));
            row.cost_b = evaluate(measure, simulate_free(inputs[i], b, params));
        }
    };
    if (jobs <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) pool.emplace_back(work, static_cast<std::size_t>(w), jobs);
        for (auto& th : pool) th.join();
    }
    return table;
}

// --- dominance and relation verdicts --------------------------------------

// True iff ascending-sorted a is pointwise <= b. On a finite set this is
// exactly the existence of a bijection pi with a(R) <= b(pi(R)).
inline bool dominance_check(const std::vector<std::int64_t>& costs_a,
                            const std::vector<std::int64_t>& costs_b) {
    if (costs_a.size() != costs_b.size())
        throw std::invalid_argument("cost lists differ in length");
    for (std::size_t i = 0; i < costs_a.size(); ++i)
        if (costs_a[i] > costs_b[i]) return false;
    return true;
}

enum class Verdict { ANoWorse, BNoWorse, Equivalent, Incomparable };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::ANoWorse: return "A<=B";
        case Verdict::BNoWorse: return "B<=A";
        case Verdict::Equivalent: return "equivalent";
        case Verdict::Incomparable: return "incomparable-at-horizon";
    }
    return "?";
}

struct RelationReport {
    Verdict verdict = Verdict::Equivalent;
    bool strict = false;                    // one-sided verdict with a cost gap
    std::optional<MulticoreInput> witness;  // input sitting at the first gap
    std::int64_t witness_cost_a = 0;
    std::int64_t witness_cost_b = 0;
    std::int64_t gap_threshold = -1;  // cyclic: first threshold where counts split
    std::int64_t horizon = 0;         // max total length (bijective) or ceiling (cyclic)
};

namespace detail {

inline Verdict combine_verdict(bool a_ok, bool b_ok) {
    if (a_ok && b_ok) return Verdict::Equivalent;
    if (a_ok) return Verdict::ANoWorse;
    if (b_ok) return Verdict::BNoWorse;
    return Verdict::Incomparable;
}

inline bool canonical_length_less(const std::vector<std::size_t>& x,
                                  const std::vector<std::size_t>& y) {
    std::size_t sx = 0, sy = 0;
    for (auto v : x) sx += v;
    for (auto v : y) sy += v;
    if (sx != sy) return sx < sy;
    return x < y;
}

}  // namespace detail

// Verdict over explicit per-partition cost multisets; each pair holds the A
// and B costs of one length-vector partition. Witness costs are the matched
// pair at the first gap (no input attached at this level).
inline RelationReport bijective_verdict(
    const std::vector<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>&
        partitions) {
    RelationReport rep;
    bool a_ok = true, b_ok = true;
    bool have_gap = false;
    for (const auto& [raw_a, raw_b] : partitions) {
        auto sa = raw_a;
        auto sb = raw_b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        a_ok = a_ok && dominance_check(sa, sb);
        b_ok = b_ok && dominance_check(sb, sa);
        if (!have_gap)
            for (std::size_t i = 0; i < sa.size(); ++i)
                if (sa[i] != sb[i]) {
                    rep.witness_cost_a = sa[i];
                    rep.witness_cost_b = sb[i];
                    have_gap = true;
                    break;
                }
    }
    rep.verdict = detail::combine_verdict(a_ok, b_ok);
    rep.strict = have_gap && rep.verdict != Verdict::Equivalent &&
                 rep.verdict != Verdict::Incomparable;
    return rep;
}

// Bijective analysis proper: dominance inside every length-vector partition
// of the enumerated inputs. The witness is the input occupying the first
// differing matched slot, taken from the side whose cost is larger there.
inline RelationReport bijective_relation(const EvictionPolicy& a, const EvictionPolicy& b,
                                         const std::vector<MulticoreInput>& inputs,
                                         Measure measure, const SimParams& params,
                                         int jobs = 1) {
    CostTable table = build_cost_table(inputs, a, b, measure, params, jobs);
    std::map<std::vector<std::size_t>, std::vector<std::size_t>,
             bool (*)(const std::vector<std::size_t>&, const std::vector<std::size_t>&)>
        parts(detail::canonical_length_less);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        parts[table.rows[i].input.length_vector()].push_back(i);

    RelationReport rep;
    bool a_ok = true, b_ok = true;
    for (const auto& [len, rows] : parts) {
        auto by_a = rows;
        auto by_b = rows;
        std::sort(by_a.begin(), by_a.end(), [&](std::size_t x, std::size_t y) {
            return table.rows[x].cost_a < table.rows[y].cost_a;
        });
        std::sort(by_b.begin(), by_b.end(), [&](std::size_t x, std::size_t y) {
            return table.rows[x].cost_b < table.rows[y].cost_b;
        });
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::int64_t ca = table.rows[by_a[i]].cost_a;
            const std::int64_t cb = table.rows[by_b[i]].cost_b;
            a_ok = a_ok && ca <= cb;
            b_ok = b_ok && cb <= ca;
            if (ca != cb && !rep.witness) {
                rep.witness = table.rows[ca < cb ? by_b[i] : by_a[i]].input;
                rep.witness_cost_a = ca;
                rep.witness_cost_b = cb;
            }
        }
    }
    rep.verdict = detail::combine_verdict(a_ok, b_ok);
    rep.strict = rep.witness.has_value() && (rep.verdict == Verdict::ANoWorse ||
                                             rep.verdict == Verdict::BNoWorse);
    for (const auto& in : inputs)
        rep.horizon = std::max(rep.horizon, static_cast<std::int64_t>(in.total_requests()));
    return rep;
}

// Cumulative-count dominance at a cost ceiling: A<=B iff for every threshold
// x <= c there are at least as many A-costs <= x as B-costs <= x. Entries
// above the ceiling are invisible.
inline RelationReport cyclic_verdict(std::vector<std::int64_t> costs_a,
                                     std::vector<std::int64_t> costs_b,
                                     std::int64_t cost_ceiling) {
    auto trim = [&](std::vector<std::int64_t>& v) {
        std::erase_if(v, [&](std::int64_t c) { return c > cost_ceiling; });
        std::sort(v.begin(), v.end());
    };
    trim(costs_a);
    trim(costs_b);
    auto count_le = [](const std::vector<std::int64_t>& v, std::int64_t x) {
        return static_cast<std::int64_t>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
    };
    std::vector<std::int64_t> thresholds;
    thresholds.reserve(costs_a.size() + costs_b.size());
    thresholds.insert(thresholds.end(), costs_a.begin(), costs_a.end());
    thresholds.insert(thresholds.end(), costs_b.begin(), costs_b.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    RelationReport rep;
    rep.horizon = cost_ceiling;
    bool a_ok = true, b_ok = true;
    for (std::int64_t x : thresholds) {
        const std::int64_t na = count_le(costs_a, x);
        const std::int64_t nb = count_le(costs_b, x);
        a_ok = a_ok && na >= nb;
        b_ok = b_ok && nb >= na;
        if (na != nb && rep.gap_threshold < 0) rep.gap_threshold = x;
    }
    rep.verdict = detail::combine_verdict(a_ok, b_ok);
    rep.strict = rep.gap_threshold >= 0 && (rep.verdict == Verdict::ANoWorse ||
                                            rep.verdict == Verdict::BNoWorse);
    return rep;
}

namespace detail {

// The scan must contain every input that can cost <= c, otherwise the count
// comparison is meaningless. Costs grow at least linearly in the request
// count, so per-core and total length floors are enough. Miss count admits
// no such floor (hits are free), hence no closure scan exists for it.
inline void check_closure(const UniverseScan& scan, Measure measure, const SimParams& params,
                          std::int64_t c) {
    if (measure == Measure::MissCount)
        throw std::invalid_argument(
            "closure rule unsatisfiable for miss count: inputs of any length can cost <= the "
            "ceiling");
    if (c < 0) throw std::invalid_argument("cost ceiling must be >= 0");
    const auto per_core = static_cast<std::size_t>(c);
    const std::size_t total = bounded_check_horizon(measure, params, c);
    std::string missing;
    if (!scan.include_empty) missing = "the empty input must be included";
    for (std::size_t i = 0; i < scan.min_len.size() && missing.empty(); ++i)
        if (scan.min_len[i] > 0) missing = "per-core length floors must be zero";
    for (std::size_t i = 0; i < scan.max_len.size() && missing.empty(); ++i)
        if (scan.max_len[i] < per_core)
            missing = "per-core length bound must be >= " + std::to_string(per_core);
    if (missing.empty() && scan.total_cap && *scan.total_cap < total)
        missing = "total length bound must be >= " + std::to_string(total);
    if (!missing.empty())
        throw std::invalid_argument("scan violates the closure rule for ceiling " +
                                    std::to_string(c) + ": " + missing);
}

}  // namespace detail

// Cyclic analysis at an explicit horizon. The scan is validated against the
// closure rule first; with f given both cost lists range over the
// f-consistent inputs only.
inline RelationReport cyclic_relation(const EvictionPolicy& a, const EvictionPolicy& b,
                                      const UniverseScan& scan, Measure measure,
                                      const SimParams& params, std::int64_t cost_ceiling,
                                      const ConcaveFunction* f = nullptr, int jobs = 1,
                                      std::uint64_t budget = 50'000'000ULL) {
    detail::check_closure(scan, measure, params, cost_ceiling);
    const std::vector<MulticoreInput> inputs = enumerate_universe(scan, f, budget);
    CostTable table = build_cost_table(inputs, a, b, measure, params, jobs);
    std::vector<std::int64_t> costs_a, costs_b;
    costs_a.reserve(table.rows.size());
    costs_b.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        costs_a.push_back(row.cost_a);
        costs_b.push_back(row.cost_b);
    }
    RelationReport rep = cyclic_verdict(costs_a, costs_b, cost_ceiling);
    if (rep.gap_threshold >= 0) {
        // Canonically first input that is cheap on the winning side of the
        // gap but expensive on the other.
        const std::int64_t x = rep.gap_threshold;
        const bool a_rich = cyclic_verdict(costs_a, costs_b, x).verdict != Verdict::BNoWorse;
        for (const auto& row : table.rows) {
            const bool hit = a_rich ? (row.cost_a <= x && row.cost_b > x)
                                    : (row.cost_b <= x && row.cost_a > x);
            if (hit) {
                rep.witness = row.input;
                rep.witness_cost_a = row.cost_a;
                rep.witness_cost_b = row.cost_b;
                break;
            }
        }
    }
    return rep;
}

// --- natural surjections and unzipping -------------------------------------

// Explicit finite mapping between a domain costed under A and an image
// window costed under B. map[i] is the image index of domain element i;
// disengaged elements carry no pair.
struct FiniteMapping {
    std::vector<std::int64_t> domain_costs;       // A(x_i)
    std::vector<std::int64_t> image_costs;        // B(y_j), the whole finite window
    std::vector<std::optional<std::size_t>> map;  // domain index -> image index

    std::vector<std::size_t> multiplicity() const {
        std::vector<std::size_t> m(image_costs.size(), 0);
        for (const auto& to : map)
            if (to) ++m[*to];
        return m;
    }

    bool injective() const {
        for (auto c : multiplicity())
            if (c > 1) return false;
        return true;
    }

    bool surjective() const {
        for (auto c : multiplicity())
            if (c == 0) return false;
        return true;
    }

    // A(x) <= B(pi(x)) on every mapped pair.
    bool cost_respecting() const {
        for (std::size_t i = 0; i < map.size(); ++i)
            if (map[i] && domain_costs[i] > image_costs[*map[i]]) return false;
        return true;
    }
};

struct UnzipReport {
    FiniteMapping mapping;
    std::vector<std::size_t> deferred;  // domain indices whose new image fell off the window
};

// Within each m-to-1 multiplicity class, orders the hit images by B-cost,
// orders each image's preimages by A-cost, and reassigns x_{i,j} to image
// number m*i+j of the class, extending past the originally hit images with
// the cheapest unmapped window elements. Pairs that run off the window are
// deferred rather than mapped.
inline UnzipReport unzip(const FiniteMapping& in,
                         std::optional<std::size_t> claimed_m = std::nullopt) {
    if (in.map.size() != in.domain_costs.size())
        throw std::invalid_argument("mapping and domain sizes differ");
    for (const auto& to : in.map)
        if (to && *to >= in.image_costs.size())
            throw std::invalid_argument("mapping points outside the image window");

    const std::vector<std::size_t> mult = in.multiplicity();
    if (claimed_m)
        for (std::size_t y = 0; y < mult.size(); ++y)
            if (mult[y] != 0 && mult[y] != *claimed_m)
                throw std::invalid_argument(
                    "multiplicity class is not uniform: image " + std::to_string(y) + " has " +
                    std::to_string(mult[y]) + " preimages, claimed " +
                    std::to_string(*claimed_m));

    auto by_cost = [&](const std::vector<std::int64_t>& costs) {
        return [&costs](std::size_t x, std::size_t y) {
            if (costs[x] != costs[y]) return costs[x] < costs[y];
            return x < y;
        };
    };

    std::map<std::size_t, std::vector<std::size_t>> classes;  // m -> hit images
    std::vector<std::size_t> pool;                            // unmapped window elements
    for (std::size_t y = 0; y < mult.size(); ++y)
        (mult[y] == 0 ? pool : classes[mult[y]]).push_back(y);
    std::sort(pool.begin(), pool.end(), by_cost(in.image_costs));

    UnzipReport out;
    out.mapping.domain_costs = in.domain_costs;
    out.mapping.image_costs = in.image_costs;
    out.mapping.map.assign(in.map.size(), std::nullopt);

    std::size_t drawn = 0;  // pool elements consumed so far
    for (auto& [m, images] : classes) {
        std::sort(images.begin(), images.end(), by_cost(in.image_costs));
        std::vector<std::vector<std::size_t>> preimages(images.size());
        std::map<std::size_t, std::size_t> rank;  // image -> position in sorted order
        for (std::size_t i = 0; i < images.size(); ++i) rank[images[i]] = i;
        for (std::size_t x = 0; x < in.map.size(); ++x)
            if (in.map[x] && rank.count(*in.map[x])) preimages[rank[*in.map[x]]].push_back(x);
        for (auto& pre : preimages) std::sort(pre.begin(), pre.end(), by_cost(in.domain_costs));

        for (std::size_t i = 0; i < images.size(); ++i) {
            for (std::size_t jj = 0; jj < m; ++jj) {
                const std::size_t q = m * i + jj;
                const std::size_t x = preimages[i][jj];
                if (q < images.size()) {
                    out.mapping.map[x] = images[q];
                } else if (drawn < pool.size()) {
                    out.mapping.map[x] = pool[drawn++];
                } else {
                    out.deferred.push_back(x);
                }
            }
        }
    }
    std::sort(out.deferred.begin(), out.deferred.end());
    return out;
}

// --- continuation swap (the 2-cycle bijection) ------------------------------

struct ContinuationPair {
    RequestSequence seq1;  // core 1 from the split point on
    RequestSequence seq2;  // core 2
    bool operator==(const ContinuationPair&) const = default;
};

// Case 1 trades a fresh page q against the differing page x:
// (q s, x s') <-> (x^tau s, q s'). Case 2 trades a cached page a:
// (a s, x s') <-> (x s, a^tau s'). Either direction of a pair is accepted,
// so applying the map twice returns the original continuation.
inline ContinuationPair nice_bijection_map(const ContinuationPair& cont, int case_id, Page x,
                                           Page q_or_a, Timestep tau) {
    if (case_id != 1 && case_id != 2) throw std::invalid_argument("case must be 1 or 2");
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (x == q_or_a) throw std::invalid_argument("x and q/a must be distinct pages");
    const auto& s1 = cont.seq1;
    const auto& s2 = cont.seq2;
    const auto run = static_cast<std::size_t>(tau);
    auto starts_with_run = [&](const RequestSequence& s, Page p) {
        if (s.size() < run) return false;
        for (std::size_t i = 0; i < run; ++i)
            if (s[i] != p) return false;
        return true;
    };
    auto tail = [](const RequestSequence& s, std::size_t from) {
        return RequestSequence(s.begin() + static_cast<std::ptrdiff_t>(from), s.end());
    };
    auto prepend = [](Page p, std::size_t n, RequestSequence rest) {
        RequestSequence out(n, p);
        out.insert(out.end(), rest.begin(), rest.end());
        return out;
    };

    if (case_id == 1) {
        if (!s1.empty() && s1.front() == q_or_a && !s2.empty() && s2.front() == x)
            return {prepend(x, run, tail(s1, 1)), prepend(q_or_a, 1, tail(s2, 1))};
        if (starts_with_run(s1, x) && !s2.empty() && s2.front() == q_or_a)
            return {prepend(q_or_a, 1, tail(s1, run)), prepend(x, 1, tail(s2, 1))};
        throw std::invalid_argument("continuation does not match either case-1 form");
    }
    if (!s1.empty() && s1.front() == q_or_a && !s2.empty() && s2.front() == x)
        return {prepend(x, 1, tail(s1, 1)), prepend(q_or_a, run, tail(s2, 1))};
    if (!s1.empty() && s1.front() == x && starts_with_run(s2, q_or_a))
        return {prepend(q_or_a, 1, tail(s1, 1)), prepend(x, 1, tail(s2, run))};
    throw std::invalid_argument("continuation does not match either case-2 form");
}

// --- inverse inputs ----------------------------------------------------------

// Shortens the hit runs on sigma that start inside the fetch window
// [t, t+tau) so that a policy that must fetch sigma at t reproduces the
// given schedule: the initiating run loses tau-1 requests (the fetch itself
// occupies those timesteps) and every waiting run loses b-1, where b is its
// overlap with the fetch window. Returns nothing when the runs are too short
// or broken by misses.
inline std::optional<MulticoreInput> try_inverse_input(Page sigma, const SimResult& result_b,
                                                       const MulticoreInput& input, Timestep t,
                                                       const SimParams& params) {
    const std::size_t p = input.core_count();
    if (result_b.spans.size() != p)
        throw std::invalid_argument("simulation result does not match the input");
    const Timestep tau = params.fetch_delay;

    bool initiated = false;
    for (std::size_t c = 0; c < p && !initiated; ++c)
        for (const auto& sp : result_b.spans[c])
            if (sp.begin == t && sp.page == sigma && sp.kind == SpanKind::Hit) {
                initiated = true;
                break;
            }
    if (!initiated) return std::nullopt;

    MulticoreInput out = input;
    for (std::size_t c = 0; c < p; ++c) {
        const auto& spans = result_b.spans[c];
        std::size_t first = spans.size();
        for (std::size_t i = 0; i < spans.size(); ++i)
            if (spans[i].page == sigma && spans[i].begin >= t) {
                first = i;
                break;
            }
        if (first == spans.size() || spans[first].begin >= t + tau) continue;
        if (spans[first].kind != SpanKind::Hit) return std::nullopt;
        const Timestep b = t + tau - spans[first].begin;  // tau for the initiating run
        std::size_t len = 0;
        while (first + len < spans.size() && spans[first + len].page == sigma &&
               spans[first + len].kind == SpanKind::Hit &&
               spans[first + len].begin == spans[first].begin + static_cast<Timestep>(len))
            ++len;
        if (static_cast<Timestep>(len) < b) return std::nullopt;
        const std::size_t keep = len - static_cast<std::size_t>(b) + 1;
        auto& seq = out.sequences[c];
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(first + keep),
                  seq.begin() + static_cast<std::ptrdiff_t>(first + len));
    }
    return out;
}

inline MulticoreInput inverse_input(Page sigma, const SimResult& result_b,
                                    const MulticoreInput& input, Timestep t,
                                    const SimParams& params) {
    auto inv = try_inverse_input(sigma, result_b, input, t, params);
    if (!inv) throw std::invalid_argument("inverse undefined");
    return *inv;
}

// --- the four-case pi map ----------------------------------------------------

struct PiImage {
    int case_tag = 0;                     // 0: no divergence at j+1, identity
    std::optional<MulticoreInput> image;  // empty exactly for case 4
    Page sigma_lru = 0;
    Page sigma_nlru = 0;
};

// pi for one derived step: B = derive_lru_like_variant(A, j). Case 1
// complements the post-(j+1) suffix when that stays consistent with f;
// case 2 keeps R when B misses again before its first request to sigma_lru;
// case 3 shortens R to the inverse input when B coasts on hits into the
// divergent page; everything else is case 4, whose image is assigned by
// verify_pi_surjection.
inline PiImage pi_map(const MulticoreInput& r, const EvictionPolicy& a, const EvictionPolicy& b,
                      Timestep j, const ConcaveFunction& f, const SimParams& params,
                      std::uint64_t window_budget = 10'000'000ULL) {
    Simulation sim(r, b, params);
    sim.run();
    const auto* hybrid = dynamic_cast<const HybridTagPolicy*>(&sim.policy());
    if (!hybrid) throw std::invalid_argument("B must be the derived LRU-like variant of A");
    std::vector<HybridTagPolicy::SwapPair> swaps = hybrid->swaps();
    const SimResult rb = sim.take_result();
    if (swaps.empty()) return PiImage{0, r, 0, 0};

    std::sort(swaps.begin(), swaps.end(),
              [](const HybridTagPolicy::SwapPair& u, const HybridTagPolicy::SwapPair& v) {
                  return std::pair(u.sigma_lru, u.sigma_nlru) <
                         std::pair(v.sigma_lru, v.sigma_nlru);
              });
    const Page lru = swaps.front().sigma_lru;
    const Page nlru = swaps.front().sigma_nlru;

    const SimResult ra = simulate_free(r, a, params);
    bool a_evicts_nlru = false;
    for (const auto& core_spans : ra.spans)
        for (const auto& sp : core_spans)
            if (sp.begin == j + 1 &&
                std::find(sp.evicted.begin(), sp.evicted.end(), nlru) != sp.evicted.end())
                a_evicts_nlru = true;
    if (!a_evicts_nlru)
        throw std::invalid_argument("A does not evict the divergent page at timestep " +
                                    std::to_string(j + 1));

    // The faulting core is the one whose miss at j+1 discards sigma_lru in B.
    // Cores after it already see the diverged cache within timestep j+1, so
    // the suffix starts right after that eviction in (timestep, core) order.
    std::size_t c_star = rb.spans.size();
    for (std::size_t c = 0; c < rb.spans.size() && c_star == rb.spans.size(); ++c)
        for (const auto& sp : rb.spans[c])
            if (sp.begin == j + 1 &&
                std::find(sp.evicted.begin(), sp.evicted.end(), lru) != sp.evicted.end()) {
                c_star = c;
                break;
            }
    auto in_suffix = [&](const SpanKind, Timestep begin, std::size_t core) {
        return begin > j + 1 || (begin == j + 1 && core > c_star);
    };

    // Case 1: complement every request served after the divergence.
    MulticoreInput flipped;
    flipped.sequences.resize(rb.spans.size());
    for (std::size_t c = 0; c < rb.spans.size(); ++c)
        for (const auto& sp : rb.spans[c])
            flipped.sequences[c].push_back(in_suffix(sp.kind, sp.begin, c)
                                               ? complement_page(sp.page, lru, nlru)
                                               : sp.page);
    if (is_consistent(flipped, f, window_budget).consistent)
        return PiImage{1, std::move(flipped), lru, nlru};

    constexpr Timestep kNever = std::numeric_limits<Timestep>::max();
    Timestep t_lru = kNever, first_miss = kNever, t_nlru = kNever;
    bool nlru_hit = false;
    for (std::size_t c = 0; c < rb.spans.size(); ++c)
        for (const auto& sp : rb.spans[c]) {
            if (!in_suffix(sp.kind, sp.begin, c)) continue;
            if (sp.page == lru) t_lru = std::min(t_lru, sp.begin);
            if (sp.kind != SpanKind::Hit) first_miss = std::min(first_miss, sp.begin);
            if (sp.page == nlru && sp.begin < t_nlru) {
                t_nlru = sp.begin;
                nlru_hit = sp.kind == SpanKind::Hit;
            }
        }
    if (first_miss < t_lru) return PiImage{2, r, lru, nlru};
    if (t_nlru != kNever && nlru_hit)
        if (auto inv = try_inverse_input(nlru, rb, r, t_nlru, params))
            return PiImage{3, std::move(*inv), lru, nlru};
    return PiImage{4, std::nullopt, lru, nlru};
}

// --- surjection verification --------------------------------------------------

struct PiSurjectionReport {
    std::vector<MulticoreInput> domain;  // f-consistent inputs in canonical order
    std::vector<std::int64_t> cost_a;    // total time per element under A
    std::vector<std::int64_t> cost_b;    // and under B
    std::vector<int> case_tags;
    std::vector<std::optional<std::size_t>> image_index;  // into domain
    std::vector<std::size_t> off_domain;  // elements whose image left the scan
    std::vector<std::size_t> overflow;    // case-4 elements with no costlier input left
    std::vector<std::size_t> multiplicity;  // preimage count per domain element
    std::size_t max_multiplicity = 0;
    bool covers_codomain = false;
    bool cost_ok = true;  // B(R) <= A(pi(R)) on every mapped pair
};

// Applies pi_map across the f-consistent scan. Case-4 elements are assigned
// greedily, in canonical order, to the first strictly costlier input that is
// not yet doubly used; running out of candidates is reported as horizon
// overflow, not as failure.
inline PiSurjectionReport verify_pi_surjection(const UniverseScan& scan, const EvictionPolicy& a,
                                               const EvictionPolicy& b, Timestep j,
                                               const ConcaveFunction& f, const SimParams& params,
                                               std::uint64_t budget = 50'000'000ULL) {
    PiSurjectionReport rep;
    rep.domain = enumerate_universe(scan, &f, budget);
    const std::size_t n = rep.domain.size();
    rep.cost_a.resize(n);
    rep.cost_b.resize(n);
    rep.case_tags.assign(n, 0);
    rep.image_index.assign(n, std::nullopt);
    rep.multiplicity.assign(n, 0);

    std::map<MulticoreInput, std::size_t, bool (*)(const MulticoreInput&, const MulticoreInput&)>
        index(canonical_less);
    for (std::size_t i = 0; i < n; ++i) {
        index[rep.domain[i]] = i;
        rep.cost_a[i] = simulate_free(rep.domain[i], a, params).total_time();
        rep.cost_b[i] = simulate_free(rep.domain[i], b, params).total_time();
    }

    std::vector<std::size_t> pending;  // case-4 elements, canonical order
    for (std::size_t i = 0; i < n; ++i) {
        PiImage im = pi_map(rep.domain[i], a, b, j, f, params);
        rep.case_tags[i] = im.case_tag;
        if (im.case_tag == 4) {
            pending.push_back(i);
            continue;
        }
        auto it = index.find(*im.image);
        if (it == index.end()) {
            rep.off_domain.push_back(i);
            const std::int64_t image_cost = simulate_free(*im.image, a, params).total_time();
            if (rep.cost_b[i] > image_cost) rep.cost_ok = false;
            continue;
        }
        rep.image_index[i] = it->second;
        ++rep.multiplicity[it->second];
        if (rep.cost_b[i] > rep.cost_a[it->second]) rep.cost_ok = false;
    }
    for (std::size_t i : pending) {
        bool placed = false;
        for (std::size_t y = 0; y < n && !placed; ++y) {
            if (rep.multiplicity[y] >= 2 || rep.cost_a[y] <= rep.cost_b[i]) continue;
            rep.image_index[i] = y;
            ++rep.multiplicity[y];
            placed = true;
        }
        if (!placed) rep.overflow.push_back(i);
    }

    rep.covers_codomain = true;
    for (std::size_t y = 0; y < n; ++y) {
        rep.max_multiplicity = std::max(rep.max_multiplicity, rep.multiplicity[y]);
        if (rep.multiplicity[y] == 0) rep.covers_codomain = false;
    }
    return rep;
}

}  // namespace mcpage
