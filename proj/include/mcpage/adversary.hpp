#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "engine.hpp"
#include "measures.hpp"

// Lower-bound input families: the core-private cycling family that starves
// LRU, the adaptive red/blue construction driven against a live simulation,
// and the ratio curves that chart online cost against an offline baseline.

namespace mcpage {

// p sequences, each cycling its own k/p+1 private pages ell times. Core c
// owns pages [c*(k/p+1), (c+1)*(k/p+1)).
inline MulticoreInput gen_lru_hass(std::size_t k, std::size_t p, std::size_t ell) {
    if (p == 0 || k == 0 || k % p != 0)
        throw std::invalid_argument("the core count must divide the cache size");
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
    const std::size_t cycle = k / p + 1;
    MulticoreInput in;
    in.sequences.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        auto& seq = in.sequences[c];
        seq.reserve(ell * cycle);
        for (std::size_t rep = 0; rep < ell; ++rep)
            for (std::size_t j = 0; j < cycle; ++j)
                seq.push_back(static_cast<Page>(c * cycle + j));
    }
    return in;
}

// Bookkeeping for one subsequent round of the red/blue construction. The q
// counters come from the opposing hard phase and are rounded up to even so
// the alternation template is well formed; the rounding is recorded, not
// asserted away.
struct LowerSharedRound {
    Page b_star = 0;
    Page r_star = 0;
    std::size_t q_blue = 0;  // sizes core 1's alternation
    std::size_t q_red = 0;   // sizes core 2's alternation
    std::size_t pad_blue = 0;
    std::size_t pad_red = 0;
};

struct LowerSharedResult {
    MulticoreInput input;
    SimResult run;  // the generating simulation, kept for self-consistency checks
    std::size_t ell = 0;
    std::size_t rounds = 0;  // first round plus phi subsequent ones
    std::vector<LowerSharedRound> subsequent;

    // Request-index ranges per core; every phase has exactly ell requests.
    std::pair<std::size_t, std::size_t> easy_range(std::size_t round) const {
        return {round * 2 * ell, round * 2 * ell + ell};
    }
    std::pair<std::size_t, std::size_t> hard_range(std::size_t round) const {
        return {round * 2 * ell + ell, (round + 1) * 2 * ell};
    }
};

namespace detail {

inline std::string lower_shared_dump(const Simulation& sim, std::size_t core,
                                     const char* what) {
    std::ostringstream os;
    os << "gen_lower_shared: no " << what << " for core " << core + 1 << " at t=" << sim.now()
       << "; cache:";
    for (const auto& s : sim.cache().slots) {
        switch (s.kind) {
            case Slot::Kind::Empty: os << " _"; break;
            case Slot::Kind::Reserved: os << " (" << s.page << ")"; break;
            case Slot::Kind::Resident: os << " " << s.page; break;
        }
    }
    return os.str();
}

}  // namespace detail

// Adaptive generator for the red/blue lower-bound input. Core 1 requests
// blue pages 0..k-1 in easy phases and red pages k..2k-1 in hard phases,
// core 2 the other way around. Hard phases request, one timestep at a time,
// the lowest-id page of the hard color absent from the simulated cache of
// target. Subsequent easy phases request an anchor pair resident at the
// round boundary, alternating for q requests and then repeating the own
// anchor, where q counts the opposing hard phase's requests up to its
// (k-1)-th distinct page.
inline LowerSharedResult gen_lower_shared_full(std::size_t k, Timestep tau, std::size_t ell,
                                               std::size_t phi, const EvictionPolicy& target,
                                               const SimParams& params) {
    if (params.core_count != 2)
        throw std::invalid_argument("the construction needs exactly two cores");
    if (params.cache_size != k || params.fetch_delay != tau)
        throw std::invalid_argument("k and tau must match the simulation parameters");
    if (k < 4 || k % 2 != 0) throw std::invalid_argument("k must be even and >= 4");
    if (ell < k || ell % 2 != 0) throw std::invalid_argument("ell must be even and >= k");

    const auto blue = [](std::size_t j) { return static_cast<Page>(j); };
    const auto red = [&](std::size_t j) { return static_cast<Page>(k + j); };

    LowerSharedResult out;
    out.ell = ell;
    out.rounds = phi + 1;
    out.subsequent.resize(phi);

    MulticoreInput first;
    first.sequences.resize(2);
    for (std::size_t i = 0; i < ell; ++i) {
        first.sequences[0].push_back(blue(i % 2));
        first.sequences[1].push_back(red(i % 2));
    }
    Simulation sim(std::move(first), target, params);

    auto lowest_absent = [&](bool want_red, std::size_t core) -> Page {
        for (std::size_t j = 0; j < k; ++j) {
            const Page pg = want_red ? red(j) : blue(j);
            bool present = false;
            for (const auto& s : sim.cache().slots)
                if (s.kind != Slot::Kind::Empty && s.page == pg) {
                    present = true;
                    break;
                }
            if (!present) return pg;
        }
        throw std::runtime_error(detail::lower_shared_dump(
            sim, core, want_red ? "absent red page" : "absent blue page"));
    };
    auto lowest_resident = [&](bool want_red, std::size_t core) -> Page {
        std::optional<Page> best;
        for (const auto& s : sim.cache().slots) {
            if (s.kind != Slot::Kind::Resident) continue;
            const bool is_red = s.page >= k;
            if (is_red != want_red) continue;
            if (!best || s.page < *best) best = s.page;
        }
        if (best) return *best;
        throw std::runtime_error(detail::lower_shared_dump(
            sim, core, want_red ? "resident red page" : "resident blue page"));
    };
    // Requests until the (k-1)-th distinct page of [begin, end), ell if the
    // phase never reaches that many. The phase may still be half generated
    // when the other core reaches its boundary; we count what exists.
    auto q_counter = [&](std::size_t other_core, std::size_t begin, std::size_t end) {
        const RequestSequence& seq = sim.input().sequences[other_core];
        std::set<Page> seen;
        std::size_t cnt = 0;
        for (std::size_t i = begin; i < end && i < seq.size(); ++i) {
            ++cnt;
            seen.insert(seq[i]);
            if (seen.size() == k - 1) return cnt;
        }
        return ell;
    };

    struct GenState {
        std::size_t round = 0;
        std::size_t hard_left = 0;
        bool in_hard = true;
    };
    GenState gs[2] = {{0, ell, true}, {0, ell, true}};
    std::vector<bool> anchored(phi, false);

    while (!sim.done()) {
        for (std::size_t c = 0; c < 2; ++c) {
            if (!sim.wants_request(c)) continue;
            GenState& g = gs[c];
            if (g.in_hard && g.hard_left > 0) {
                sim.append_request(c, lowest_absent(c == 0, c));
                --g.hard_left;
                if (g.hard_left == 0) g.in_hard = false;
                continue;
            }
            if (g.round + 1 > phi) continue;  // nothing left; the core winds down
            LowerSharedRound& info = out.subsequent[g.round];
            if (!anchored[g.round]) {
                info.b_star = lowest_resident(false, c);
                info.r_star = lowest_resident(true, c);
                anchored[g.round] = true;
            }
            const auto [hb, he] = out.hard_range(g.round);
            const std::size_t q_raw = q_counter(1 - c, hb, he);
            const std::size_t q = q_raw + (q_raw % 2);
            if (c == 0) {
                info.q_blue = q;
                info.pad_blue = q - q_raw;
            } else {
                info.q_red = q;
                info.pad_red = q - q_raw;
            }
            const Page own = (c == 0) ? info.b_star : info.r_star;
            const Page other = (c == 0) ? info.r_star : info.b_star;
            for (std::size_t i = 0; i < q; ++i) sim.append_request(c, i % 2 == 0 ? own : other);
            for (std::size_t i = q; i < ell; ++i) sim.append_request(c, own);
            ++g.round;
            g.in_hard = true;
            g.hard_left = ell;
        }
        sim.step();
    }

    out.input = sim.input();
    out.run = sim.take_result();
    return out;
}

inline MulticoreInput gen_lower_shared(std::size_t k, Timestep tau, std::size_t ell,
                                       std::size_t phi, const EvictionPolicy& target,
                                       const SimParams& params) {
    return gen_lower_shared_full(k, tau, ell, phi, target, params).input;
}

// --- ratio curves -------------------------------------------------------

struct RatioRow {
    std::size_t size = 0;  // generator argument
    std::size_t n = 0;     // total requests generated
    std::int64_t cost_online = 0;
    std::int64_t cost_baseline = 0;
    double ratio = 0.0;
};

struct RatioCurveReport {
    std::vector<RatioRow> rows;
    bool increasing = true;  // strictly, in row order
};

inline RatioCurveReport ratio_curve(
    const std::function<MulticoreInput(std::size_t)>& generator, const EvictionPolicy& online,
    const std::function<std::int64_t(const MulticoreInput&)>& baseline,
    const std::vector<std::size_t>& sizes, Measure measure, const SimParams& params) {
    RatioCurveReport rep;
    for (std::size_t s : sizes) {
        RatioRow row;
        row.size = s;
        const MulticoreInput in = generator(s);
        for (const auto& seq : in.sequences) row.n += seq.size();
        row.cost_online = evaluate(measure, simulate_free(in, online, params));
        row.cost_baseline = baseline(in);
        row.ratio = row.cost_baseline > 0 ? static_cast<double>(row.cost_online) /
                                                static_cast<double>(row.cost_baseline)
                                          : 0.0;
        rep.rows.push_back(row);
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].ratio <= rep.rows[i - 1].ratio) rep.increasing = false;
    return rep;
}

// Serves the whole input core by core under single-core semantics; the
// offline stand-in for the cycling family.
inline std::function<std::int64_t(const MulticoreInput&)> sequential_baseline(
    const EvictionPolicy& policy, Measure measure, const SimParams& params) {
    std::shared_ptr<EvictionPolicy> pol = policy.clone();
    return [pol, measure, params](const MulticoreInput& in) {
        return evaluate(measure, simulate_explicit(in, sequential_order(in), *pol, params));
    };
}

}  // namespace mcpage
