#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core.hpp"
#include "engine.hpp"

// Max-Model locality: an input exhibits locality described by a function f
// when every multicore window of width w (one run of w consecutive requests
// per core, offsets chosen independently) touches at most f(w) distinct
// pages.

namespace mcpage {

struct ConcaveFunction {
    std::size_t core_count = 1;  // p
    std::vector<double> table;   // f(1), f(2), ...

    // f beyond the table keeps growing by the final tabulated difference.
    double at(std::size_t w) const {
        if (w == 0 || table.empty()) return 0.0;
        if (w <= table.size()) return table[w - 1];
        const double last = table.back();
        const double diff =
            table.size() >= 2 ? table.back() - table[table.size() - 2] : 0.0;
        return last + diff * static_cast<double>(w - table.size());
    }
};

struct ConcaveVerdict {
    bool ok = true;
    std::size_t offending_n = 0;  // first n violating a rule, 1-based
    std::string message;
};

// Default mode checks the growth condition in the form
// f(n+1) - f(n) <= f(n+2) - f(n+1); strict_concave reverses the comparison
// to the usual diminishing-increments reading. Both are exposed because the
// two readings disagree and downstream checks may want either.
inline ConcaveVerdict validate_concave(const ConcaveFunction& f, bool strict_concave = false) {
    auto fail = [](std::size_t n, std::string msg) {
        return ConcaveVerdict{false, n, std::move(msg)};
    };
    if (f.table.size() < 2) return fail(0, "table needs at least two entries");
    if (f.table.front() != static_cast<double>(f.core_count))
        return fail(1, "f(1) must equal the core count " + std::to_string(f.core_count));
    for (std::size_t n = 0; n + 1 < f.table.size(); ++n)
        if (f.table[n + 1] < f.table[n])
            return fail(n + 1, "f must be non-decreasing at n=" + std::to_string(n + 1));
    for (std::size_t n = 0; n + 2 < f.table.size(); ++n) {
        const double d1 = f.table[n + 1] - f.table[n];
        const double d2 = f.table[n + 2] - f.table[n + 1];
        if (!strict_concave && d1 > d2)
            return fail(n + 1, "f(n+1)-f(n) <= f(n+2)-f(n+1) fails at n=" + std::to_string(n + 1));
        if (strict_concave && d1 < d2)
            return fail(n + 1, "f(n+1)-f(n) >= f(n+2)-f(n+1) fails at n=" + std::to_string(n + 1));
    }
    // Every integer between p and max f must be attained somewhere.
    std::set<long long> attained;
    for (double v : f.table) {
        const double r = std::round(v);
        if (std::abs(v - r) < 1e-9) attained.insert(static_cast<long long>(r));
    }
    const long long lo = static_cast<long long>(f.core_count);
    const long long hi = static_cast<long long>(std::floor(f.table.back() + 1e-9));
    for (long long v = lo; v <= hi; ++v)
        if (!attained.count(v))
            return fail(0, "integer " + std::to_string(v) + " is never attained");
    return {};
}

struct WindowProfile {
    std::vector<std::size_t> max_distinct;  // index w-1 holds profile(w)

    std::size_t at(std::size_t w) const { return max_distinct.at(w - 1); }
    std::size_t width() const { return max_distinct.size(); }
};

namespace detail {

// Maximum distinct pages over all per-core offset choices for one width.
// Cores shorter than the width contribute their whole sequence.
inline std::size_t max_distinct_for_width(const MulticoreInput& input, std::size_t w,
                                          std::uint64_t& budget) {
    struct CoreWindows {
        const RequestSequence* seq;
        std::size_t len;      // window length for this core
        std::size_t offsets;  // number of start offsets
    };
    std::vector<CoreWindows> cores;
    for (const auto& seq : input.sequences) {
        if (seq.empty()) continue;
        if (seq.size() <= w)
            cores.push_back({&seq, seq.size(), 1});
        else
            cores.push_back({&seq, w, seq.size() - w + 1});
    }
    if (cores.empty()) return 0;

    std::uint64_t combos = 1;
    for (const auto& c : cores) combos *= c.offsets;
    if (combos > budget)
        throw BudgetError("window scan at width " + std::to_string(w) + " needs " +
                          std::to_string(combos) + " offset combinations");
    budget -= combos;

    std::vector<std::size_t> offset(cores.size(), 0);
    std::size_t best = 0;
    while (true) {
        std::set<Page> pages;
        for (std::size_t c = 0; c < cores.size(); ++c)
            for (std::size_t i = 0; i < cores[c].len; ++i)
                pages.insert((*cores[c].seq)[offset[c] + i]);
        best = std::max(best, pages.size());
        std::size_t c = cores.size();
        while (c-- > 0) {
            if (++offset[c] < cores[c].offsets) break;
            offset[c] = 0;
            if (c == 0) return best;
        }
    }
}

}  // namespace detail

inline WindowProfile window_profile(const MulticoreInput& input, std::size_t w_max,
                                    std::uint64_t budget = 10'000'000ULL) {
    std::size_t longest = 0;
    for (const auto& seq : input.sequences) longest = std::max(longest, seq.size());
    if (w_max > longest) throw std::out_of_range("window width beyond the longest sequence");
    WindowProfile profile;
    for (std::size_t w = 1; w <= w_max; ++w)
        profile.max_distinct.push_back(detail::max_distinct_for_width(input, w, budget));
    return profile;
}

struct ConsistencyVerdict {
    bool consistent = true;
    std::size_t witness_width = 0;     // first width whose profile exceeds f
    std::size_t witness_distinct = 0;  // the profile value there
};

inline ConsistencyVerdict is_consistent(const MulticoreInput& input, const ConcaveFunction& f,
                                        std::uint64_t budget = 10'000'000ULL) {
    std::size_t longest = 0;
    for (const auto& seq : input.sequences) longest = std::max(longest, seq.size());
    if (longest == 0) return {};
    WindowProfile profile = window_profile(input, longest, budget);
    for (std::size_t w = 1; w <= longest; ++w)
        if (static_cast<double>(profile.at(w)) > f.at(w) + 1e-9)
            return {false, w, profile.at(w)};
    return {};
}

inline Page complement_page(Page page, Page beta, Page delta) {
    if (page == beta) return delta;
    if (page == delta) return beta;
    return page;
}

inline MulticoreInput complement_input(const MulticoreInput& input, Page beta, Page delta) {
    if (beta == delta) throw std::invalid_argument("complement needs two distinct pages");
    MulticoreInput out = input;
    for (auto& seq : out.sequences)
        for (Page& p : seq) p = complement_page(p, beta, delta);
    return out;
}

// --- Local-order lemma checker ----------------------------------------------

struct LocalOrderReport {
    enum class Status { NotApplicable, Holds, Violated };
    Status status = Status::NotApplicable;
    std::string reason;  // precondition that failed when not applicable
    bool suffix_has_beta = false;
    std::optional<Timestep> first_beta_in_suffix;    // schedule timesteps
    std::optional<Timestep> first_delta_in_suffix;
};

// Checks one instance of the order lemma: serve the input, split at j, and
// if (1) the input is consistent with f, (2) beta occurs in the schedule
// prefix, (3) no delta follows the last prefix beta, and (4) keeping the
// prefix requests while complementing the requests that start after j breaks
// consistency, then the request suffix must contain beta and no suffix delta
// may be scheduled strictly before the first suffix beta.
inline LocalOrderReport check_local_order(const MulticoreInput& input,
                                          const EvictionPolicy& policy,
                                          const SimParams& params, const ConcaveFunction& f,
                                          Timestep j, Page beta, Page delta,
                                          std::uint64_t budget = 10'000'000ULL) {
    LocalOrderReport rep;
    if (beta == delta) throw std::invalid_argument("beta and delta must differ");
    SimResult result = simulate_free(input, policy, params);
    if (j < 1 || j >= result.makespan()) {
        rep.reason = "j outside [1, makespan)";
        return rep;
    }
    if (!is_consistent(input, f, budget).consistent) {
        rep.reason = "input not consistent with f";
        return rep;
    }

    Timestep last_beta_prefix = 0;
    Timestep last_delta_prefix = 0;
    for (const auto& core : result.schedule)
        for (std::size_t idx = 0; idx < core.size(); ++idx) {
            const Timestep t = static_cast<Timestep>(idx + 1);
            if (t > j) break;
            if (core[idx] == beta) last_beta_prefix = std::max(last_beta_prefix, t);
            if (core[idx] == delta) last_delta_prefix = std::max(last_delta_prefix, t);
        }
    if (last_beta_prefix == 0) {
        rep.reason = "beta not in the schedule prefix";
        return rep;
    }
    if (last_delta_prefix > last_beta_prefix) {
        rep.reason = "delta follows the last prefix beta";
        return rep;
    }

    // Keep requests that started by j, complement those that start later.
    MulticoreInput flipped;
    flipped.sequences.resize(input.core_count());
    for (std::size_t c = 0; c < result.spans.size(); ++c)
        for (const auto& sp : result.spans[c])
            flipped.sequences[c].push_back(
                sp.begin <= j ? sp.page : complement_page(sp.page, beta, delta));
    if (is_consistent(flipped, f, budget).consistent) {
        rep.reason = "complemented suffix is still consistent";
        return rep;
    }

    for (const auto& core : result.spans)
        for (const auto& sp : core)
            if (sp.begin > j && sp.page == beta) rep.suffix_has_beta = true;
    for (const auto& core : result.schedule)
        for (std::size_t idx = static_cast<std::size_t>(j); idx < core.size(); ++idx) {
            const Timestep t = static_cast<Timestep>(idx + 1);
            if (core[idx] == beta &&
                (!rep.first_beta_in_suffix || t < *rep.first_beta_in_suffix))
                rep.first_beta_in_suffix = t;
            if (core[idx] == delta &&
                (!rep.first_delta_in_suffix || t < *rep.first_delta_in_suffix))
                rep.first_delta_in_suffix = t;
        }

    const bool delta_jumps_queue = rep.first_delta_in_suffix && rep.first_beta_in_suffix &&
                                   *rep.first_delta_in_suffix < *rep.first_beta_in_suffix;
    rep.status = (rep.suffix_has_beta && !delta_jumps_queue) ? LocalOrderReport::Status::Holds
                                                             : LocalOrderReport::Status::Violated;
    return rep;
}

}  // namespace mcpage
