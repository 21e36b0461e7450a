#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "core.hpp"

// Exhaustive input enumeration. A scan fixes a universe, a core count and
// per-core length caps (plus an optional cap on the total request count) and
// walks every input in canonical order: total length first, then the length
// vector lexicographically, then content as a core-major base-|U| number.

namespace mcpage {

struct UniverseScan {
    std::size_t universe = 1;
    std::size_t cores = 1;
    std::vector<std::size_t> max_len;         // per-core cap (size == cores)
    std::vector<std::size_t> min_len;         // per-core floor; empty means all zero
    std::optional<std::size_t> total_cap;     // sum of lengths <= total_cap
    bool include_empty = true;

    static UniverseScan box(std::size_t universe, std::size_t cores, std::size_t max_per_core) {
        UniverseScan s;
        s.universe = universe;
        s.cores = cores;
        s.max_len.assign(cores, max_per_core);
        return s;
    }

    // All inputs whose total request count is at most `total`.
    static UniverseScan simplex(std::size_t universe, std::size_t cores, std::size_t total) {
        UniverseScan s;
        s.universe = universe;
        s.cores = cores;
        s.max_len.assign(cores, total);
        s.total_cap = total;
        return s;
    }

    // Inputs whose per-core lengths match `lengths` exactly.
    static UniverseScan exact(std::size_t universe, std::vector<std::size_t> lengths) {
        UniverseScan s;
        s.universe = universe;
        s.cores = lengths.size();
        s.max_len = lengths;
        s.min_len = std::move(lengths);
        return s;
    }
};

namespace detail {

inline void collect_vectors(const UniverseScan& scan, std::size_t core,
                            std::vector<std::size_t>& cur, std::size_t used,
                            std::vector<std::vector<std::size_t>>& out) {
    if (core == scan.cores) {
        if (used == 0 && !scan.include_empty) return;
        out.push_back(cur);
        return;
    }
    const std::size_t cap = scan.total_cap ? *scan.total_cap - used : scan.max_len[core];
    const std::size_t hi = std::min(scan.max_len[core], cap);
    const std::size_t lo = scan.min_len.empty() ? 0 : scan.min_len[core];
    for (std::size_t n = lo; n <= hi; ++n) {
        cur[core] = n;
        collect_vectors(scan, core + 1, cur, used + n, out);
    }
}

}  // namespace detail

// Admissible length vectors in canonical order (total, then lexicographic).
inline std::vector<std::vector<std::size_t>> length_vectors(const UniverseScan& scan) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(scan.cores, 0);
    detail::collect_vectors(scan, 0, cur, 0, out);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        std::size_t sa = 0, sb = 0;
        for (auto v : a) sa += v;
        for (auto v : b) sb += v;
        if (sa != sb) return sa < sb;
        return a < b;
    });
    return out;
}

inline std::uint64_t pow_u64(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    while (exp--) r *= base;
    return r;
}

inline std::uint64_t scan_size(const UniverseScan& scan) {
    std::uint64_t total = 0;
    for (const auto& vec : length_vectors(scan)) {
        std::size_t n = 0;
        for (auto v : vec) n += v;
        total += pow_u64(scan.universe, n);
    }
    return total;
}

// Decodes the input at a canonical index; the inverse of enumeration order.
inline MulticoreInput scan_input_at(const UniverseScan& scan, std::uint64_t index) {
    for (const auto& vec : length_vectors(scan)) {
        std::size_t n = 0;
        for (auto v : vec) n += v;
        const std::uint64_t block = pow_u64(scan.universe, n);
        if (index >= block) {
            index -= block;
            continue;
        }
        MulticoreInput input;
        input.sequences.resize(scan.cores);
        // Core-major, leftmost request most significant.
        std::uint64_t rem = index;
        std::vector<Page> flat(n, 0);
        for (std::size_t pos = n; pos-- > 0;) {
            flat[pos] = static_cast<Page>(rem % scan.universe);
            rem /= scan.universe;
        }
        std::size_t off = 0;
        for (std::size_t c = 0; c < scan.cores; ++c) {
            input.sequences[c].assign(flat.begin() + off, flat.begin() + off + vec[c]);
            off += vec[c];
        }
        return input;
    }
    throw std::out_of_range("scan index out of range");
}

// Visits every input in canonical order. The visitor may return void or bool;
// returning false stops the walk early.
template <typename Fn>
void for_each_input(const UniverseScan& scan, Fn&& fn,
                    std::uint64_t budget = 50'000'000ULL) {
    if (scan_size(scan) > budget)
        throw BudgetError("scan of " + std::to_string(scan_size(scan)) +
                          " inputs exceeds the budget of " + std::to_string(budget));
    MulticoreInput input;
    input.sequences.resize(scan.cores);
    for (const auto& vec : length_vectors(scan)) {
        std::size_t n = 0;
        for (auto v : vec) n += v;
        for (std::size_t c = 0; c < scan.cores; ++c) input.sequences[c].assign(vec[c], 0);
        // Odometer over the flattened content.
        std::vector<std::pair<std::size_t, std::size_t>> slots;  // (core, index)
        for (std::size_t c = 0; c < scan.cores; ++c)
            for (std::size_t i = 0; i < vec[c]; ++i) slots.emplace_back(c, i);
        while (true) {
            if constexpr (std::is_void_v<decltype(fn(input))>) {
                fn(input);
            } else {
                if (!fn(input)) return;
            }
            std::size_t pos = n;
            while (pos-- > 0) {
                auto [c, i] = slots[pos];
                if (static_cast<std::size_t>(input.sequences[c][i]) + 1 < scan.universe) {
                    ++input.sequences[c][i];
                    for (std::size_t q = pos + 1; q < n; ++q)
                        input.sequences[slots[q].first][slots[q].second] = 0;
                    break;
                }
                if (pos == 0) {
                    pos = SIZE_MAX;
                    break;
                }
            }
            if (pos == SIZE_MAX || n == 0) break;
        }
    }
}

}  // namespace mcpage
