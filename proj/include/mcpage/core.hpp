#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core vocabulary for the free-interleaving multicore paging model: pages,
// request sequences, simulation parameters and schedules. Pages are dense
// integers 0..|U|-1; human-readable names live only in rendering maps.

namespace mcpage {

using Page = std::uint32_t;

// Raised when an enumeration would exceed its configured input budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 1-based in all public split APIs; internal arrays are 0-based.
using Timestep = std::int64_t;

struct Universe {
    std::size_t size = 0;  // |U| >= 1

    bool contains(Page p) const { return static_cast<std::size_t>(p) < size; }
};

using RequestSequence = std::vector<Page>;

struct MulticoreInput {
    std::vector<RequestSequence> sequences;

    MulticoreInput() = default;
    explicit MulticoreInput(std::vector<RequestSequence> seqs) : sequences(std::move(seqs)) {}

    std::size_t core_count() const { return sequences.size(); }

    std::size_t total_requests() const {
        std::size_t n = 0;
        for (const auto& s : sequences) n += s.size();
        return n;
    }

    std::vector<std::size_t> length_vector() const {
        std::vector<std::size_t> v;
        v.reserve(sequences.size());
        for (const auto& s : sequences) v.push_back(s.size());
        return v;
    }

    bool operator==(const MulticoreInput&) const = default;
};

// Canonical ordering used by every enumeration: total length, then length
// vector, then flattened core-major content. Keeps scans and reports stable.
inline bool canonical_less(const MulticoreInput& a, const MulticoreInput& b) {
    const std::size_t na = a.total_requests();
    const std::size_t nb = b.total_requests();
    if (na != nb) return na < nb;
    const auto la = a.length_vector();
    const auto lb = b.length_vector();
    if (la != lb) return la < lb;
    return a.sequences < b.sequences;
}

struct SimParams {
    std::size_t cache_size = 1;  // k
    Timestep fetch_delay = 1;    // tau >= 1
    std::size_t core_count = 1;  // p

    bool valid() const { return cache_size >= 1 && fetch_delay >= 1 && core_count >= 1; }
};

// Per-core timeline of served requests; entry t is the request in service by
// that core at timestep t+1 (0-based storage). A core that finished emits
// nothing, so per-core lengths are the per-core finish times.
using Schedule = std::vector<std::vector<Page>>;

struct ValidationResult {
    bool ok = true;
    int core = 0;           // 1-based, first offending core
    std::size_t index = 0;  // 1-based, first offending request
    std::string message;
};

inline ValidationResult validate_input(const MulticoreInput& input, const Universe& universe) {
    for (std::size_t i = 0; i < input.sequences.size(); ++i) {
        const auto& seq = input.sequences[i];
        for (std::size_t j = 0; j < seq.size(); ++j) {
            if (!universe.contains(seq[j])) {
                ValidationResult r;
                r.ok = false;
                r.core = static_cast<int>(i + 1);
                r.index = j + 1;
                r.message = "request to page " + std::to_string(seq[j]) + " at (core " +
                            std::to_string(r.core) + ", index " + std::to_string(r.index) +
                            ") is outside the universe of size " + std::to_string(universe.size);
                return r;
            }
        }
    }
    return ValidationResult{};
}

// Rendering map for CLI output; falls back to p<id>.
struct PageNames {
    std::vector<std::string> names;

    std::string render(Page p) const {
        if (static_cast<std::size_t>(p) < names.size() && !names[p].empty()) return names[p];
        return "p" + std::to_string(p);
    }
};

}  // namespace mcpage
