#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "embkit/vocab.hpp"

namespace embkit {

// Sparse symmetric table of ordered co-occurrence events X[x][y].
// Zeros are never stored; total is the grand total T of ordered events.
struct CooccurrenceTable {
    std::unordered_map<std::uint64_t, std::int64_t> entries;
    int window = 0;
    std::int64_t total = 0;
    std::string vocab_ref;

    static std::uint64_t key(int x, int y) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
               static_cast<std::uint32_t>(y);
    }

    std::int64_t get(int x, int y) const {
        auto it = entries.find(key(x, y));
        return it == entries.end() ? 0 : it->second;
    }

    void add(int x, int y, std::int64_t c) {
        entries[key(x, y)] += c;
        total += c;
    }

    // Canonical sorted (x, y, count) view, both orientations included.
    std::vector<std::tuple<int, int, std::int64_t>> sorted_triplets() const;
};

// Flat window: every position j != i with |i-j| <= L contributes one ordered
// event (w_i, w_j). Symmetry holds by construction.
CooccurrenceTable count_cooccurrences_serial(std::span<const int> tokens,
                                             const Vocabulary& vocab, int window);

// Shards the stream over OpenMP threads and merges by summation; the result
// is bit-identical to the serial count.
CooccurrenceTable count_cooccurrences(std::span<const int> tokens,
                                      const Vocabulary& vocab, int window,
                                      int threads = 0);

// Text format: header "window total vocab_checksum", then one "x y count"
// line per unordered pair (x <= y), sorted.
void save_cooccurrences(const std::string& path, const CooccurrenceTable& table);
CooccurrenceTable load_cooccurrences(const std::string& path);

}  // namespace embkit
