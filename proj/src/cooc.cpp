#include "embkit/cooc.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace embkit {

std::vector<std::tuple<int, int, std::int64_t>> CooccurrenceTable::sorted_triplets() const {
    std::vector<std::tuple<int, int, std::int64_t>> out;
    out.reserve(entries.size());
    for (const auto& [k, c] : entries) {
        out.emplace_back(static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffffu), c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void count_range(std::span<const int> tokens, int window,
                 std::size_t begin, std::size_t end,
                 std::unordered_map<std::uint64_t, std::int64_t>& entries,
                 std::int64_t& total) {
    const std::size_t n = tokens.size();
    for (std::size_t i = begin; i < end; ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(window) ? i - window : 0;
        const std::size_t hi = std::min(n - 1, i + window);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            ++entries[CooccurrenceTable::key(tokens[i], tokens[j])];
            ++total;
        }
    }
}

}  // namespace

CooccurrenceTable count_cooccurrences_serial(std::span<const int> tokens,
                                             const Vocabulary& vocab, int window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    for (int t : tokens) {
        if (t < 0 || t >= vocab.size()) throw std::invalid_argument("token id out of range");
    }
    CooccurrenceTable table;
    table.window = window;
    table.vocab_ref = vocab.checksum();
    count_range(tokens, window, 0, tokens.size(), table.entries, table.total);
    return table;
}

CooccurrenceTable count_cooccurrences(std::span<const int> tokens,
                                      const Vocabulary& vocab, int window,
                                      int threads) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    for (int t : tokens) {
        if (t < 0 || t >= vocab.size()) throw std::invalid_argument("token id out of range");
    }
#ifdef _OPENMP
    int n_threads = threads > 0 ? threads : omp_get_max_threads();
#else
    int n_threads = 1;
    (void)threads;
#endif
    if (n_threads <= 1 || tokens.size() < 2048) {
        return count_cooccurrences_serial(tokens, vocab, window);
    }

    CooccurrenceTable table;
    table.window = window;
    table.vocab_ref = vocab.checksum();

    // Each shard owns a contiguous range of center positions; windows read
    // into neighboring shards, so merged sums equal the serial count exactly.
    std::vector<std::unordered_map<std::uint64_t, std::int64_t>> partial(n_threads);
    std::vector<std::int64_t> partial_total(n_threads, 0);
    const std::size_t n = tokens.size();
#pragma omp parallel for num_threads(n_threads) schedule(static)
    for (int t = 0; t < n_threads; ++t) {
        std::size_t begin = n * t / n_threads;
        std::size_t end = n * (t + 1) / n_threads;
        count_range(tokens, window, begin, end, partial[t], partial_total[t]);
    }
    for (int t = 0; t < n_threads; ++t) {
        for (const auto& [k, c] : partial[t]) table.entries[k] += c;
        table.total += partial_total[t];
    }
    return table;
}

void save_cooccurrences(const std::string& path, const CooccurrenceTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << table.window << ' ' << table.total << ' ' << table.vocab_ref << '\n';
    for (const auto& [x, y, c] : table.sorted_triplets()) {
        if (x > y) continue;  // symmetric; store each unordered pair once
        out << x << ' ' << y << ' ' << c << '\n';
    }
}

CooccurrenceTable load_cooccurrences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    CooccurrenceTable table;
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty co-occurrence file: " + path);
    {
        std::istringstream hs(header);
        if (!(hs >> table.window >> table.total >> table.vocab_ref)) {
            throw std::runtime_error("bad co-occurrence header: " + header);
        }
    }
    int x, y;
    std::int64_t c;
    std::int64_t check_total = 0;
    while (in >> x >> y >> c) {
        table.entries[CooccurrenceTable::key(x, y)] = c;
        check_total += c;
        if (x != y) {
            table.entries[CooccurrenceTable::key(y, x)] = c;
            check_total += c;
        }
    }
    if (check_total != table.total) {
        throw std::runtime_error("co-occurrence total mismatch in " + path);
    }
    return table;
}

}  // namespace embkit
