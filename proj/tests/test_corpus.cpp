#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>
#include <sstream>

#include "embkit/cooc.hpp"
#include "embkit/vocab.hpp"

using namespace embkit;

namespace {

Vocabulary vocab_of(const std::string& text, std::int64_t min_count = 1) {
    std::istringstream in(text);
    return ingest_corpus(in, min_count, true);
}

std::vector<int> ids_of(const std::string& text, const Vocabulary& vocab) {
    std::istringstream in(text);
    return encode(tokenize(in, true), vocab);
}

// Brute-force O(n*L) double loop; the independent oracle for the windowed
// counter.
CooccurrenceTable brute_force_count(const std::vector<int>& tokens,
                                    const Vocabulary& vocab, int window) {
    CooccurrenceTable table;
    table.window = window;
    table.vocab_ref = vocab.checksum();
    const int n = static_cast<int>(tokens.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (std::abs(i - j) <= window) table.add(tokens[i], tokens[j], 1);
        }
    }
    return table;
}

}  // namespace

TEST_CASE("ingest counts tokens and orders by descending count") {
    const auto vocab = vocab_of("a b a b a c");
    REQUIRE(vocab.size() == 3);
    CHECK(vocab.total_tokens == 6);
    CHECK(vocab.words[0] == "a");
    CHECK(vocab.counts[0] == 3);
    CHECK(vocab.words[1] == "b");
    CHECK(vocab.counts[1] == 2);
    CHECK(vocab.words[2] == "c");
    CHECK(vocab.counts[2] == 1);
}

TEST_CASE("ingest ties break lexicographically") {
    const auto vocab = vocab_of("z q z q");
    CHECK(vocab.words[0] == "q");
    CHECK(vocab.words[1] == "z");
}

TEST_CASE("empty corpus raises a dedicated error") {
    CHECK_THROWS_AS(vocab_of(""), EmptyCorpusError);
    CHECK_THROWS_AS(vocab_of("a b c", 2), EmptyCorpusError);  // nothing survives
}

TEST_CASE("min_count filter removes rare words before windowing") {
    const auto vocab = vocab_of("a b a b a c", 2);
    REQUIRE(vocab.size() == 2);
    CHECK(vocab.total_tokens == 5);
    CHECK(vocab.id("c") == -1);

    // positions close up: "a b a b a" with c removed
    const auto ids = ids_of("a b a b a c", vocab);
    CHECK(ids.size() == 5);
}

TEST_CASE("lowercase flag") {
    std::istringstream in("A a B");
    const auto vocab = ingest_corpus(in, 1, false);
    CHECK(vocab.size() == 3);
    std::istringstream in2("A a B");
    const auto lower = ingest_corpus(in2, 1, true);
    CHECK(lower.size() == 2);
    CHECK(lower.counts[lower.id("a")] == 2);
}

TEST_CASE("hand-counted window events on the module corpus") {
    const auto vocab = vocab_of("a b a b a c");
    const auto ids = ids_of("a b a b a c", vocab);
    const auto table = count_cooccurrences_serial(ids, vocab, 1);
    const int a = vocab.id("a"), b = vocab.id("b"), c = vocab.id("c");
    CHECK(table.get(a, b) == 4);
    CHECK(table.get(b, a) == 4);
    CHECK(table.get(a, c) == 1);
    CHECK(table.get(c, a) == 1);
    CHECK(table.total == 10);
    // nearest a-a gap is 2 > L, so the self-pair is absent, not zero-stored
    CHECK(table.get(a, a) == 0);
    CHECK(table.entries.find(CooccurrenceTable::key(a, a)) == table.entries.end());
}

TEST_CASE("adjacent self-pair counted in both directions") {
    const auto vocab = vocab_of("a a");
    const auto table = count_cooccurrences_serial(ids_of("a a", vocab), vocab, 1);
    CHECK(table.get(0, 0) == 2);
    CHECK(table.total == 2);
}

TEST_CASE("window precondition") {
    const auto vocab = vocab_of("a b");
    CHECK_THROWS_AS(count_cooccurrences_serial(ids_of("a b", vocab), vocab, 0),
                    std::invalid_argument);
}

TEST_CASE("counting matches the brute-force oracle on random sequences") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 200);
        const int window = 1 + static_cast<int>(rng() % 5);
        const int v = 1 + static_cast<int>(rng() % 8);
        std::string text;
        for (int i = 0; i < n; ++i) {
            text += static_cast<char>('a' + rng() % v);
            text += ' ';
        }
        const auto vocab = vocab_of(text);
        const auto ids = ids_of(text, vocab);
        const auto got = count_cooccurrences_serial(ids, vocab, window);
        const auto want = brute_force_count(ids, vocab, window);
        CHECK(got.total == want.total);
        CHECK(got.entries == want.entries);
    }
}

TEST_CASE("stored table is symmetric and total equals the sum of counts") {
    std::mt19937_64 rng(7);
    std::string text;
    for (int i = 0; i < 500; ++i) {
        text += static_cast<char>('a' + rng() % 5);
        text += ' ';
    }
    const auto vocab = vocab_of(text);
    const auto table = count_cooccurrences_serial(ids_of(text, vocab), vocab, 3);
    std::int64_t sum = 0;
    for (const auto& [x, y, c] : table.sorted_triplets()) {
        CHECK(c > 0);
        CHECK(table.get(y, x) == c);
        sum += c;
    }
    CHECK(sum == table.total);
}

TEST_CASE("sharded counting is bit-identical to the serial reference") {
    std::mt19937_64 rng(3);
    std::string text;
    for (int i = 0; i < 5000; ++i) {
        text += static_cast<char>('a' + rng() % 6);
        text += ' ';
    }
    const auto vocab = vocab_of(text);
    const auto ids = ids_of(text, vocab);
    const auto serial = count_cooccurrences_serial(ids, vocab, 4);
    const auto parallel = count_cooccurrences(ids, vocab, 4, 4);
    CHECK(serial.total == parallel.total);
    CHECK(serial.entries == parallel.entries);
}

TEST_CASE("vocabulary and co-occurrence files round-trip") {
    const auto vocab = vocab_of("a b a b a c");
    const auto table = count_cooccurrences_serial(ids_of("a b a b a c", vocab), vocab, 2);

    const std::string dir = "test_corpus_io";
    std::filesystem::create_directories(dir);
    save_vocabulary(dir + "/vocab.tsv", vocab);
    const auto vocab2 = load_vocabulary(dir + "/vocab.tsv");
    CHECK(vocab2.checksum() == vocab.checksum());
    CHECK(vocab2.total_tokens == vocab.total_tokens);

    save_cooccurrences(dir + "/cooc.txt", table);
    const auto table2 = load_cooccurrences(dir + "/cooc.txt");
    CHECK(table2.window == table.window);
    CHECK(table2.total == table.total);
    CHECK(table2.vocab_ref == vocab.checksum());
    CHECK(table2.entries == table.entries);
}
