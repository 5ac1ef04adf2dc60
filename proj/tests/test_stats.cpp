#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "embkit/stats.hpp"

using namespace embkit;

namespace {

CorpusStats stats_of(const std::string& text, int window) {
    std::istringstream in(text);
    const auto vocab = ingest_corpus(in, 1, true);
    std::istringstream in2(text);
    const auto ids = encode(tokenize(in2, true), vocab);
    return CorpusStats(count_cooccurrences_serial(ids, vocab, window),
                       static_cast<int>(vocab.size()));
}

std::string random_text(std::uint64_t seed, int n, int v) {
    std::mt19937_64 rng(seed);
    std::string text;
    for (int i = 0; i < n; ++i) {
        text += static_cast<char>('a' + rng() % v);
        text += ' ';
    }
    return text;
}

}  // namespace

TEST_CASE("probabilities and PMI on the hand-counted corpus") {
    const auto s = stats_of("a b a b a c", 1);
    // ids: a=0, b=1, c=2 (frequency order)
    CHECK(s.p_marginal(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.p_marginal(1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s.p_marginal(2) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(s.p_joint(0, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s.p_joint(1, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s.p_joint(0, 2) == doctest::Approx(0.1).epsilon(1e-15));

    REQUIRE(s.pmi(0, 1).has_value());
    CHECK(*s.pmi(0, 1) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(*s.cspmi(0, 1) == doctest::Approx(-0.2231435513142097).epsilon(1e-12));
    CHECK(*s.cspmi(0, 2) == doctest::Approx(-1.6094379124341).epsilon(1e-12));
}

TEST_CASE("unobserved pairs are nullopt, never a numeric sentinel") {
    const auto s = stats_of("a b a b a c", 1);
    CHECK_FALSE(s.pmi(0, 0).has_value());   // a-a never within the window
    CHECK_FALSE(s.pmi(1, 2).has_value());   // b-c never within the window
    CHECK_FALSE(s.cspmi(0, 0).has_value());
}

TEST_CASE("csPMI identity and symmetry hold on a random corpus") {
    const auto s = stats_of(random_text(11, 400, 5), 3);
    for (int x = 0; x < s.vocab_size(); ++x) {
        for (int y = 0; y < s.vocab_size(); ++y) {
            const auto c = s.cspmi(x, y);
            if (!c) continue;
            // csPMI = 2 log p(x,y) - log p(x) - log p(y)
            const double want = 2.0 * std::log(s.p_joint(x, y)) -
                                std::log(s.p_marginal(x)) - std::log(s.p_marginal(y));
            CHECK(*c == doctest::Approx(want).epsilon(1e-12));
            CHECK(*c == doctest::Approx(*s.cspmi(y, x)).epsilon(1e-15));
            CHECK(*s.pmi(x, y) == doctest::Approx(*s.pmi(y, x)).epsilon(1e-15));
        }
    }
}

TEST_CASE("shifted PMI matrix imputes zeros with a mask") {
    const auto s = stats_of("a b a b a c", 1);
    const auto m1 = s.shifted_pmi_matrix(1);
    CHECK(m1.values(0, 1) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(m1.observed(0, 1));
    CHECK(m1.values(0, 0) == 0.0);
    CHECK_FALSE(m1.observed(0, 0));
    CHECK(m1.values(1, 2) == 0.0);
    CHECK_FALSE(m1.observed(1, 2));
    CHECK((m1.values - m1.values.transpose().eval()).cwiseAbs().maxCoeff() == 0.0);

    // k = 2 subtracts log 2 on observed entries only
    const auto m2 = s.shifted_pmi_matrix(2);
    CHECK(m2.values(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m2.observed(0, 1));
    CHECK(m2.values(0, 0) == 0.0);

    for (int k : {1, 2, 5}) {
        const auto mk = s.shifted_pmi_matrix(k);
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y)
                if (mk.observed(x, y))
                    CHECK(mk.values(x, y) ==
                          doctest::Approx(*s.pmi(x, y) - std::log(k)).epsilon(1e-12));
    }
}

TEST_CASE("mixed-product identity: 2M[x][y]-M[x][x]-M[y][y] for every k") {
    // corpus with adjacent repeats so self-pairs are observed
    const auto s = stats_of(random_text(5, 600, 3), 2);
    for (int k : {1, 2, 7}) {
        const auto m = s.shifted_pmi_matrix(k);
        for (int x = 0; x < s.vocab_size(); ++x) {
            for (int y = 0; y < s.vocab_size(); ++y) {
                if (!m.observed(x, y) || !m.observed(x, x) || !m.observed(y, y)) continue;
                const double lhs = 2.0 * m.values(x, y) - m.values(x, x) - m.values(y, y);
                const double cond = std::log(s.p_joint(x, x) / s.p_marginal(x)) +
                                    std::log(s.p_joint(y, y) / s.p_marginal(y));
                // independent of k: csPMI(x,y) - log p(x|x)p(y|y)
                CHECK(lhs == doctest::Approx(*s.cspmi(x, y) - cond).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("conditional ratio profile over common support") {
    // hand-built table: X[0][2]=4, X[1][2]=2, X[0][1]=2 (symmetric)
    CooccurrenceTable table;
    table.window = 1;
    table.add(0, 2, 4); table.add(2, 0, 4);
    table.add(1, 2, 2); table.add(2, 1, 2);
    table.add(0, 1, 2); table.add(1, 0, 2);
    const CorpusStats s(std::move(table), 3);
    // rows: 0 -> {1:2, 2:4}, 1 -> {0:2, 2:2}; common support = {2}
    const auto profile = s.conditional_ratio_profile(0, 1);
    REQUIRE(profile.size() == 1);
    CHECK(profile[0].first == 2);
    // log[(4/6)/(2/4)] = log(4/3)
    CHECK(profile[0].second == doctest::Approx(0.28768207245178085).epsilon(1e-12));

    // identical words give the all-zero profile over their own support
    const auto self = s.conditional_ratio_profile(0, 0);
    REQUIRE(self.size() == 2);
    for (const auto& [w, v] : self) CHECK(v == 0.0);
}

TEST_CASE("pearson correlation") {
    const std::vector<double> xs{1, 2, 3}, up{2, 4, 6}, down{6, 4, 2};
    CHECK(pearson_r(xs, up) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pearson_r(xs, down) == doctest::Approx(-1.0).epsilon(1e-14));

    const std::vector<double> a{1, 2, 3, 100}, b{1, 3, 2, 120};
    CHECK(pearson_r(a, b) == doctest::Approx(0.9998807402951713).epsilon(1e-12));

    const std::vector<double> flat{5, 5, 5};
    CHECK_THROWS_AS(pearson_r(xs, flat), std::invalid_argument);
    CHECK_THROWS_AS(pearson_r(xs, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(pearson_r(std::vector<double>{1.0}, std::vector<double>{2.0}),
                    std::invalid_argument);
}

TEST_CASE("least squares fit") {
    const std::vector<double> xs{0, 1, 2}, ys{1, 3, 5};
    const auto fit = least_squares_fit(xs, ys);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fit.r == doctest::Approx(1.0).epsilon(1e-14));

    const std::vector<double> a{1, 2, 3, 100}, b{1, 3, 2, 120};
    const auto f2 = least_squares_fit(a, b);
    CHECK(f2.slope == doctest::Approx(1.203886190145732).epsilon(1e-12));
    CHECK(f2.intercept == doctest::Approx(-0.4029840388618986).epsilon(1e-12));
}

TEST_CASE("pair CSV export lists stored pairs once with frozen columns") {
    std::istringstream in("a b a b a c");
    const auto vocab = ingest_corpus(in, 1, true);
    std::istringstream in2("a b a b a c");
    const auto ids = encode(tokenize(in2, true), vocab);
    const CorpusStats s(count_cooccurrences_serial(ids, vocab, 1),
                        static_cast<int>(vocab.size()));
    std::filesystem::create_directories("test_stats_io");
    s.export_pair_csv("test_stats_io/pairs.csv", vocab);
    std::ifstream f("test_stats_io/pairs.csv");
    std::string header, line;
    REQUIRE(std::getline(f, header));
    CHECK(header == "word_x,word_y,count,pmi,cspmi");
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 2);  // (a,b) and (a,c), x <= y each stored once
}
