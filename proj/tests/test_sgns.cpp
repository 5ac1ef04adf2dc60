#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "embkit/sgns.hpp"

using namespace embkit;

namespace {

Vocabulary vocab_of(const std::string& text) {
    std::istringstream in(text);
    return ingest_corpus(in, 1, true);
}

std::vector<int> ids_of(const std::string& text, const Vocabulary& vocab) {
    std::istringstream in(text);
    return encode(tokenize(in, true), vocab);
}

std::string alternating(int n) {
    std::string text;
    for (int i = 0; i < n; ++i) text += (i % 2 ? "b " : "a ");
    return text;
}

// Central finite difference of the pair objective along one coordinate.
double numeric_partial(std::function<double(double)> f, double x0, double h = 1e-5) {
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = 6;
    for (int trial = 0; trial < 200; ++trial) {
        const int n_neg = 1 + static_cast<int>(rng() % 5);
        Eigen::VectorXd w(d), c(d);
        std::vector<Eigen::VectorXd> negs(n_neg, Eigen::VectorXd(d));
        for (int i = 0; i < d; ++i) {
            w(i) = gauss(rng);
            c(i) = gauss(rng);
            for (auto& neg : negs) neg(i) = gauss(rng);
        }

        Eigen::VectorXd gw, gc;
        std::vector<Eigen::VectorXd> gn;
        sgns_pair_gradients(w, c, negs, gw, gc, gn);
        REQUIRE(gn.size() == negs.size());

        auto check_coord = [&](Eigen::VectorXd& vec, int i, double analytic) {
            const double x0 = vec(i);
            const double numeric = numeric_partial(
                [&](double x) {
                    vec(i) = x;
                    const double v = sgns_pair_objective(w, c, negs);
                    vec(i) = x0;
                    return v;
                },
                x0);
            CHECK(std::abs(analytic - numeric) <=
                  1e-4 * std::max({1e-6, std::abs(analytic), std::abs(numeric)}));
        };
        for (int i = 0; i < d; ++i) {
            check_coord(w, i, gw(i));
            check_coord(c, i, gc(i));
            for (std::size_t k = 0; k < negs.size(); ++k)
                check_coord(negs[k], i, gn[k](i));
        }
    }
}

TEST_CASE("training is bit-identical for a fixed seed") {
    const auto text = alternating(400) + "c a b c ";
    const auto vocab = vocab_of(text);
    const auto ids = ids_of(text, vocab);
    SgnsConfig cfg;
    cfg.d = 8;
    cfg.epochs = 2;
    cfg.window = 2;
    cfg.seed = 17;
    const auto a = train_sgns(ids, vocab, cfg);
    const auto b = train_sgns(ids, vocab, cfg);
    CHECK((a.W - b.W).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.C - b.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.provenance == Provenance::sgns);
    CHECK(a.shift_k == cfg.negatives);

    SgnsConfig other = cfg;
    other.seed = 18;
    const auto c = train_sgns(ids, vocab, other);
    CHECK((a.W - c.W).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("co-occurring pair scores above a never-co-occurring self pair") {
    const auto text = alternating(2000);
    const auto vocab = vocab_of(text);
    const auto ids = ids_of(text, vocab);
    SgnsConfig cfg;
    cfg.d = 10;
    cfg.window = 1;
    cfg.epochs = 5;
    cfg.negatives = 2;
    cfg.seed = 5;
    const auto space = train_sgns(ids, vocab, cfg);
    const int a = vocab.id("a"), b = vocab.id("b");
    CHECK(space.mixed(a, b) > space.mixed(a, a));
    CHECK(space.mixed(b, a) > space.mixed(b, b));
}

TEST_CASE("mean loss decreases over the first epochs") {
    const auto text = alternating(3000);
    const auto vocab = vocab_of(text);
    const auto ids = ids_of(text, vocab);
    SgnsConfig cfg;
    cfg.d = 10;
    cfg.window = 1;
    cfg.epochs = 3;
    cfg.seed = 1;
    std::vector<TrainLogRow> log;
    train_sgns(ids, vocab, cfg, &log);
    REQUIRE(log.size() == 3);
    CHECK(log[1].mean_loss < log[0].mean_loss);
    CHECK(log[2].mean_loss < log[1].mean_loss);
    CHECK(log[0].lr > log[2].lr);
}

TEST_CASE("config validation") {
    SgnsConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.d = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.negatives = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.lr_start = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.lr_end = cfg.lr_start * 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("absurd learning rate raises DivergenceError with diagnostics") {
    const auto text = alternating(2000);
    const auto vocab = vocab_of(text);
    const auto ids = ids_of(text, vocab);
    SgnsConfig cfg;
    cfg.d = 10;
    cfg.epochs = 20;
    cfg.lr_start = 1e9;
    cfg.lr_end = 1e9 - 1;
    cfg.seed = 2;
    CHECK_THROWS_AS(train_sgns(ids, vocab, cfg), DivergenceError);
}

TEST_CASE("hogwild mode produces a usable space") {
    const auto text = alternating(2000);
    const auto vocab = vocab_of(text);
    const auto ids = ids_of(text, vocab);
    SgnsConfig cfg;
    cfg.d = 10;
    cfg.window = 1;
    cfg.epochs = 5;
    cfg.negatives = 2;
    cfg.seed = 5;
    cfg.threads = 4;
    const auto space = train_sgns(ids, vocab, cfg);
    const int a = vocab.id("a"), b = vocab.id("b");
    CHECK(std::isfinite(space.W.sum()));
    CHECK(space.mixed(a, b) > space.mixed(a, a));
}
