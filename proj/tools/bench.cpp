// Timing comparison between the serial reference kernels and their
// OpenMP-parallel counterparts: co-occurrence counting, SGNS training and
// analogy evaluation.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "embkit/analogy.hpp"
#include "embkit/cooc.hpp"
#include "embkit/sgns.hpp"
#include "embkit/synthetic.hpp"

using namespace embkit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    std::printf("hardware threads available: %d\n\n", max_threads);

    const auto ids = generate_zipf_corpus(2000, 500000, 1.0, 7);
    const auto words = realize_tokens(ids);
    const auto vocab = build_vocabulary(words, 1);
    const auto tokens = encode(words, vocab);

    // counting: serial reference vs sharded
    {
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = count_cooccurrences_serial(tokens, vocab, 5);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = count_cooccurrences(tokens, vocab, 5, max_threads);
        const double tp = seconds_since(t0);
        const bool identical = serial.total == parallel.total &&
                               serial.entries == parallel.entries;
        std::printf("count_cooccurrences  serial %.3fs  parallel(%d) %.3fs  identical=%s\n",
                    ts, max_threads, tp, identical ? "yes" : "NO");
    }

    // sgns: deterministic single-threaded vs hogwild
    {
        SgnsConfig cfg;
        cfg.d = 25;
        cfg.epochs = 1;
        cfg.seed = 7;
        auto t0 = std::chrono::steady_clock::now();
        train_sgns(tokens, vocab, cfg);
        const double ts = seconds_since(t0);
        cfg.threads = max_threads;
        t0 = std::chrono::steady_clock::now();
        train_sgns(tokens, vocab, cfg);
        const double tp = seconds_since(t0);
        std::printf("train_sgns           serial %.3fs  hogwild(%d) %.3fs\n", ts, max_threads, tp);
    }

    // analogy evaluation over a planted space
    {
        const auto planted = plant_parallelogram_space(10, 40, 2000, false, 7);
        const auto pvocab = planted_vocabulary(planted);
        const auto set = planted_analogy_set(planted);
        auto t0 = std::chrono::steady_clock::now();
        evaluate_analogy_set(planted.space, pvocab, set, Metric::euclidean, 0, 1);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        evaluate_analogy_set(planted.space, pvocab, set, Metric::euclidean, 0, max_threads);
        const double tp = seconds_since(t0);
        std::printf("evaluate_analogy_set serial %.3fs  parallel(%d) %.3fs\n", ts, max_threads, tp);
    }
    return 0;
}
