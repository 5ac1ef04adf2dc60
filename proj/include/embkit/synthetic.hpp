#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "embkit/analogy.hpp"
#include "embkit/factorize.hpp"

namespace embkit {

// Zero-error embedding space with known parallelogram quadruples.
// C = W (lambda = 1 convention), M = W W^T is PSD by construction.
//
// csPMI-side quantities are assigned analytically and consistently with the
// geometry: cspmi(x,y) = 2<x,y> - |x|^2 - |y|^2 + alpha, and per-word
// log p(w) = cspmi(null, w) - delta where delta = log k^2 + log p(null).
struct PlantedSpace {
    EmbeddingSpace space;
    Eigen::MatrixXd m;  // W W^T
    std::vector<std::array<int, 4>> quadruples;  // (x1, y1, x2, y2)
    int n_filler = 0;
    int null_id = -1;  // -1 when absent; otherwise W.row(null_id) == 0
    double alpha = -5.0;      // stand-in for log p(x|x)p(y|y)
    double log_p_null = -3.0;

    bool has_null() const { return null_id >= 0; }
    int size() const { return static_cast<int>(space.W.rows()); }

    double gamma_prime(int x, int y) const {
        return 2.0 * space.W.row(x).dot(space.W.row(y)) -
               space.W.row(x).squaredNorm() - space.W.row(y).squaredNorm();
    }
    double assigned_cspmi(int x, int y) const { return gamma_prime(x, y) + alpha; }
    double delta() const;  // log k^2 + log p(null)
    double assigned_log_p(int w) const;
};

// I.i.d. tokens with rank-frequency p(rank) proportional to rank^{-exponent};
// deterministic per seed. Token value r names the rank-r word.
std::vector<int> generate_zipf_corpus(int vocab_size, std::int64_t n_tokens,
                                      double zipf_exponent, std::uint64_t seed);

// Surface form of a synthetic token ("w000123"); realizes generated id
// streams as text for the ingestion path.
std::string synthetic_word(int token);
std::vector<std::string> realize_tokens(const std::vector<int>& tokens);

struct AnalogyCorpus {
    std::vector<std::string> tokens;
    AnalogySet set;
};

// Templated co-occurrence sentences: each entity token is repeatedly placed
// adjacent to its attribute token and a per-pair context token, with a
// relation marker next to the attribute, so designated pairs share relation
// structure. repetitions may be given per relation (size n_relations) to
// vary pair frequency across categories.
AnalogyCorpus generate_analogy_corpus(int n_relations, int n_pairs_per_relation,
                                      const std::vector<int>& repetitions,
                                      std::uint64_t seed);
AnalogyCorpus generate_analogy_corpus(int n_relations, int n_pairs_per_relation,
                                      int repetitions, std::uint64_t seed);

// Exact parallelogram quadruples plus filler words in general position.
// Requires d >= 3. include_null appends a word with the zero vector.
PlantedSpace plant_parallelogram_space(int d, int n_quadruples, int n_filler_words,
                                       bool include_null, std::uint64_t seed);

// Quadruples as an AnalogySet over synthetic word names, one category per
// quadruple (distinct quadruples are unrelated parallelograms).
AnalogySet planted_analogy_set(const PlantedSpace& planted);

// Vocabulary whose ids match the planted space's rows (counts are synthetic).
Vocabulary planted_vocabulary(const PlantedSpace& planted);

}  // namespace embkit
