#include "embkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace embkit {

double PlantedSpace::delta() const {
    const double log_k = std::log(static_cast<double>(space.shift_k));
    return 2.0 * log_k + log_p_null;
}

double PlantedSpace::assigned_log_p(int w) const {
    // cspmi(null, w) - delta, with the null word's vector being zero.
    return -space.W.row(w).squaredNorm() + alpha - delta();
}

std::vector<int> generate_zipf_corpus(int vocab_size, std::int64_t n_tokens,
                                      double zipf_exponent, std::uint64_t seed) {
    if (vocab_size < 2) throw std::invalid_argument("zipf: vocab_size must be >= 2");
    if (n_tokens < vocab_size) throw std::invalid_argument("zipf: n_tokens must be >= vocab_size");
    if (zipf_exponent < 0.0) throw std::invalid_argument("zipf: exponent must be >= 0");
    std::vector<double> cum(vocab_size);
    double z = 0;
    for (int r = 0; r < vocab_size; ++r) {
        z += std::pow(static_cast<double>(r + 1), -zipf_exponent);
        cum[r] = z;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, z);
    std::vector<int> tokens(n_tokens);
    for (std::int64_t i = 0; i < n_tokens; ++i) {
        const double u = unif(rng);
        tokens[i] = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    }
    return tokens;
}

std::string synthetic_word(int token) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%06d", token);
    return buf;
}

std::vector<std::string> realize_tokens(const std::vector<int>& tokens) {
    std::vector<std::string> words;
    words.reserve(tokens.size());
    for (int t : tokens) words.push_back(synthetic_word(t));
    return words;
}

AnalogyCorpus generate_analogy_corpus(int n_relations, int n_pairs_per_relation,
                                      const std::vector<int>& repetitions,
                                      std::uint64_t seed) {
    if (n_relations < 1) throw std::invalid_argument("analogy corpus: n_relations >= 1");
    if (n_pairs_per_relation < 2) {
        throw std::invalid_argument("analogy corpus: a category needs >= 2 pairs");
    }
    if (static_cast<int>(repetitions.size()) != n_relations) {
        throw std::invalid_argument("analogy corpus: one repetition count per relation");
    }
    for (int rep : repetitions) {
        if (rep < 1) throw std::invalid_argument("analogy corpus: repetitions >= 1");
    }

    std::mt19937_64 rng(seed);
    AnalogyCorpus corpus;
    corpus.set.source = "generated";

    // Sentence template: relation-context, entity, pair-context, attribute,
    // relation-marker. Under a window of 2 the entity co-occurs with the
    // relation context and the attribute with the marker (both shared across
    // the relation), while the pair context and the direct entity-attribute
    // adjacency tie the two halves of one pair together. Pair repetition
    // counts are Poisson around the relation's mean, and every word also
    // appears a few times in neutral noise contexts, so rarer relations
    // carry noisier statistics.
    std::vector<std::vector<std::string>> sentences;
    char buf[48];
    std::vector<std::string> noise_words;
    for (int i = 0; i < 10; ++i) {
        std::snprintf(buf, sizeof buf, "nz%03d", i);
        noise_words.push_back(buf);
    }
    std::poisson_distribution<int> noise_dist(2.0);
    auto add_noise = [&](const std::string& word) {
        const int n = noise_dist(rng);
        for (int i = 0; i < n; ++i) {
            sentences.push_back({noise_words[rng() % noise_words.size()], word,
                                 noise_words[rng() % noise_words.size()]});
        }
    };
    for (int r = 0; r < n_relations; ++r) {
        std::snprintf(buf, sizeof buf, "rel%03d", r);
        const std::string marker = buf;
        std::snprintf(buf, sizeof buf, "rcx%03d", r);
        const std::string relation_ctx = buf;
        std::snprintf(buf, sizeof buf, "relation-%03d", r);
        AnalogySet::Category cat{buf, {}};
        std::poisson_distribution<int> reps_dist(repetitions[r]);
        for (int j = 0; j < n_pairs_per_relation; ++j) {
            std::snprintf(buf, sizeof buf, "ent%03d_%03d", r, j);
            const std::string entity = buf;
            std::snprintf(buf, sizeof buf, "att%03d_%03d", r, j);
            const std::string attribute = buf;
            std::snprintf(buf, sizeof buf, "ctx%03d_%03d", r, j);
            const std::string pair_ctx = buf;
            cat.pairs.emplace_back(entity, attribute);
            const int reps = std::max(1, reps_dist(rng));
            for (int n = 0; n < reps; ++n) {
                sentences.push_back({relation_ctx, entity, pair_ctx, attribute, marker});
            }
            add_noise(entity);
            add_noise(attribute);
        }
        corpus.set.categories.push_back(std::move(cat));
    }
    std::shuffle(sentences.begin(), sentences.end(), rng);
    // separator between sentences keeps entity/attribute windows from
    // leaking across sentence boundaries
    for (auto& s : sentences) {
        for (auto& w : s) corpus.tokens.push_back(std::move(w));
        corpus.tokens.push_back("sep000");
    }
    corpus.set.validate();
    return corpus;
}

AnalogyCorpus generate_analogy_corpus(int n_relations, int n_pairs_per_relation,
                                      int repetitions, std::uint64_t seed) {
    return generate_analogy_corpus(n_relations, n_pairs_per_relation,
                                   std::vector<int>(n_relations, repetitions), seed);
}

PlantedSpace plant_parallelogram_space(int d, int n_quadruples, int n_filler_words,
                                       bool include_null, std::uint64_t seed) {
    if (d < 3) throw std::invalid_argument("plant_parallelogram_space: d must be >= 3");
    if (n_quadruples < 1) throw std::invalid_argument("plant_parallelogram_space: need quadruples");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto unit = [&]() {
        Eigen::VectorXd v(d);
        for (int i = 0; i < d; ++i) v(i) = gauss(rng);
        return Eigen::VectorXd(v / v.norm());
    };

    const int n_words = 4 * n_quadruples + n_filler_words + (include_null ? 1 : 0);
    PlantedSpace planted;
    planted.space.W = Eigen::MatrixXd::Zero(n_words, d);
    planted.space.d = d;
    planted.space.shift_k = 1;
    planted.space.provenance = Provenance::planted;
    planted.n_filler = n_filler_words;

    int row = 0;
    for (int q = 0; q < n_quadruples; ++q) {
        const Eigen::VectorXd base = unit();
        const Eigen::VectorXd displacement = unit();  // shared side of the parallelogram
        const Eigen::VectorXd offset = unit();
        const int x1 = row, y1 = row + 1, x2 = row + 2, y2 = row + 3;
        planted.space.W.row(x1) = base;
        planted.space.W.row(y1) = base + displacement;
        planted.space.W.row(x2) = base + offset;
        planted.space.W.row(y2) = base + offset + displacement;
        planted.quadruples.push_back({x1, y1, x2, y2});
        row += 4;
    }
    for (int f = 0; f < n_filler_words; ++f) {
        planted.space.W.row(row++) = unit() * (0.5 + 0.5 * (gauss(rng) * gauss(rng) < 0 ? 1.0 : 2.0));
    }
    if (include_null) {
        planted.null_id = row;
        planted.space.W.row(row++) = Eigen::VectorXd::Zero(d);
    }

    planted.space.C = planted.space.W;  // lambda = 1 convention
    planted.m = planted.space.W * planted.space.W.transpose();
    planted.space.vocab_ref = planted_vocabulary(planted).checksum();
    return planted;
}

AnalogySet planted_analogy_set(const PlantedSpace& planted) {
    AnalogySet set;
    set.source = "planted";
    // One category per quadruple: distinct quadruples are unrelated
    // parallelograms, so their pairs must not be mixed into one question set.
    char buf[32];
    for (std::size_t q = 0; q < planted.quadruples.size(); ++q) {
        const auto& quad = planted.quadruples[q];
        std::snprintf(buf, sizeof buf, "planted-%03zu", q);
        AnalogySet::Category cat{buf, {}};
        cat.pairs.emplace_back(synthetic_word(quad[0]), synthetic_word(quad[1]));
        cat.pairs.emplace_back(synthetic_word(quad[2]), synthetic_word(quad[3]));
        set.categories.push_back(std::move(cat));
    }
    set.validate();
    return set;
}

Vocabulary planted_vocabulary(const PlantedSpace& planted) {
    Vocabulary vocab;
    const int n = static_cast<int>(planted.space.W.rows());
    for (int i = 0; i < n; ++i) {
        vocab.id_of.emplace(synthetic_word(i), i);
        vocab.words.push_back(synthetic_word(i));
        vocab.counts.push_back(n - i);  // synthetic, descending with id
        vocab.total_tokens += n - i;
    }
    return vocab;
}

}  // namespace embkit
