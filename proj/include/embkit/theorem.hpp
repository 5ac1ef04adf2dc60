#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embkit/analogy.hpp"
#include "embkit/factorize.hpp"
#include "embkit/stats.hpp"
#include "embkit/synthetic.hpp"
#include "embkit/vocab.hpp"

#include "json.hpp"

namespace embkit {

// One verification check: exact-scope checks report residual maxima against
// numeric tolerances, statistical-scope checks report correlations against
// configured thresholds. Every statistic carries its sample size.
struct CheckReport {
    std::string name;
    std::string scope;  // "exact" | "statistical"
    bool passed = false;
    std::map<std::string, double> stats;
    std::map<std::string, std::int64_t> samples;
    std::vector<std::string> notes;
    // Raw (x, y) samples for external plotting.
    std::vector<std::pair<double, double>> points;

    nlohmann::json to_json() const;
};

struct CheckThresholds {
    double exact_residual = 1e-9;
    double cspmi_gamma_r = 0.5;       // gamma' vs csPMI correlation
    double euclid_cspmi_r = 0.3;      // -csPMI vs squared distance
    double self_cooc_r = 0.7;         // p(w) vs p(w,w)
    int sample_pairs = 10000;
    std::uint64_t seed = 1;
};

// Uniformly sampled observed pairs (x != y), deterministic per seed.
std::vector<std::pair<int, int>> sample_observed_pairs(const CorpusStats& stats,
                                                       int n, std::uint64_t seed);

// gamma' = 2<x,y> - |x|^2 - |y|^2 regressed against csPMI; reports Pearson r
// and the fitted (lambda, alpha). On spaces with an exact M also reports the
// mixed-product residual max over pairs whose self-pairs are observed.
CheckReport cspmi_identity_check(const EmbeddingSpace& space, const CorpusStats& stats,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 const CheckThresholds& th);

// Corollary-of-the-identity distance law: Pearson r between -csPMI and the
// squared Euclidean distance, optionally on unit-normalized vectors.
CheckReport euclid_cspmi_correlation(const EmbeddingSpace& space, const CorpusStats& stats,
                                     const std::vector<std::pair<int, int>>& pairs,
                                     bool normalized, const CheckThresholds& th);

// Exact form of the distance law on a planted space: the fit of -cspmi
// against squared distance must be exact.
CheckReport euclid_cspmi_exact_check(const PlantedSpace& planted, int n_pairs,
                                     const CheckThresholds& th);

// Conditional-ratio profiles: max/mean over the common support of
// |log p(w|x1)/p(w|y1) - log p(w|x2)/p(w|y2)| per quadruple, reported next
// to the quadruple's analogy solve success.
CheckReport pennington_check(const CorpusStats& stats,
                             const std::vector<std::array<int, 4>>& quadruples,
                             const EmbeddingSpace* space, Metric metric,
                             const CheckThresholds& th);

// Vector addition as an analogy on a planted space with a null word:
// verifies the addition identity residual (gamma' of (x, x+y) vs (null, y))
// and the ordering "the sum has more in common with the rarer word".
CheckReport null_word_addition_check(const PlantedSpace& planted, int n_pairs,
                                     const CheckThresholds& th);

// Pearson r between p(w) and nonzero p(w,w); also the least-squares-through-
// origin scaling constant rho. Requires >= 30 words with self-co-occurrence.
CheckReport zipf_self_cooccurrence_check(const CorpusStats& stats,
                                         const CheckThresholds& th);

// Per-word scalar fit lambda_w = <C[w], W[w]> / <W[w], W[w]>; reports the
// dispersion of lambda_w and the global residual ||C - lambda W||_F / ||W||_F.
CheckReport lambda_estimate(const EmbeddingSpace& space, const CheckThresholds& th);

struct AnalogyStatsRow {
    std::string category;
    double mean_cspmi = 0;
    double mean_pmi = 0;
    double median_pair_frequency = 0;
    double cspmi_variance = 0;
    double accuracy = 0;
    double coverage = 0;
    std::int64_t observed_pairs = 0;
    std::int64_t attempted = 0;
    bool no_observed_pairs = false;
};

struct AnalogyReport {
    std::vector<AnalogyStatsRow> rows;
    // Pearson r between accuracy and csPMI variance across categories; absent
    // when fewer than 2 usable categories.
    std::optional<double> accuracy_vs_cspmi_variance_r;

    nlohmann::json to_json() const;
};

AnalogyReport analogy_report(const EmbeddingSpace& space, const CorpusStats& stats,
                             const Vocabulary& vocab, const AnalogySet& set,
                             Metric metric, int candidate_cap = 0);

void save_analogy_report_csv(const std::string& path, const AnalogyReport& report);

// Aggregates check reports sorted by name; JSON for machines, aligned table
// for humans, per-check CSV of raw samples for plotting.
struct VerificationSuite {
    std::vector<CheckReport> checks;

    void add(CheckReport report);
    bool all_passed() const;
    nlohmann::json to_json() const;
    std::string to_table() const;
    void save_sample_csvs(const std::string& directory) const;
};

}  // namespace embkit
