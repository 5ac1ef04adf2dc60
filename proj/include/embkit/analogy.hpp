#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "embkit/factorize.hpp"
#include "embkit/stats.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

enum class Metric { euclidean, cosine };

Metric metric_from_name(const std::string& name);
const char* metric_name(Metric m);

// Mikolov questions-words structure: named categories of ordered word pairs.
struct AnalogySet {
    struct Category {
        std::string name;
        std::vector<std::pair<std::string, std::string>> pairs;
    };
    std::vector<Category> categories;
    std::string source;

    void validate() const;  // each category needs >= 2 pairs
};

// File format: ": category-name" lines followed by "a b x y" question lines,
// meaning (a,b)::(x,y). Saved sets emit every pair once per category.
AnalogySet load_analogy_set(const std::string& path);
void save_analogy_set(const std::string& path, const AnalogySet& set);

struct OovError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveResult {
    int query_a = -1, query_x = -1, query_y = -1;
    int predicted = -1;
    int gold_rank = -1;  // 1-based rank of the gold answer, -1 if no gold given
    Metric metric = Metric::euclidean;
    std::vector<std::pair<int, double>> top_candidates;  // (word id, distance)
};

// Nearest vocabulary vector to a + (y - x), excluding {a, x, y}; ties broken
// by lowest word id. candidate_cap > 0 restricts the pool to the
// candidate_cap most frequent words (ids are frequency-ordered).
SolveResult solve_analogy(const EmbeddingSpace& space, int a, int x, int y,
                          Metric metric, int gold = -1, int top_n = 1,
                          int candidate_cap = 0);

SolveResult solve_analogy(const EmbeddingSpace& space, const Vocabulary& vocab,
                          const std::string& a, const std::string& x,
                          const std::string& y, Metric metric);

struct CategoryResult {
    std::string name;
    std::int64_t attempted = 0;
    std::int64_t correct = 0;
    std::int64_t skipped_oov = 0;
    double accuracy() const {
        return attempted ? static_cast<double>(correct) / attempted : 0.0;
    }
    double coverage() const {
        auto total = attempted + skipped_oov;
        return total ? static_cast<double>(attempted) / total : 0.0;
    }
};

// All ordered pair-of-pairs ((x1,y1),(x2,y2)), x1 != x2, queried as
// (x1, x2, y2) expecting y1. OOV questions are skipped and counted.
// Parallelizes over questions; results are order-independent.
std::vector<CategoryResult> evaluate_analogy_set(const EmbeddingSpace& space,
                                                 const Vocabulary& vocab,
                                                 const AnalogySet& set,
                                                 Metric metric,
                                                 int candidate_cap = 0,
                                                 int threads = 0);

void save_category_results(const std::string& path,
                           const std::vector<CategoryResult>& results);

struct ParallelogramResidual {
    double side = 0;   // ||(y1-x1) - (y2-x2)||
    double cross = 0;  // | ||x1-x2||^2 - ||y1-y2||^2 |
};

ParallelogramResidual parallelogram_residual(const EmbeddingSpace& space,
                                             int x1, int y1, int x2, int y2);

// Numerical rank of the 3-row difference matrix (rows minus the last word's
// row), singular values thresholded at tol * sigma_max.
int coplanarity_rank_rows(const Eigen::MatrixXd& a_row, const Eigen::MatrixXd& b_row,
                          const Eigen::MatrixXd& x_row, const Eigen::MatrixXd& y_row,
                          double tol = 1e-6);
int coplanarity_rank(const EmbeddingSpace& space, int a, int b, int x, int y,
                     double tol = 1e-6);
// M-row form; columns restricted to the shared observed support of all four rows.
int coplanarity_rank(const ShiftedPmiMatrix& m, int a, int b, int x, int y,
                     double tol = 1e-6);

}  // namespace embkit
