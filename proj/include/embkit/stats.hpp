#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embkit/cooc.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

// Dense completion of the shifted PMI matrix. Missing (unobserved) entries
// are imputed as 0 and recorded in the mask so downstream checks can exclude
// them.
struct ShiftedPmiMatrix {
    Eigen::MatrixXd values;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;  // 1 = observed
    int shift_k = 1;

    bool observed(int x, int y) const { return mask(x, y) != 0; }
};

// Probabilities and PMI/csPMI derived from a co-occurrence table. Natural
// logarithms throughout; p(x,y) is normalized per ordered event. Immutable
// after construction, safe for concurrent reads.
class CorpusStats {
public:
    CorpusStats(CooccurrenceTable table, int vocab_size);

    const CooccurrenceTable& table() const { return table_; }
    int vocab_size() const { return vocab_size_; }

    double p_joint(int x, int y) const {
        return static_cast<double>(table_.get(x, y)) / static_cast<double>(table_.total);
    }
    double p_marginal(int x) const {
        return static_cast<double>(row_sum_[x]) / static_cast<double>(table_.total);
    }
    std::int64_t row_sum(int x) const { return row_sum_[x]; }

    // log p(y|x) support: sorted (y, count) adjacency of row x.
    std::span<const std::pair<int, std::int64_t>> row(int x) const;

    // Unobserved pairs yield nullopt, never a numeric sentinel.
    std::optional<double> pmi(int x, int y) const;
    std::optional<double> cspmi(int x, int y) const;

    ShiftedPmiMatrix shifted_pmi_matrix(int k) const;

    // Sparse profile of log[p(w|x)/p(w|y)] over words w where both
    // conditionals are positive.
    std::vector<std::pair<int, double>> conditional_ratio_profile(int x, int y) const;

    // CSV of (word_x, word_y, count, pmi, cspmi) for stored pairs, x <= y.
    void export_pair_csv(const std::string& path, const Vocabulary& vocab) const;

private:
    CooccurrenceTable table_;
    int vocab_size_;
    std::vector<std::int64_t> row_sum_;
    // CSR adjacency, rows sorted by column id.
    std::vector<std::size_t> row_start_;
    std::vector<std::pair<int, std::int64_t>> adj_;
};

// Sample Pearson correlation; throws std::invalid_argument on length
// mismatch, n < 2 or zero variance.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

struct LinearFit {
    double slope = 0, intercept = 0, r = 0;
};
LinearFit least_squares_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace embkit
