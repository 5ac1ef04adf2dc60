#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "embkit/cooc.hpp"
#include "embkit/stats.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

enum class Provenance { exact, truncated, sgns, planted };

const char* provenance_name(Provenance p);

// Word matrix W and context matrix C (rows are vectors), sharing dimension
// and vocabulary indexing.
struct EmbeddingSpace {
    Eigen::MatrixXd W;
    Eigen::MatrixXd C;
    int d = 0;
    int shift_k = 1;
    Provenance provenance = Provenance::exact;
    std::string vocab_ref;

    Eigen::VectorXd word(int i) const { return W.row(i); }
    Eigen::VectorXd context(int i) const { return C.row(i); }
    // Conventional single vector per word: the word/context average.
    // Identical to W whenever C == W (planted spaces, PSD factorizations).
    Eigen::VectorXd averaged(int i) const { return 0.5 * (W.row(i) + C.row(i)); }
    double mixed(int x, int y) const { return W.row(x).dot(C.row(y)); }
};

// Signed symmetric eigendecomposition split: M = Q L Q^T, W = Q |L|^{1/2},
// C = Q |L|^{1/2} sign(L). Keeps <x, y_c> = <x_c, y> exactly; C = W when M
// is PSD. Eigenvalues below 1e-10 * max|eig| are treated as zero.
EmbeddingSpace exact_factorize(const Eigen::MatrixXd& m, int shift_k = 1,
                               const std::string& vocab_ref = {});

// Rank-d truncation keeping eigenvalues of largest magnitude.
EmbeddingSpace truncated_factorize(const Eigen::MatrixXd& m, int d,
                                   int shift_k = 1,
                                   const std::string& vocab_ref = {});

struct NoiseBin {
    double freq_lo = 0, freq_hi = 0;
    std::int64_t n_pairs = 0;
    double mean = 0, variance = 0;
    bool low_sample = false;  // fewer than 30 pairs
};

// Residuals eps(x,y) = M[x][y] - <W[x], C[y]> on observed entries, grouped
// into log-spaced pair-frequency bins.
struct NoiseReport {
    std::vector<NoiseBin> bins;
    double residual_max = 0;
};

NoiseReport noise_by_frequency(const EmbeddingSpace& space,
                               const ShiftedPmiMatrix& m,
                               const CooccurrenceTable& table, int n_bins);

// word2vec text format: "|V| d" header, then "word v1 ... vd" per line.
void save_embeddings(const std::string& path, const Vocabulary& vocab,
                     const Eigen::MatrixXd& rows);
Eigen::MatrixXd load_embeddings(const std::string& path, const Vocabulary& vocab);

}  // namespace embkit
