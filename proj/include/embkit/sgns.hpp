#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embkit/factorize.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

struct SgnsConfig {
    int d = 50;
    int negatives = 5;       // k
    int window = 5;
    int epochs = 5;
    double lr_start = 0.025;
    double lr_end = 0.0001;
    double neg_exponent = 0.75;  // unigram^exponent negative distribution
    std::uint64_t seed = 1;
    int threads = 1;  // 1 = deterministic; >1 = unsynchronized hogwild updates

    void validate() const;  // throws std::invalid_argument
};

struct TrainLogRow {
    int epoch = 0;
    double mean_loss = 0;
    double lr = 0;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Objective for one positive pair plus its negatives:
//   log sigmoid(w.c) + sum_i log sigmoid(-w.c'_i)
double sgns_pair_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                           const std::vector<Eigen::VectorXd>& negs);

// Analytic gradients of sgns_pair_objective.
void sgns_pair_gradients(const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                         const std::vector<Eigen::VectorXd>& negs,
                         Eigen::VectorXd& grad_w, Eigen::VectorXd& grad_c,
                         std::vector<Eigen::VectorXd>& grad_negs);

// SGD over all (position, context) pairs within the window; returns W and C
// (context vectors retained). Deterministic for a fixed seed when
// cfg.threads == 1. Throws DivergenceError when any vector norm exceeds 1e6.
EmbeddingSpace train_sgns(std::span<const int> tokens, const Vocabulary& vocab,
                          const SgnsConfig& cfg,
                          std::vector<TrainLogRow>* log = nullptr);

void save_train_log(const std::string& path, const std::vector<TrainLogRow>& log);

}  // namespace embkit
