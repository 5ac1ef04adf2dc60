#include "embkit/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace embkit {

void SgnsConfig::validate() const {
    if (d < 1) throw std::invalid_argument("sgns: d must be >= 1");
    if (negatives < 1) throw std::invalid_argument("sgns: negatives must be >= 1");
    if (window < 1) throw std::invalid_argument("sgns: window must be >= 1");
    if (epochs < 1) throw std::invalid_argument("sgns: epochs must be >= 1");
    if (neg_exponent < 0 || neg_exponent > 1) {
        throw std::invalid_argument("sgns: neg_exponent must be in [0,1]");
    }
    if (!(lr_start > lr_end) || !(lr_end > 0)) {
        throw std::invalid_argument("sgns: need lr_start > lr_end > 0");
    }
    if (threads < 1) throw std::invalid_argument("sgns: threads must be >= 1");
}

namespace {

inline double sigmoid(double x) {
    if (x > 30) return 1.0;
    if (x < -30) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

// log sigmoid(x), numerically stable.
inline double log_sigmoid(double x) {
    if (x > 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

// word2vec-style unigram^exponent sampling table.
std::vector<int> build_negative_table(const Vocabulary& vocab, double exponent,
                                      std::size_t table_size) {
    std::vector<double> weight(vocab.size());
    double z = 0;
    for (int i = 0; i < vocab.size(); ++i) {
        weight[i] = std::pow(static_cast<double>(vocab.counts[i]), exponent);
        z += weight[i];
    }
    std::vector<int> table(table_size);
    int word = 0;
    double cum = weight[0] / z;
    for (std::size_t i = 0; i < table_size; ++i) {
        table[i] = word;
        if (static_cast<double>(i + 1) / static_cast<double>(table_size) > cum &&
            word + 1 < vocab.size()) {
            ++word;
            cum += weight[word] / z;
        }
    }
    return table;
}

struct EpochResult {
    double loss_sum = 0;
    std::int64_t n_pairs = 0;
};

}  // namespace

double sgns_pair_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                           const std::vector<Eigen::VectorXd>& negs) {
    double obj = log_sigmoid(w.dot(c));
    for (const auto& n : negs) obj += log_sigmoid(-w.dot(n));
    return obj;
}

void sgns_pair_gradients(const Eigen::VectorXd& w, const Eigen::VectorXd& c,
                         const std::vector<Eigen::VectorXd>& negs,
                         Eigen::VectorXd& grad_w, Eigen::VectorXd& grad_c,
                         std::vector<Eigen::VectorXd>& grad_negs) {
    const double g_pos = 1.0 - sigmoid(w.dot(c));
    grad_w = g_pos * c;
    grad_c = g_pos * w;
    grad_negs.resize(negs.size());
    for (std::size_t i = 0; i < negs.size(); ++i) {
        const double g_neg = -sigmoid(w.dot(negs[i]));
        grad_w += g_neg * negs[i];
        grad_negs[i] = g_neg * w;
    }
}

EmbeddingSpace train_sgns(std::span<const int> tokens, const Vocabulary& vocab,
                          const SgnsConfig& cfg, std::vector<TrainLogRow>* log) {
    cfg.validate();
    if (tokens.empty()) throw std::invalid_argument("sgns: empty corpus");
    for (int t : tokens) {
        if (t < 0 || t >= vocab.size()) throw std::invalid_argument("sgns: token id out of range");
    }

    const int d = cfg.d;
    const int v = vocab.size();
    const std::size_t n = tokens.size();

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor w_mat(v, d), c_mat(v, d);
    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> init(-0.5 / d, 0.5 / d);
        for (int i = 0; i < v; ++i) {
            for (int j = 0; j < d; ++j) w_mat(i, j) = init(rng);
        }
        c_mat.setZero();
    }

    const std::size_t table_size = std::max<std::size_t>(1u << 20, 8u * static_cast<std::size_t>(v));
    const std::vector<int> neg_table = build_negative_table(vocab, cfg.neg_exponent, table_size);

    const double total_positions = static_cast<double>(cfg.epochs) * static_cast<double>(n);
    std::vector<double> w_accum(d);

    auto train_range = [&](std::size_t begin, std::size_t end, int epoch,
                           std::mt19937_64& rng, EpochResult& res) {
        std::vector<double>& accum = w_accum;
        for (std::size_t i = begin; i < end; ++i) {
            const double progress =
                (static_cast<double>(epoch) * static_cast<double>(n) + static_cast<double>(i)) /
                total_positions;
            const double lr = cfg.lr_start + (cfg.lr_end - cfg.lr_start) * progress;
            const int w_id = tokens[i];
            double* wv = w_mat.data() + static_cast<std::size_t>(w_id) * d;
            const std::size_t lo = i >= static_cast<std::size_t>(cfg.window) ? i - cfg.window : 0;
            const std::size_t hi = std::min(n - 1, i + cfg.window);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                const int c_id = tokens[j];
                std::fill(accum.begin(), accum.end(), 0.0);

                double* cv = c_mat.data() + static_cast<std::size_t>(c_id) * d;
                double s = 0;
                for (int t = 0; t < d; ++t) s += wv[t] * cv[t];
                double g = (1.0 - sigmoid(s)) * lr;
                res.loss_sum -= log_sigmoid(s);
                for (int t = 0; t < d; ++t) {
                    accum[t] += g * cv[t];
                    cv[t] += g * wv[t];
                }
                for (int neg = 0; neg < cfg.negatives; ++neg) {
                    const int n_id = neg_table[rng() % table_size];
                    if (n_id == c_id) continue;
                    double* nv = c_mat.data() + static_cast<std::size_t>(n_id) * d;
                    double sn = 0;
                    for (int t = 0; t < d; ++t) sn += wv[t] * nv[t];
                    const double gn = -sigmoid(sn) * lr;
                    res.loss_sum -= log_sigmoid(-sn);
                    for (int t = 0; t < d; ++t) {
                        accum[t] += gn * nv[t];
                        nv[t] += gn * wv[t];
                    }
                }
                for (int t = 0; t < d; ++t) wv[t] += accum[t];
                ++res.n_pairs;
            }
        }
    };

    auto check_divergence = [&](int epoch) {
        double worst = 0;
        int worst_id = 0;
        for (int i = 0; i < v; ++i) {
            const double nw = w_mat.row(i).norm();
            const double nc = c_mat.row(i).norm();
            const double m = std::max(nw, nc);
            if (!std::isfinite(m)) {  // overflow/NaN counts as divergence
                worst = std::numeric_limits<double>::infinity();
                worst_id = i;
                break;
            }
            if (m > worst) {
                worst = m;
                worst_id = i;
            }
        }
        if (worst > 1e6) {
            std::ostringstream msg;
            msg << "sgns diverged at epoch " << epoch << ": word '" << vocab.words[worst_id]
                << "' (id " << worst_id << ") has vector norm " << worst
                << "; lr_start=" << cfg.lr_start << " d=" << d << " seed=" << cfg.seed;
            throw DivergenceError(msg.str());
        }
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochResult res;
        if (cfg.threads == 1) {
            std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ull * (epoch + 1));
            train_range(0, n, epoch, rng, res);
        } else {
#ifdef _OPENMP
            // Hogwild: unsynchronized updates to shared parameters; accepted
            // as approximate, no determinism guarantee.
            std::vector<EpochResult> partial(cfg.threads);
#pragma omp parallel for num_threads(cfg.threads) schedule(static)
            for (int t = 0; t < cfg.threads; ++t) {
                std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ull * (epoch + 1) + t);
                std::vector<double> local_accum(d);
                EpochResult local;
                std::size_t begin = n * t / cfg.threads;
                std::size_t end = n * (t + 1) / cfg.threads;
                // same inner loop, thread-local accumulator
                for (std::size_t i = begin; i < end; ++i) {
                    const double progress = (static_cast<double>(epoch) * n + i) / total_positions;
                    const double lr = cfg.lr_start + (cfg.lr_end - cfg.lr_start) * progress;
                    const int w_id = tokens[i];
                    double* wv = w_mat.data() + static_cast<std::size_t>(w_id) * d;
                    const std::size_t lo = i >= static_cast<std::size_t>(cfg.window) ? i - cfg.window : 0;
                    const std::size_t hi = std::min(n - 1, i + cfg.window);
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        const int c_id = tokens[j];
                        std::fill(local_accum.begin(), local_accum.end(), 0.0);
                        double* cv = c_mat.data() + static_cast<std::size_t>(c_id) * d;
                        double s = 0;
                        for (int q = 0; q < d; ++q) s += wv[q] * cv[q];
                        double g = (1.0 - sigmoid(s)) * lr;
                        local.loss_sum -= log_sigmoid(s);
                        for (int q = 0; q < d; ++q) {
                            local_accum[q] += g * cv[q];
                            cv[q] += g * wv[q];
                        }
                        for (int neg = 0; neg < cfg.negatives; ++neg) {
                            const int n_id = neg_table[rng() % table_size];
                            if (n_id == c_id) continue;
                            double* nv = c_mat.data() + static_cast<std::size_t>(n_id) * d;
                            double sn = 0;
                            for (int q = 0; q < d; ++q) sn += wv[q] * nv[q];
                            const double gn = -sigmoid(sn) * lr;
                            local.loss_sum -= log_sigmoid(-sn);
                            for (int q = 0; q < d; ++q) {
                                local_accum[q] += gn * nv[q];
                                nv[q] += gn * wv[q];
                            }
                        }
                        for (int q = 0; q < d; ++q) wv[q] += local_accum[q];
                        ++local.n_pairs;
                    }
                }
                partial[t] = local;
            }
            for (const auto& p : partial) {
                res.loss_sum += p.loss_sum;
                res.n_pairs += p.n_pairs;
            }
#else
            throw std::runtime_error("sgns: built without OpenMP, threads must be 1");
#endif
        }
        check_divergence(epoch);
        if (log) {
            const double progress = static_cast<double>(epoch) / cfg.epochs;
            log->push_back({epoch, res.n_pairs ? res.loss_sum / res.n_pairs : 0.0,
                            cfg.lr_start + (cfg.lr_end - cfg.lr_start) * progress});
        }
    }

    EmbeddingSpace space;
    space.W = w_mat;
    space.C = c_mat;
    space.d = d;
    space.shift_k = cfg.negatives;
    space.provenance = Provenance::sgns;
    space.vocab_ref = vocab.checksum();
    return space;
}

void save_train_log(const std::string& path, const std::vector<TrainLogRow>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,mean_loss,learning_rate\n";
    char buf[80];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.epoch, row.mean_loss, row.lr);
        out << buf;
    }
}

}  // namespace embkit
