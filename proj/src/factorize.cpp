#include "embkit/factorize.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace embkit {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::truncated: return "truncated";
        case Provenance::sgns: return "sgns";
        case Provenance::planted: return "planted";
    }
    return "?";
}

namespace {

constexpr double kEigenZeroTol = 1e-10;  // |lambda| < tol * max|lambda| is rank-deficient

std::string matrix_hash(const Eigen::MatrixXd& m) {
    std::span<const char> bytes{reinterpret_cast<const char*>(m.data()),
                                static_cast<std::size_t>(m.size()) * sizeof(double)};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

EmbeddingSpace signed_split(const Eigen::MatrixXd& m, int rank, Provenance prov,
                            int shift_k, const std::string& vocab_ref) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw std::invalid_argument("factorize: matrix must be square");
    if (!m.isApprox(m.transpose(), 1e-12)) {
        throw std::invalid_argument("factorize: matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver failed on matrix " + matrix_hash(m));
    }
    const Eigen::VectorXd& eig = solver.eigenvalues();
    const Eigen::MatrixXd& q = solver.eigenvectors();

    // Order eigenpairs by descending |lambda| so truncation keeps the largest
    // magnitudes.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(eig(a)) > std::abs(eig(b));
    });

    const double cutoff = kEigenZeroTol * std::abs(eig(order[0]));
    EmbeddingSpace space;
    space.d = rank;
    space.shift_k = shift_k;
    space.provenance = prov;
    space.vocab_ref = vocab_ref;
    space.W = Eigen::MatrixXd::Zero(n, rank);
    space.C = Eigen::MatrixXd::Zero(n, rank);
    for (int j = 0; j < rank; ++j) {
        const double lambda = eig(order[j]);
        if (std::abs(lambda) < cutoff) continue;  // columns stay zero
        const double scale = std::sqrt(std::abs(lambda));
        space.W.col(j) = q.col(order[j]) * scale;
        space.C.col(j) = space.W.col(j) * (lambda < 0 ? -1.0 : 1.0);
    }
    return space;
}

}  // namespace

EmbeddingSpace exact_factorize(const Eigen::MatrixXd& m, int shift_k,
                               const std::string& vocab_ref) {
    return signed_split(m, static_cast<int>(m.rows()), Provenance::exact, shift_k,
                        vocab_ref);
}

EmbeddingSpace truncated_factorize(const Eigen::MatrixXd& m, int d, int shift_k,
                                   const std::string& vocab_ref) {
    if (d < 1 || d > m.rows()) throw std::invalid_argument("truncated_factorize: bad rank");
    return signed_split(m, d, Provenance::truncated, shift_k, vocab_ref);
}

NoiseReport noise_by_frequency(const EmbeddingSpace& space, const ShiftedPmiMatrix& m,
                               const CooccurrenceTable& table, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("noise_by_frequency: need >= 1 bin");
    struct Sample {
        double log_freq;
        double residual;
    };
    std::vector<Sample> samples;
    for (const auto& [x, y, c] : table.sorted_triplets()) {
        if (x > y) continue;
        if (!m.observed(x, y)) continue;
        double eps = m.values(x, y) - space.mixed(x, y);
        samples.push_back({std::log(static_cast<double>(c)), eps});
    }
    NoiseReport report;
    if (samples.empty()) return report;

    double lo = samples[0].log_freq, hi = samples[0].log_freq;
    for (const auto& s : samples) {
        lo = std::min(lo, s.log_freq);
        hi = std::max(hi, s.log_freq);
        report.residual_max = std::max(report.residual_max, std::abs(s.residual));
    }
    const double width = (hi - lo) / n_bins;
    report.bins.resize(n_bins);
    std::vector<std::vector<double>> residuals(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        report.bins[b].freq_lo = std::exp(lo + b * width);
        report.bins[b].freq_hi = std::exp(lo + (b + 1) * width);
    }
    for (const auto& s : samples) {
        int b = width > 0 ? std::min(n_bins - 1, static_cast<int>((s.log_freq - lo) / width))
                          : 0;
        residuals[b].push_back(s.residual);
    }
    for (int b = 0; b < n_bins; ++b) {
        auto& bin = report.bins[b];
        bin.n_pairs = static_cast<std::int64_t>(residuals[b].size());
        bin.low_sample = bin.n_pairs < 30;
        if (bin.n_pairs == 0) continue;
        double mean = 0;
        for (double r : residuals[b]) mean += r;
        mean /= static_cast<double>(bin.n_pairs);
        double var = 0;
        for (double r : residuals[b]) var += (r - mean) * (r - mean);
        if (bin.n_pairs > 1) var /= static_cast<double>(bin.n_pairs - 1);
        bin.mean = mean;
        bin.variance = var;
    }
    return report;
}

void save_embeddings(const std::string& path, const Vocabulary& vocab,
                     const Eigen::MatrixXd& rows) {
    if (rows.rows() != vocab.size()) {
        throw std::invalid_argument("save_embeddings: row count != vocabulary size");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << rows.rows() << ' ' << rows.cols() << '\n';
    char buf[64];
    for (int i = 0; i < rows.rows(); ++i) {
        out << vocab.words[i];
        for (int j = 0; j < rows.cols(); ++j) {
            std::snprintf(buf, sizeof buf, " %.17g", rows(i, j));
            out << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXd load_embeddings(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    int n, d;
    if (!(in >> n >> d)) throw std::runtime_error("bad embedding header in " + path);
    if (n != vocab.size()) throw std::runtime_error("embedding/vocabulary size mismatch");
    Eigen::MatrixXd rows(n, d);
    std::string word;
    for (int i = 0; i < n; ++i) {
        if (!(in >> word)) throw std::runtime_error("truncated embedding file " + path);
        int id = vocab.id(word);
        if (id < 0) throw std::runtime_error("embedding word not in vocabulary: " + word);
        for (int j = 0; j < d; ++j) {
            if (!(in >> rows(id, j))) throw std::runtime_error("truncated embedding row: " + word);
        }
    }
    return rows;
}

}  // namespace embkit
