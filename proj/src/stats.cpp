#include "embkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace embkit {

CorpusStats::CorpusStats(CooccurrenceTable table, int vocab_size)
    : table_(std::move(table)), vocab_size_(vocab_size), row_sum_(vocab_size, 0) {
    auto triplets = table_.sorted_triplets();
    adj_.reserve(triplets.size());
    row_start_.assign(vocab_size + 1, 0);
    for (const auto& [x, y, c] : triplets) {
        if (x < 0 || x >= vocab_size || y < 0 || y >= vocab_size) {
            throw std::invalid_argument("co-occurrence id outside vocabulary");
        }
        row_sum_[x] += c;
        adj_.emplace_back(y, c);
        ++row_start_[x + 1];
    }
    for (int x = 0; x < vocab_size; ++x) row_start_[x + 1] += row_start_[x];
}

std::span<const std::pair<int, std::int64_t>> CorpusStats::row(int x) const {
    return {adj_.data() + row_start_[x], row_start_[x + 1] - row_start_[x]};
}

std::optional<double> CorpusStats::pmi(int x, int y) const {
    std::int64_t c = table_.get(x, y);
    if (c == 0) return std::nullopt;
    return std::log(p_joint(x, y)) - std::log(p_marginal(x)) - std::log(p_marginal(y));
}

std::optional<double> CorpusStats::cspmi(int x, int y) const {
    auto p = pmi(x, y);
    if (!p) return std::nullopt;
    return *p + std::log(p_joint(x, y));
}

ShiftedPmiMatrix CorpusStats::shifted_pmi_matrix(int k) const {
    if (k < 1) throw std::invalid_argument("shift k must be >= 1");
    ShiftedPmiMatrix m;
    m.shift_k = k;
    m.values = Eigen::MatrixXd::Zero(vocab_size_, vocab_size_);
    m.mask.setZero(vocab_size_, vocab_size_);
    const double log_k = std::log(static_cast<double>(k));
    // fill x <= y and mirror so the matrix is exactly symmetric
    for (int x = 0; x < vocab_size_; ++x) {
        for (const auto& [y, c] : row(x)) {
            if (y < x) continue;
            const double v = *pmi(x, y) - log_k;
            m.values(x, y) = v;
            m.values(y, x) = v;
            m.mask(x, y) = 1;
            m.mask(y, x) = 1;
        }
    }
    return m;
}

std::vector<std::pair<int, double>> CorpusStats::conditional_ratio_profile(int x, int y) const {
    if (row_sum_[x] == 0 || row_sum_[y] == 0) {
        throw std::invalid_argument("conditional_ratio_profile needs nonzero marginals");
    }
    std::vector<std::pair<int, double>> profile;
    auto rx = row(x);
    auto ry = row(y);
    const double log_rx = std::log(static_cast<double>(row_sum_[x]));
    const double log_ry = std::log(static_cast<double>(row_sum_[y]));
    // Merge the two sorted adjacency rows; keep words present in both.
    std::size_t i = 0, j = 0;
    while (i < rx.size() && j < ry.size()) {
        if (rx[i].first < ry[j].first) {
            ++i;
        } else if (rx[i].first > ry[j].first) {
            ++j;
        } else {
            double v = std::log(static_cast<double>(rx[i].second)) - log_rx -
                       std::log(static_cast<double>(ry[j].second)) + log_ry;
            profile.emplace_back(rx[i].first, v);
            ++i;
            ++j;
        }
    }
    return profile;
}

void CorpusStats::export_pair_csv(const std::string& path, const Vocabulary& vocab) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "word_x,word_y,count,pmi,cspmi\n";
    char buf[64];
    for (int x = 0; x < vocab_size_; ++x) {
        for (const auto& [y, c] : row(x)) {
            if (y < x) continue;
            out << vocab.words[x] << ',' << vocab.words[y] << ',' << c << ',';
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", *pmi(x, y), *cspmi(x, y));
            out << buf;
        }
    }
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson_r: length mismatch");
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("pearson_r: need at least 2 samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0) throw std::invalid_argument("pearson_r: degenerate variance");
    return sxy / std::sqrt(sxx * syy);
}

LinearFit least_squares_fit(std::span<const double> xs, std::span<const double> ys) {
    LinearFit fit;
    fit.r = pearson_r(xs, ys);
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

}  // namespace embkit
