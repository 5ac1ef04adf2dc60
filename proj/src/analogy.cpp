#include "embkit/analogy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace embkit {

Metric metric_from_name(const std::string& name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "cosine") return Metric::cosine;
    throw std::invalid_argument("unknown metric: " + name);
}

const char* metric_name(Metric m) {
    return m == Metric::euclidean ? "euclidean" : "cosine";
}

void AnalogySet::validate() const {
    for (const auto& cat : categories) {
        if (cat.pairs.size() < 2) {
            throw std::invalid_argument("analogy category '" + cat.name +
                                        "' needs at least 2 pairs");
        }
    }
}

AnalogySet load_analogy_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read analogy set: " + path);
    AnalogySet set;
    set.source = path;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == ':') {
            std::istringstream ls(line.substr(1));
            std::string name;
            ls >> name;
            set.categories.push_back({name, {}});
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, x, y;
        if (!(ls >> a >> b >> x >> y)) continue;
        if (set.categories.empty()) set.categories.push_back({"default", {}});
        auto& pairs = set.categories.back().pairs;
        // Questions-words lines enumerate pair-of-pairs; collect the distinct
        // ordered pairs they are built from.
        for (auto& p : {std::make_pair(a, b), std::make_pair(x, y)}) {
            if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
        }
    }
    set.validate();
    return set;
}

void save_analogy_set(const std::string& path, const AnalogySet& set) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& cat : set.categories) {
        out << ": " << cat.name << '\n';
        for (std::size_t i = 0; i < cat.pairs.size(); ++i) {
            for (std::size_t j = 0; j < cat.pairs.size(); ++j) {
                if (i == j) continue;
                out << cat.pairs[i].first << ' ' << cat.pairs[i].second << ' '
                    << cat.pairs[j].first << ' ' << cat.pairs[j].second << '\n';
            }
        }
    }
}

namespace {

double distance(const Eigen::VectorXd& target, const Eigen::RowVectorXd& cand,
                Metric metric) {
    if (metric == Metric::euclidean) {
        return (cand.transpose() - target).norm();
    }
    const double nt = target.norm(), nc = cand.norm();
    if (nt == 0 || nc == 0) return 1.0;  // max cosine distance for degenerate vectors
    return 1.0 - cand.dot(target) / (nt * nc);
}

}  // namespace

SolveResult solve_analogy(const EmbeddingSpace& space, int a, int x, int y,
                          Metric metric, int gold, int top_n, int candidate_cap) {
    const int v = static_cast<int>(space.W.rows());
    for (int w : {a, x, y}) {
        if (w < 0 || w >= v) throw std::invalid_argument("solve_analogy: id out of range");
    }
    SolveResult res;
    res.query_a = a;
    res.query_x = x;
    res.query_y = y;
    res.metric = metric;

    const Eigen::VectorXd target = space.W.row(a) + (space.W.row(y) - space.W.row(x));
    const int pool = candidate_cap > 0 ? std::min(candidate_cap, v) : v;

    std::vector<std::pair<double, int>> scored;
    scored.reserve(pool);
    for (int w = 0; w < pool; ++w) {
        if (w == a || w == x || w == y) continue;
        scored.emplace_back(distance(target, space.W.row(w), metric), w);
    }
    // (distance, id) sort gives lowest-id tie breaking.
    std::sort(scored.begin(), scored.end());

    if (!scored.empty()) res.predicted = scored[0].second;
    const int keep = std::min<int>(top_n, static_cast<int>(scored.size()));
    for (int i = 0; i < keep; ++i) res.top_candidates.emplace_back(scored[i].second, scored[i].first);
    if (gold >= 0) {
        for (std::size_t i = 0; i < scored.size(); ++i) {
            if (scored[i].second == gold) {
                res.gold_rank = static_cast<int>(i) + 1;
                break;
            }
        }
    }
    return res;
}

SolveResult solve_analogy(const EmbeddingSpace& space, const Vocabulary& vocab,
                          const std::string& a, const std::string& x,
                          const std::string& y, Metric metric) {
    for (const auto* w : {&a, &x, &y}) {
        if (vocab.id(*w) < 0) throw OovError("word not in vocabulary: " + *w);
    }
    return solve_analogy(space, vocab.id(a), vocab.id(x), vocab.id(y), metric);
}

std::vector<CategoryResult> evaluate_analogy_set(const EmbeddingSpace& space,
                                                 const Vocabulary& vocab,
                                                 const AnalogySet& set, Metric metric,
                                                 int candidate_cap, int threads) {
    set.validate();
    std::vector<CategoryResult> results;
    for (const auto& cat : set.categories) {
        CategoryResult cr;
        cr.name = cat.name;

        struct Question {
            int x1, y1, x2, y2;
        };
        std::vector<Question> questions;
        for (std::size_t i = 0; i < cat.pairs.size(); ++i) {
            for (std::size_t j = 0; j < cat.pairs.size(); ++j) {
                if (i == j) continue;
                const auto& [x1w, y1w] = cat.pairs[i];
                const auto& [x2w, y2w] = cat.pairs[j];
                if (x1w == x2w) continue;
                int x1 = vocab.id(x1w), y1 = vocab.id(y1w);
                int x2 = vocab.id(x2w), y2 = vocab.id(y2w);
                if (x1 < 0 || y1 < 0 || x2 < 0 || y2 < 0) {
                    ++cr.skipped_oov;
                    continue;
                }
                questions.push_back({x1, y1, x2, y2});
            }
        }

        std::int64_t correct = 0;
        const std::int64_t nq = static_cast<std::int64_t>(questions.size());
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : correct) schedule(dynamic, 8) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
        for (std::int64_t q = 0; q < nq; ++q) {
            const auto& [x1, y1, x2, y2] = questions[q];
            auto res = solve_analogy(space, x1, x2, y2, metric, y1, 1, candidate_cap);
            if (res.predicted == y1) ++correct;
        }
        cr.attempted = nq;
        cr.correct = correct;
        results.push_back(cr);
    }
    return results;
}

void save_category_results(const std::string& path,
                           const std::vector<CategoryResult>& results) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "category,accuracy,coverage,attempted\n";
    char buf[80];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%lld\n", r.accuracy(), r.coverage(),
                      static_cast<long long>(r.attempted));
        out << r.name << buf;
    }
}

ParallelogramResidual parallelogram_residual(const EmbeddingSpace& space, int x1,
                                             int y1, int x2, int y2) {
    ParallelogramResidual res;
    const Eigen::VectorXd d1 = space.W.row(y1) - space.W.row(x1);
    const Eigen::VectorXd d2 = space.W.row(y2) - space.W.row(x2);
    res.side = (d1 - d2).norm();
    res.cross = std::abs((space.W.row(x1) - space.W.row(x2)).squaredNorm() -
                         (space.W.row(y1) - space.W.row(y2)).squaredNorm());
    return res;
}

namespace {

int rank_of_difference_rows(const Eigen::MatrixXd& rows, double tol) {
    if (rows.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol * sv(0)) ++rank;
    }
    return rank;
}

}  // namespace

int coplanarity_rank_rows(const Eigen::MatrixXd& a_row, const Eigen::MatrixXd& b_row,
                          const Eigen::MatrixXd& x_row, const Eigen::MatrixXd& y_row,
                          double tol) {
    Eigen::MatrixXd diff(3, a_row.cols());
    diff.row(0) = a_row - y_row;
    diff.row(1) = b_row - y_row;
    diff.row(2) = x_row - y_row;
    return rank_of_difference_rows(diff, tol);
}

int coplanarity_rank(const EmbeddingSpace& space, int a, int b, int x, int y,
                     double tol) {
    return coplanarity_rank_rows(space.W.row(a), space.W.row(b), space.W.row(x),
                                 space.W.row(y), tol);
}

int coplanarity_rank(const ShiftedPmiMatrix& m, int a, int b, int x, int y,
                     double tol) {
    // Restrict to columns observed for all four rows.
    std::vector<int> cols;
    for (int w = 0; w < m.values.cols(); ++w) {
        if (m.observed(a, w) && m.observed(b, w) && m.observed(x, w) && m.observed(y, w)) {
            cols.push_back(w);
        }
    }
    if (cols.empty()) return 0;
    Eigen::MatrixXd rows(4, static_cast<int>(cols.size()));
    const int ids[4] = {a, b, x, y};
    for (int r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            rows(r, static_cast<int>(c)) = m.values(ids[r], cols[c]);
        }
    }
    return coplanarity_rank_rows(rows.row(0), rows.row(1), rows.row(2), rows.row(3), tol);
}

}  // namespace embkit
