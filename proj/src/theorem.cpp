#include "embkit/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace embkit {

nlohmann::json CheckReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["scope"] = scope;
    j["passed"] = passed;
    j["stats"] = stats;
    j["samples"] = samples;
    j["notes"] = notes;
    return j;
}

std::vector<std::pair<int, int>> sample_observed_pairs(const CorpusStats& stats,
                                                       int n, std::uint64_t seed) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [x, y, c] : stats.table().sorted_triplets()) {
        if (x < y) pairs.emplace_back(x, y);
    }
    if (static_cast<int>(pairs.size()) <= n) return pairs;
    std::mt19937_64 rng(seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(n);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

namespace {

double gamma_prime(const EmbeddingSpace& space, int x, int y) {
    return 2.0 * space.W.row(x).dot(space.W.row(y)) - space.W.row(x).squaredNorm() -
           space.W.row(y).squaredNorm();
}

bool exact_scope(const EmbeddingSpace& space) {
    return space.provenance == Provenance::exact || space.provenance == Provenance::planted;
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = 0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0;
    for (double x : xs) v += (x - m) * (x - m);
    return v / static_cast<double>(xs.size() - 1);
}

}  // namespace

CheckReport cspmi_identity_check(const EmbeddingSpace& space, const CorpusStats& stats,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 const CheckThresholds& th) {
    CheckReport report;
    report.name = "cspmi_identity";
    report.scope = exact_scope(space) ? "exact" : "statistical";

    std::vector<double> gammas, cspmis;
    std::int64_t missing_self = 0;
    double mixed_residual_max = 0;
    std::int64_t mixed_n = 0;
    for (const auto& [x, y] : pairs) {
        auto cs = stats.cspmi(x, y);
        if (!cs) continue;
        const double g = gamma_prime(space, x, y);
        gammas.push_back(g);
        cspmis.push_back(*cs);
        report.points.emplace_back(g, *cs);

        // Full mixed-product form needs observed self-pairs; pairs without
        // them fall under the rho-scaled self-co-occurrence constant.
        if (stats.table().get(x, x) > 0 && stats.table().get(y, y) > 0) {
            const double lhs = 2.0 * space.mixed(x, y) - space.mixed(x, x) - space.mixed(y, y);
            const double log_cond_self = std::log(stats.p_joint(x, x) / stats.p_marginal(x)) +
                                         std::log(stats.p_joint(y, y) / stats.p_marginal(y));
            const double rhs = *cs - log_cond_self;
            mixed_residual_max = std::max(mixed_residual_max, std::abs(lhs - rhs));
            ++mixed_n;
        } else {
            ++missing_self;
        }
    }
    report.samples["pairs"] = static_cast<std::int64_t>(gammas.size());
    report.samples["pairs_with_self_cooccurrence"] = mixed_n;
    report.samples["pairs_missing_self_cooccurrence"] = missing_self;
    report.stats["mixed_product_residual_max"] = mixed_residual_max;

    if (gammas.size() >= 2) {
        try {
            const LinearFit fit = least_squares_fit(gammas, cspmis);
            report.stats["pearson_r"] = fit.r;
            report.stats["lambda"] = fit.slope;
            report.stats["alpha"] = fit.intercept;
        } catch (const std::invalid_argument&) {
            report.notes.push_back("degenerate variance, correlation undefined");
        }
    }
    if (report.scope == "exact") {
        report.passed = mixed_n > 0 && mixed_residual_max <= th.exact_residual;
        if (mixed_n == 0) report.notes.push_back("no pairs with observed self-co-occurrence");
    } else {
        auto it = report.stats.find("pearson_r");
        report.passed = it != report.stats.end() && it->second >= th.cspmi_gamma_r;
    }
    return report;
}

CheckReport euclid_cspmi_correlation(const EmbeddingSpace& space, const CorpusStats& stats,
                                     const std::vector<std::pair<int, int>>& pairs,
                                     bool normalized, const CheckThresholds& th) {
    CheckReport report;
    report.name = normalized ? "euclid_cspmi_normalized" : "euclid_cspmi_raw";
    report.scope = "statistical";

    std::vector<double> neg_cspmi, sq_dist;
    for (const auto& [x, y] : pairs) {
        auto cs = stats.cspmi(x, y);
        if (!cs) continue;
        // distances use the word/context average so two-factor (SGNS) spaces
        // are measured in their conventional single-vector representation
        Eigen::VectorXd vx = space.averaged(x);
        Eigen::VectorXd vy = space.averaged(y);
        if (normalized) {
            if (vx.norm() == 0 || vy.norm() == 0) continue;
            vx /= vx.norm();
            vy /= vy.norm();
        }
        neg_cspmi.push_back(-*cs);
        sq_dist.push_back((vx - vy).squaredNorm());
        report.points.emplace_back(-*cs, sq_dist.back());
    }
    report.samples["pairs"] = static_cast<std::int64_t>(neg_cspmi.size());
    if (neg_cspmi.size() >= 2) {
        try {
            const LinearFit fit = least_squares_fit(neg_cspmi, sq_dist);
            report.stats["pearson_r"] = fit.r;
            report.stats["slope"] = fit.slope;
            report.stats["intercept"] = fit.intercept;
            report.passed = fit.r >= th.euclid_cspmi_r;
        } catch (const std::invalid_argument&) {
            report.notes.push_back("degenerate variance, correlation undefined");
        }
    }
    return report;
}

CheckReport euclid_cspmi_exact_check(const PlantedSpace& planted, int n_pairs,
                                     const CheckThresholds& th) {
    CheckReport report;
    report.name = "euclid_cspmi_exact";
    report.scope = "exact";

    const int n = planted.size();
    std::mt19937_64 rng(th.seed);
    std::vector<double> neg_cspmi, sq_dist;
    double residual_max = 0;
    for (int i = 0; i < n_pairs; ++i) {
        int x = static_cast<int>(rng() % n);
        int y = static_cast<int>(rng() % n);
        if (x == y || x == planted.null_id || y == planted.null_id) continue;
        const double cs = planted.assigned_cspmi(x, y);
        const double d2 = (planted.space.W.row(x) - planted.space.W.row(y)).squaredNorm();
        // lambda = 1: distance^2 must equal -cspmi + alpha exactly.
        residual_max = std::max(residual_max, std::abs(d2 - (-cs + planted.alpha)));
        neg_cspmi.push_back(-cs);
        sq_dist.push_back(d2);
        report.points.emplace_back(-cs, d2);
    }
    report.samples["pairs"] = static_cast<std::int64_t>(neg_cspmi.size());
    report.stats["fit_residual_max"] = residual_max;
    double r = 0;
    if (neg_cspmi.size() >= 2) {
        r = pearson_r(neg_cspmi, sq_dist);
        report.stats["pearson_r"] = r;
    }
    report.passed = residual_max <= th.exact_residual && r > 1.0 - 1e-9;
    return report;
}

CheckReport pennington_check(const CorpusStats& stats,
                             const std::vector<std::array<int, 4>>& quadruples,
                             const EmbeddingSpace* space, Metric metric,
                             const CheckThresholds& th) {
    CheckReport report;
    report.name = "pennington_ratio";
    report.scope = "statistical";

    double dev_max = 0;
    double dev_mean_sum = 0;
    std::int64_t used = 0, flagged = 0, solved = 0, solvable = 0;
    for (const auto& [x1, y1, x2, y2] : quadruples) {
        auto p1 = stats.conditional_ratio_profile(x1, y1);
        auto p2 = stats.conditional_ratio_profile(x2, y2);
        // common support of the two profiles
        double local_max = 0, local_sum = 0;
        std::int64_t local_n = 0;
        std::size_t i = 0, j = 0;
        while (i < p1.size() && j < p2.size()) {
            if (p1[i].first < p2[j].first) {
                ++i;
            } else if (p1[i].first > p2[j].first) {
                ++j;
            } else {
                const double dev = std::abs(p1[i].second - p2[j].second);
                local_max = std::max(local_max, dev);
                local_sum += dev;
                ++local_n;
                ++i;
                ++j;
            }
        }
        if (local_n == 0) {
            ++flagged;
            continue;
        }
        ++used;
        dev_max = std::max(dev_max, local_max);
        dev_mean_sum += local_sum / static_cast<double>(local_n);
        if (space) {
            ++solvable;
            auto res = solve_analogy(*space, x1, x2, y2, metric, y1);
            if (res.predicted == y1) ++solved;
            report.points.emplace_back(local_sum / static_cast<double>(local_n),
                                       res.predicted == y1 ? 1.0 : 0.0);
        } else {
            report.points.emplace_back(local_sum / static_cast<double>(local_n), 0.0);
        }
    }
    report.samples["quadruples"] = used;
    report.samples["flagged_empty_support"] = flagged;
    report.stats["deviation_max"] = dev_max;
    report.stats["deviation_mean"] = used ? dev_mean_sum / static_cast<double>(used) : 0.0;
    if (solvable) {
        report.stats["solve_accuracy"] = static_cast<double>(solved) / static_cast<double>(solvable);
    }
    report.passed = used > 0;
    if (flagged) report.notes.push_back("quadruples with empty common support excluded");
    return report;
}

CheckReport null_word_addition_check(const PlantedSpace& planted, int n_pairs,
                                     const CheckThresholds& th) {
    if (!planted.has_null()) {
        throw std::invalid_argument("null_word_addition_check: planted space has no null word");
    }
    CheckReport report;
    report.name = "null_word_addition";
    report.scope = "exact";

    const auto& w = planted.space.W;
    const auto& c = planted.space.C;
    const int n = planted.size();
    std::mt19937_64 rng(th.seed);
    double residual_max = 0;
    std::int64_t ordering_violations = 0, checked = 0;
    for (int i = 0; i < n_pairs; ++i) {
        const int x = static_cast<int>(rng() % n);
        const int y = static_cast<int>(rng() % n);
        if (x == y || x == planted.null_id || y == planted.null_id) continue;
        const Eigen::VectorXd z = w.row(x) + w.row(y);

        // gamma'(x, z) through mixed products, z extended linearly.
        auto gamma_with_sum = [&](int a) {
            const double za = z.dot(c.row(a));
            const double aa = w.row(a).dot(c.row(a));
            const double zz = z.dot(c.row(x)) + z.dot(c.row(y));  // <z, z_c>, z_c = x_c + y_c
            return 2.0 * za - aa - zz;
        };
        const double gamma_xz = gamma_with_sum(x);
        const double gamma_yz = gamma_with_sum(y);
        // gamma'(null, y) = -<y, y_c>; the addition identity makes the two
        // gamma' values of the pair set {(x,z), (null, y)} coincide.
        const double gamma_null_y = -w.row(y).dot(c.row(y));
        const double gamma_null_x = -w.row(x).dot(c.row(x));
        residual_max = std::max(residual_max, std::abs(gamma_xz - gamma_null_y));
        residual_max = std::max(residual_max, std::abs(gamma_yz - gamma_null_x));

        // commonality(z, a) realizes cspmi(a, z) = log p(other) + delta.
        const double common_zx = gamma_xz - gamma_null_y + planted.assigned_log_p(y) + planted.delta();
        const double common_zy = gamma_yz - gamma_null_x + planted.assigned_log_p(x) + planted.delta();
        const double lpx = planted.assigned_log_p(x);
        const double lpy = planted.assigned_log_p(y);
        if (std::abs(lpx - lpy) > 1e-12) {
            ++checked;
            // the sum must have more in common with the rarer word
            const bool ok = lpx > lpy ? common_zy > common_zx : common_zx > common_zy;
            if (!ok) ++ordering_violations;
        }
        report.points.emplace_back(lpy + planted.delta(), common_zx);
    }
    report.samples["pairs"] = static_cast<std::int64_t>(report.points.size());
    report.samples["ordering_checked"] = checked;
    report.samples["ordering_violations"] = ordering_violations;
    report.stats["identity_residual_max"] = residual_max;
    report.passed = residual_max <= th.exact_residual && ordering_violations == 0 && checked > 0;
    return report;
}

CheckReport zipf_self_cooccurrence_check(const CorpusStats& stats,
                                         const CheckThresholds& th) {
    CheckReport report;
    report.name = "zipf_self_cooccurrence";
    report.scope = "statistical";

    std::vector<double> pw, pww;
    for (int x = 0; x < stats.vocab_size(); ++x) {
        if (stats.table().get(x, x) > 0) {
            pw.push_back(stats.p_marginal(x));
            pww.push_back(stats.p_joint(x, x));
            report.points.emplace_back(pw.back(), pww.back());
        }
    }
    report.samples["words_with_self_cooccurrence"] = static_cast<std::int64_t>(pw.size());
    if (pw.size() < 30) {
        report.notes.push_back("insufficient sample: fewer than 30 words with self-co-occurrence");
        report.passed = false;
        return report;
    }
    const double r = pearson_r(pw, pww);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < pw.size(); ++i) {
        num += pw[i] * pww[i];
        den += pw[i] * pw[i];
    }
    report.stats["pearson_r"] = r;
    report.stats["rho"] = num / den;  // least squares through the origin
    report.passed = r >= th.self_cooc_r;
    return report;
}

CheckReport lambda_estimate(const EmbeddingSpace& space, const CheckThresholds& th) {
    (void)th;
    CheckReport report;
    report.name = "lambda_estimate";
    report.scope = exact_scope(space) ? "exact" : "statistical";

    std::vector<double> lambdas;
    std::int64_t zero_norm = 0;
    double num = 0, den = 0;
    for (int i = 0; i < space.W.rows(); ++i) {
        const double ww = space.W.row(i).squaredNorm();
        if (ww == 0) {
            ++zero_norm;
            continue;
        }
        const double cw = space.C.row(i).dot(space.W.row(i));
        lambdas.push_back(cw / ww);
        num += cw;
        den += ww;
    }
    report.samples["words"] = static_cast<std::int64_t>(lambdas.size());
    report.samples["zero_norm_excluded"] = zero_norm;
    if (!lambdas.empty()) {
        double mean = 0;
        for (double l : lambdas) mean += l;
        mean /= static_cast<double>(lambdas.size());
        const double lambda_global = num / den;
        report.stats["lambda_mean"] = mean;
        report.stats["lambda_global"] = lambda_global;
        report.stats["lambda_stddev"] = std::sqrt(variance(lambdas));
        report.stats["global_fit_residual"] =
            (space.C - lambda_global * space.W).norm() / space.W.norm();
        for (double l : lambdas) report.points.emplace_back(l, 0.0);
    }
    // Dispersion is reported, not asserted: indefinite factorized matrices
    // have per-direction signs instead of a single global lambda.
    report.passed = !lambdas.empty();
    return report;
}

nlohmann::json AnalogyReport::to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["category"] = r.category;
        row["mean_cspmi"] = r.mean_cspmi;
        row["mean_pmi"] = r.mean_pmi;
        row["median_pair_frequency"] = r.median_pair_frequency;
        row["cspmi_variance"] = r.cspmi_variance;
        row["accuracy"] = r.accuracy;
        row["coverage"] = r.coverage;
        row["observed_pairs"] = r.observed_pairs;
        row["attempted"] = r.attempted;
        row["no_observed_pairs"] = r.no_observed_pairs;
        j["rows"].push_back(row);
    }
    if (accuracy_vs_cspmi_variance_r) {
        j["accuracy_vs_cspmi_variance_r"] = *accuracy_vs_cspmi_variance_r;
    }
    return j;
}

AnalogyReport analogy_report(const EmbeddingSpace& space, const CorpusStats& stats,
                             const Vocabulary& vocab, const AnalogySet& set,
                             Metric metric, int candidate_cap) {
    AnalogyReport report;
    const auto eval = evaluate_analogy_set(space, vocab, set, metric, candidate_cap);

    for (std::size_t c = 0; c < set.categories.size(); ++c) {
        const auto& cat = set.categories[c];
        AnalogyStatsRow row;
        row.category = cat.name;
        row.accuracy = eval[c].accuracy();
        row.coverage = eval[c].coverage();
        row.attempted = eval[c].attempted;

        std::vector<double> cspmis, pmis, freqs;
        for (const auto& [xw, yw] : cat.pairs) {
            const int x = vocab.id(xw), y = vocab.id(yw);
            if (x < 0 || y < 0) continue;
            auto cs = stats.cspmi(x, y);
            if (!cs) continue;
            cspmis.push_back(*cs);
            pmis.push_back(*stats.pmi(x, y));
            freqs.push_back(static_cast<double>(stats.table().get(x, y)));
        }
        row.observed_pairs = static_cast<std::int64_t>(cspmis.size());
        row.no_observed_pairs = cspmis.empty();
        if (!cspmis.empty()) {
            for (double v : cspmis) row.mean_cspmi += v;
            row.mean_cspmi /= static_cast<double>(cspmis.size());
            for (double v : pmis) row.mean_pmi += v;
            row.mean_pmi /= static_cast<double>(pmis.size());
            row.cspmi_variance = variance(cspmis);
            std::sort(freqs.begin(), freqs.end());
            const std::size_t n = freqs.size();
            row.median_pair_frequency =
                n % 2 ? freqs[n / 2] : 0.5 * (freqs[n / 2 - 1] + freqs[n / 2]);
        }
        report.rows.push_back(std::move(row));
    }

    std::vector<double> accs, vars;
    for (const auto& r : report.rows) {
        if (r.no_observed_pairs || r.attempted == 0) continue;
        accs.push_back(r.accuracy);
        vars.push_back(r.cspmi_variance);
    }
    if (accs.size() >= 2) {
        try {
            report.accuracy_vs_cspmi_variance_r = pearson_r(accs, vars);
        } catch (const std::invalid_argument&) {
            // degenerate across-category variance; leave unset
        }
    }
    return report;
}

void save_analogy_report_csv(const std::string& path, const AnalogyReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "category,mean_cspmi,mean_pmi,median_pair_frequency,cspmi_variance,"
           "accuracy,coverage,attempted\n";
    char buf[200];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%lld\n",
                      r.mean_cspmi, r.mean_pmi, r.median_pair_frequency, r.cspmi_variance,
                      r.accuracy, r.coverage, static_cast<long long>(r.attempted));
        out << r.category << buf;
    }
}

void VerificationSuite::add(CheckReport report) {
    checks.push_back(std::move(report));
    std::sort(checks.begin(), checks.end(),
              [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
}

bool VerificationSuite::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckReport& c) { return c.passed; });
}

nlohmann::json VerificationSuite::to_json() const {
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) j["checks"].push_back(c.to_json());
    j["all_passed"] = all_passed();
    return j;
}

std::string VerificationSuite::to_table() const {
    std::size_t name_w = 4;
    for (const auto& c : checks) name_w = std::max(name_w, c.name.size());
    std::ostringstream out;
    out << std::left;
    out.width(static_cast<std::streamsize>(name_w));
    out << "name";
    out << "  scope        result  stats\n";
    for (const auto& c : checks) {
        out.width(static_cast<std::streamsize>(name_w));
        out << c.name;
        out << "  ";
        out.width(11);
        out << c.scope;
        out << "  ";
        out.width(6);
        out << (c.passed ? "pass" : "FAIL");
        out << "  ";
        bool first = true;
        for (const auto& [k, v] : c.stats) {
            if (!first) out << ", ";
            out << k << "=" << v;
            first = false;
        }
        for (const auto& [k, v] : c.samples) {
            if (!first) out << ", ";
            out << k << "=" << v;
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

void VerificationSuite::save_sample_csvs(const std::string& directory) const {
    for (const auto& c : checks) {
        if (c.points.empty()) continue;
        const auto path = std::filesystem::path(directory) / ("check_" + c.name + ".csv");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << "x,y\n";
        char buf[80];
        for (const auto& [x, y] : c.points) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, y);
            out << buf;
        }
    }
}

}  // namespace embkit
