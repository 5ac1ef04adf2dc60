#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "embkit/analogy.hpp"
#include "embkit/cooc.hpp"
#include "embkit/factorize.hpp"
#include "embkit/pipeline.hpp"
#include "embkit/sgns.hpp"
#include "embkit/stats.hpp"
#include "embkit/synthetic.hpp"
#include "embkit/theorem.hpp"
#include "embkit/vocab.hpp"

namespace fs = std::filesystem;
using namespace embkit;

namespace {

std::vector<int> load_ids(const std::string& corpus, const Vocabulary& vocab, bool lowercase) {
    std::ifstream in(corpus);
    if (!in) throw std::runtime_error("cannot read corpus: " + corpus);
    return encode(tokenize(in, lowercase), vocab);
}

EmbeddingSpace load_space(const std::string& w_path, const std::string& c_path,
                          const Vocabulary& vocab, const std::string& provenance, int k) {
    EmbeddingSpace space;
    space.W = load_embeddings(w_path, vocab);
    space.C = c_path.empty() ? space.W : load_embeddings(c_path, vocab);
    space.d = static_cast<int>(space.W.cols());
    space.shift_k = k;
    space.vocab_ref = vocab.checksum();
    if (provenance == "exact") space.provenance = Provenance::exact;
    else if (provenance == "truncated") space.provenance = Provenance::truncated;
    else if (provenance == "planted") space.provenance = Provenance::planted;
    else space.provenance = Provenance::sgns;
    return space;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus statistics, embedding factorization and analogy verification"};
    app.require_subcommand(1);

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "build a vocabulary from a corpus");
    std::string corpus_path, out_path = "vocab.tsv";
    std::int64_t min_count = 1;
    bool lowercase = true;
    ingest->add_option("--corpus", corpus_path, "corpus text file")->required();
    ingest->add_option("--min-count", min_count, "minimum token count");
    ingest->add_flag("--lowercase,!--no-lowercase", lowercase, "lowercase tokens");
    ingest->add_option("-o,--out", out_path, "output vocabulary TSV");

    // ---- count ----
    auto* count = app.add_subcommand("count", "count co-occurrences");
    std::string vocab_path, cooc_out = "cooccurrences.txt";
    int window = 5, workers = 1;
    count->add_option("--corpus", corpus_path, "corpus text file")->required();
    count->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
    count->add_option("--window", window, "context half-width");
    count->add_option("--workers", workers, "counting threads");
    count->add_flag("--lowercase,!--no-lowercase", lowercase, "lowercase tokens");
    count->add_option("-o,--out", cooc_out, "output co-occurrence file");

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "export pair statistics CSV");
    std::string cooc_path, csv_out = "pairs.csv";
    stats_cmd->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
    stats_cmd->add_option("--cooc", cooc_path, "co-occurrence file")->required();
    stats_cmd->add_option("-o,--out", csv_out, "output CSV");

    // ---- embed ----
    auto* embed = app.add_subcommand("embed", "factorize the shifted PMI matrix");
    std::string model = "exact", w_out = "W.txt", c_out = "C.txt";
    int shift_k = 1;
    embed->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
    embed->add_option("--cooc", cooc_path, "co-occurrence file")->required();
    embed->add_option("--model", model, "exact | truncated:<d>");
    embed->add_option("--shift-k", shift_k, "PMI shift k");
    embed->add_option("--out-w", w_out, "word vectors output");
    embed->add_option("--out-c", c_out, "context vectors output");

    // ---- train ----
    auto* train = app.add_subcommand("train", "train SGNS embeddings");
    SgnsConfig sgns;
    std::string train_log_out = "train_log.csv";
    std::uint64_t seed = 0;
    train->add_option("--corpus", corpus_path, "corpus text file")->required();
    train->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
    train->add_option("--dim", sgns.d, "embedding dimension");
    train->add_option("--negatives", sgns.negatives, "negative samples per positive");
    train->add_option("--window", sgns.window, "context half-width");
    train->add_option("--epochs", sgns.epochs, "training epochs");
    train->add_option("--lr-start", sgns.lr_start, "initial learning rate");
    train->add_option("--lr-end", sgns.lr_end, "final learning rate");
    train->add_option("--neg-exponent", sgns.neg_exponent, "negative distribution exponent");
    train->add_option("--seed", seed, "rng seed")->required();
    train->add_option("--threads", sgns.threads, "1 = deterministic");
    train->add_flag("--lowercase,!--no-lowercase", lowercase, "lowercase tokens");
    train->add_option("--out-w", w_out, "word vectors output");
    train->add_option("--out-c", c_out, "context vectors output");
    train->add_option("--log", train_log_out, "training log CSV");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate an analogy set");
    std::string set_path, w_path, c_path, metric = "cosine", results_out = "analogy_results.csv";
    int candidate_cap = 0;
    eval->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
    eval->add_option("--embeddings", w_path, "word vectors (word2vec text)")->required();
    eval->add_option("--analogy-set", set_path, "questions-words file")->required();
    eval->add_option("--metric", metric, "euclidean | cosine");
    eval->add_option("--candidate-cap", candidate_cap, "restrict pool to N most frequent words");
    eval->add_option("-o,--out", results_out, "results CSV");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run the identity check suite");
    std::string provenance = "sgns", json_out = "report.json";
    int sample_pairs = 10000, noise_bins = 5;
    verify->add_option("--vocab", vocab_path, "vocabulary TSV")->required();
    verify->add_option("--cooc", cooc_path, "co-occurrence file")->required();
    verify->add_option("--embeddings", w_path, "word vectors")->required();
    verify->add_option("--contexts", c_path, "context vectors (defaults to word vectors)");
    verify->add_option("--analogy-set", set_path, "questions-words file (optional)");
    verify->add_option("--provenance", provenance, "exact | truncated | sgns | planted");
    verify->add_option("--shift-k", shift_k, "PMI shift k of the space");
    verify->add_option("--metric", metric, "euclidean | cosine");
    verify->add_option("--sample-pairs", sample_pairs, "sampled observed pairs");
    verify->add_option("--noise-bins", noise_bins, "frequency bins for the noise report");
    verify->add_option("--seed", seed, "rng seed")->required();
    verify->add_option("-o,--out", json_out, "JSON report output");

    // ---- run ----
    auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    run->add_option("--config", config_path, "key = value config file")->required();
    run->add_option("--set", overrides, "override: key=value (repeatable)");
    run->add_option("--out-dir", out_dir, "output directory (overrides config)");

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "print a run's verification report");
    std::string run_dir;
    report_cmd->add_option("--run-dir", run_dir, "pipeline output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            std::ifstream in(corpus_path);
            if (!in) throw std::runtime_error("cannot read corpus: " + corpus_path);
            save_vocabulary(out_path, ingest_corpus(in, min_count, lowercase));
        } else if (*count) {
            const auto vocab = load_vocabulary(vocab_path);
            const auto ids = load_ids(corpus_path, vocab, lowercase);
            save_cooccurrences(cooc_out, count_cooccurrences(ids, vocab, window, workers));
        } else if (*stats_cmd) {
            const auto vocab = load_vocabulary(vocab_path);
            CorpusStats stats(load_cooccurrences(cooc_path), vocab.size());
            stats.export_pair_csv(csv_out, vocab);
        } else if (*embed) {
            const auto vocab = load_vocabulary(vocab_path);
            CorpusStats stats(load_cooccurrences(cooc_path), vocab.size());
            const auto m = stats.shifted_pmi_matrix(shift_k);
            EmbeddingSpace space =
                model == "exact"
                    ? exact_factorize(m.values, shift_k, vocab.checksum())
                    : truncated_factorize(m.values,
                                          std::stoi(model.substr(std::string("truncated:").size())),
                                          shift_k, vocab.checksum());
            save_embeddings(w_out, vocab, space.W);
            save_embeddings(c_out, vocab, space.C);
        } else if (*train) {
            const auto vocab = load_vocabulary(vocab_path);
            const auto ids = load_ids(corpus_path, vocab, lowercase);
            sgns.seed = seed;
            std::vector<TrainLogRow> log;
            const auto space = train_sgns(ids, vocab, sgns, &log);
            save_embeddings(w_out, vocab, space.W);
            save_embeddings(c_out, vocab, space.C);
            save_train_log(train_log_out, log);
        } else if (*eval) {
            const auto vocab = load_vocabulary(vocab_path);
            const auto space = load_space(w_path, "", vocab, "sgns", 1);
            const auto set = load_analogy_set(set_path);
            const auto results = evaluate_analogy_set(space, vocab, set,
                                                      metric_from_name(metric), candidate_cap);
            save_category_results(results_out, results);
            for (const auto& r : results) {
                std::cout << r.name << " accuracy=" << r.accuracy()
                          << " coverage=" << r.coverage() << " attempted=" << r.attempted << '\n';
            }
        } else if (*verify) {
            const auto vocab = load_vocabulary(vocab_path);
            CorpusStats stats(load_cooccurrences(cooc_path), vocab.size());
            const auto space = load_space(w_path, c_path, vocab, provenance, shift_k);
            CheckThresholds th;
            th.sample_pairs = sample_pairs;
            th.seed = seed;
            const auto pairs = sample_observed_pairs(stats, sample_pairs, seed);
            VerificationSuite suite;
            suite.add(cspmi_identity_check(space, stats, pairs, th));
            suite.add(euclid_cspmi_correlation(space, stats, pairs, false, th));
            suite.add(euclid_cspmi_correlation(space, stats, pairs, true, th));
            suite.add(zipf_self_cooccurrence_check(stats, th));
            suite.add(lambda_estimate(space, th));
            {
                const auto m = stats.shifted_pmi_matrix(space.shift_k);
                const auto noise = noise_by_frequency(space, m, stats.table(), noise_bins);
                CheckReport nr;
                nr.name = "noise_by_frequency";
                nr.scope = "statistical";
                nr.stats["residual_max"] = noise.residual_max;
                for (std::size_t b = 0; b < noise.bins.size(); ++b) {
                    nr.stats["bin" + std::to_string(b) + "_variance"] = noise.bins[b].variance;
                    nr.samples["bin" + std::to_string(b) + "_pairs"] = noise.bins[b].n_pairs;
                }
                nr.passed = noise.bins.size() < 2 ||
                            noise.bins.back().variance < noise.bins.front().variance;
                suite.add(std::move(nr));
            }
            std::ofstream jr(json_out);
            jr << suite.to_json().dump(2) << '\n';
            std::cout << suite.to_table();
            return suite.all_passed() ? 0 : 2;
        } else if (*run) {
            RunConfig cfg = parse_config_file(config_path);
            std::vector<std::pair<std::string, std::string>> kv;
            for (const auto& ov : overrides) {
                const auto eq = ov.find('=');
                if (eq == std::string::npos) throw ConfigError("override must be key=value: " + ov);
                kv.emplace_back(ov.substr(0, eq), ov.substr(eq + 1));
            }
            apply_overrides(cfg, kv);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (cfg.out_dir.empty()) {
                cfg.out_dir = (fs::path(default_output_root()) /
                               ("run-" + std::to_string(cfg.seed)))
                                  .string();
            }
            return run_pipeline(cfg);
        } else if (*report_cmd) {
            std::ifstream in(fs::path(run_dir) / "report.json");
            if (!in) throw std::runtime_error("no report.json in " + run_dir);
            nlohmann::json report;
            in >> report;
            VerificationSuite suite;
            for (const auto& c : report["verification"]["checks"]) {
                CheckReport cr;
                cr.name = c["name"];
                cr.scope = c["scope"];
                cr.passed = c["passed"];
                for (auto it = c["stats"].begin(); it != c["stats"].end(); ++it) {
                    cr.stats[it.key()] = it.value();
                }
                for (auto it = c["samples"].begin(); it != c["samples"].end(); ++it) {
                    cr.samples[it.key()] = it.value();
                }
                suite.checks.push_back(std::move(cr));
            }
            std::cout << suite.to_table();
            if (report.contains("analogy") && report["analogy"].contains("rows")) {
                for (const auto& row : report["analogy"]["rows"]) {
                    std::cout << row["category"].get<std::string>()
                              << "  mean_cspmi=" << row["mean_cspmi"].get<double>()
                              << "  cspmi_variance=" << row["cspmi_variance"].get<double>()
                              << "  accuracy=" << row["accuracy"].get<double>() << '\n';
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
