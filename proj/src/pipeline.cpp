#include "embkit/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "embkit/analogy.hpp"
#include "embkit/cooc.hpp"
#include "embkit/factorize.hpp"
#include "embkit/synthetic.hpp"

namespace embkit {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (!has_seed) throw ConfigError("config: seed is mandatory");
    if (corpus_source != "file" && corpus_source != "zipf" && corpus_source != "analogy") {
        throw ConfigError("config: corpus source must be file, zipf or analogy");
    }
    if (corpus_source == "file") {
        if (corpus_path.empty()) throw ConfigError("config: corpus path required for source=file");
        if (!fs::exists(corpus_path)) throw ConfigError("config: missing corpus file: " + corpus_path);
    }
    if (model != "exact" && model != "sgns" && model.rfind("truncated:", 0) != 0) {
        throw ConfigError("config: model must be exact, truncated:<d> or sgns");
    }
    if (!analogy_set_path.empty() && !fs::exists(analogy_set_path)) {
        throw ConfigError("config: missing analogy set file: " + analogy_set_path);
    }
    if (window < 1) throw ConfigError("config: window must be >= 1");
    if (min_count < 1) throw ConfigError("config: min_count must be >= 1");
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    if (out_dir.empty()) throw ConfigError("config: out_dir required");
    metric_from_name(metric);
}

namespace {

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean value: " + v);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "source") cfg.corpus_source = value;
    else if (key == "corpus") cfg.corpus_path = value;
    else if (key == "zipf.vocab") cfg.zipf_vocab = std::stoi(value);
    else if (key == "zipf.tokens") cfg.zipf_tokens = std::stoll(value);
    else if (key == "zipf.exponent") cfg.zipf_exponent = std::stod(value);
    else if (key == "analogy.relations") cfg.analogy_relations = std::stoi(value);
    else if (key == "analogy.pairs") cfg.analogy_pairs = std::stoi(value);
    else if (key == "analogy.repetitions") {
        cfg.analogy_repetitions.clear();
        for (const auto& item : split_list(value)) cfg.analogy_repetitions.push_back(std::stoi(item));
    } else if (key == "window") cfg.window = std::stoi(value);
    else if (key == "min_count") cfg.min_count = std::stoll(value);
    else if (key == "lowercase") cfg.lowercase = parse_bool(value);
    else if (key == "model") cfg.model = value;
    else if (key == "shift_k") cfg.shift_k = std::stoi(value);
    else if (key == "sgns.d") cfg.sgns.d = std::stoi(value);
    else if (key == "sgns.negatives") cfg.sgns.negatives = std::stoi(value);
    else if (key == "sgns.epochs") cfg.sgns.epochs = std::stoi(value);
    else if (key == "sgns.lr_start") cfg.sgns.lr_start = std::stod(value);
    else if (key == "sgns.lr_end") cfg.sgns.lr_end = std::stod(value);
    else if (key == "sgns.neg_exponent") cfg.sgns.neg_exponent = std::stod(value);
    else if (key == "analogy_set") cfg.analogy_set_path = value;
    else if (key == "metric") cfg.metric = value;
    else if (key == "candidate_cap") cfg.candidate_cap = std::stoi(value);
    else if (key == "checks") cfg.checks = split_list(value);
    else if (key == "sample_pairs") cfg.thresholds.sample_pairs = std::stoi(value);
    else if (key == "noise_bins") cfg.noise_bins = std::stoi(value);
    else if (key == "threshold.cspmi_gamma_r") cfg.thresholds.cspmi_gamma_r = std::stod(value);
    else if (key == "threshold.euclid_cspmi_r") cfg.thresholds.euclid_cspmi_r = std::stod(value);
    else if (key == "threshold.self_cooc_r") cfg.thresholds.self_cooc_r = std::stod(value);
    else if (key == "seed") {
        cfg.seed = std::stoull(value);
        cfg.has_seed = true;
    } else if (key == "workers") cfg.workers = std::stoi(value);
    else if (key == "out_dir") cfg.out_dir = value;
    else throw ConfigError("config: unknown key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        }
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg,
                     const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) apply_config_entry(cfg, k, v);
}

std::string default_output_root() {
    if (const char* env = std::getenv("EMBKIT_OUT")) return env;
    return "runs";
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64_hex(buf.str());
}

namespace {

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["source"] = cfg.corpus_source;
    j["corpus"] = cfg.corpus_path;
    j["zipf.vocab"] = cfg.zipf_vocab;
    j["zipf.tokens"] = cfg.zipf_tokens;
    j["zipf.exponent"] = cfg.zipf_exponent;
    j["analogy.relations"] = cfg.analogy_relations;
    j["analogy.pairs"] = cfg.analogy_pairs;
    j["analogy.repetitions"] = cfg.analogy_repetitions;
    j["window"] = cfg.window;
    j["min_count"] = cfg.min_count;
    j["lowercase"] = cfg.lowercase;
    j["model"] = cfg.model;
    j["shift_k"] = cfg.shift_k;
    j["sgns.d"] = cfg.sgns.d;
    j["sgns.negatives"] = cfg.sgns.negatives;
    j["sgns.epochs"] = cfg.sgns.epochs;
    j["sgns.lr_start"] = cfg.sgns.lr_start;
    j["sgns.lr_end"] = cfg.sgns.lr_end;
    j["sgns.neg_exponent"] = cfg.sgns.neg_exponent;
    j["analogy_set"] = cfg.analogy_set_path;
    j["metric"] = cfg.metric;
    j["candidate_cap"] = cfg.candidate_cap;
    j["checks"] = cfg.checks;
    j["sample_pairs"] = cfg.thresholds.sample_pairs;
    j["noise_bins"] = cfg.noise_bins;
    j["threshold.cspmi_gamma_r"] = cfg.thresholds.cspmi_gamma_r;
    j["threshold.euclid_cspmi_r"] = cfg.thresholds.euclid_cspmi_r;
    j["threshold.self_cooc_r"] = cfg.thresholds.self_cooc_r;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    return j;
}

std::string stage_signature(const nlohmann::json& cfg_json,
                            const std::vector<std::string>& keys,
                            const std::vector<std::string>& upstream) {
    std::string blob;
    for (const auto& k : keys) blob += k + "=" + cfg_json.at(k).dump() + ";";
    for (const auto& u : upstream) blob += u + ";";
    return fnv1a64_hex(blob);
}

bool check_enabled(const RunConfig& cfg, const std::string& name) {
    if (cfg.checks.empty()) return true;
    return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

struct StageCache {
    nlohmann::json old_manifest;
    bool have_old = false;

    bool fresh(const std::string& stage, const std::string& signature,
               const std::vector<std::string>& artifacts, const std::string& dir) const {
        if (!have_old) return false;
        if (!old_manifest.contains("stages") || !old_manifest["stages"].contains(stage)) return false;
        const auto& rec = old_manifest["stages"][stage];
        if (rec.value("signature", "") != signature) return false;
        for (const auto& a : artifacts) {
            const auto path = fs::path(dir) / a;
            if (!fs::exists(path)) return false;
            if (!old_manifest.contains("artifacts") || !old_manifest["artifacts"].contains(a)) return false;
            if (old_manifest["artifacts"][a] != file_checksum(path.string())) return false;
        }
        return true;
    }
};

}  // namespace

int run_pipeline(const RunConfig& cfg) {
    std::string stage = "config";
    try {
        cfg.validate();
        fs::create_directories(cfg.out_dir);
        const auto out = [&](const std::string& name) {
            return (fs::path(cfg.out_dir) / name).string();
        };
        const nlohmann::json cj = config_json(cfg);

        StageCache cache;
        if (fs::exists(out("manifest.json"))) {
            std::ifstream mf(out("manifest.json"));
            try {
                mf >> cache.old_manifest;
                cache.have_old = true;
            } catch (...) {
                cache.have_old = false;
            }
        }
        nlohmann::json manifest;
        manifest["config"] = cj;
        manifest["stages"] = nlohmann::json::object();
        auto record_stage = [&](const std::string& name, const std::string& sig, bool skipped) {
            manifest["stages"][name] = {{"signature", sig}, {"loaded_from_cache", skipped}};
        };

        // ---- corpus ----------------------------------------------------
        stage = "corpus";
        std::vector<std::string> corpus_tokens;
        AnalogySet generated_set;
        bool have_generated_set = false;
        const std::vector<std::string> corpus_keys = {
            "source", "corpus", "zipf.vocab", "zipf.tokens", "zipf.exponent",
            "analogy.relations", "analogy.pairs", "analogy.repetitions", "seed"};
        std::string corpus_sig = stage_signature(cj, corpus_keys, {});
        if (cfg.corpus_source == "file") {
            std::ifstream in(cfg.corpus_path);
            corpus_tokens = tokenize(in, cfg.lowercase);
            corpus_sig = stage_signature(cj, corpus_keys, {file_checksum(cfg.corpus_path)});
        } else if (cfg.corpus_source == "zipf") {
            corpus_tokens = realize_tokens(
                generate_zipf_corpus(cfg.zipf_vocab, cfg.zipf_tokens, cfg.zipf_exponent, cfg.seed));
        } else {
            auto reps = cfg.analogy_repetitions;
            if (reps.empty()) reps.assign(cfg.analogy_relations, 100);
            if (static_cast<int>(reps.size()) == 1) reps.assign(cfg.analogy_relations, reps[0]);
            auto corpus = generate_analogy_corpus(cfg.analogy_relations, cfg.analogy_pairs,
                                                  reps, cfg.seed);
            corpus_tokens = std::move(corpus.tokens);
            generated_set = std::move(corpus.set);
            have_generated_set = true;
            save_analogy_set(out("analogy_set.txt"), generated_set);
            manifest["artifacts"]["analogy_set.txt"] = file_checksum(out("analogy_set.txt"));
        }
        if (cfg.corpus_source != "file") {
            std::ofstream corpus_out(out("corpus.txt"));
            for (std::size_t i = 0; i < corpus_tokens.size(); ++i) {
                corpus_out << corpus_tokens[i] << (i + 1 == corpus_tokens.size() ? '\n' : ' ');
            }
            manifest["artifacts"]["corpus.txt"] = file_checksum(out("corpus.txt"));
        }
        record_stage("corpus", corpus_sig, false);

        // ---- ingest ----------------------------------------------------
        stage = "ingest";
        const std::vector<std::string> ingest_keys = {"min_count", "lowercase"};
        const std::string ingest_sig = stage_signature(cj, ingest_keys, {corpus_sig});
        Vocabulary vocab;
        bool ingest_cached = cache.fresh("ingest", ingest_sig, {"vocab.tsv"}, cfg.out_dir);
        if (ingest_cached) {
            vocab = load_vocabulary(out("vocab.tsv"));
        } else {
            vocab = build_vocabulary(corpus_tokens, cfg.min_count);
            save_vocabulary(out("vocab.tsv"), vocab);
        }
        manifest["artifacts"]["vocab.tsv"] = file_checksum(out("vocab.tsv"));
        record_stage("ingest", ingest_sig, ingest_cached);

        // ---- count -----------------------------------------------------
        stage = "count";
        const std::string count_sig =
            stage_signature(cj, {"window", "workers"}, {ingest_sig});
        CooccurrenceTable table;
        bool count_cached = cache.fresh("count", count_sig, {"cooccurrences.txt"}, cfg.out_dir);
        if (count_cached) {
            table = load_cooccurrences(out("cooccurrences.txt"));
        } else {
            const std::vector<int> ids = encode(corpus_tokens, vocab);
            table = count_cooccurrences(ids, vocab, cfg.window, cfg.workers);
            save_cooccurrences(out("cooccurrences.txt"), table);
        }
        manifest["artifacts"]["cooccurrences.txt"] = file_checksum(out("cooccurrences.txt"));
        record_stage("count", count_sig, count_cached);

        // ---- stats -----------------------------------------------------
        stage = "stats";
        CorpusStats stats(std::move(table), vocab.size());
        stats.export_pair_csv(out("pairs.csv"), vocab);
        manifest["artifacts"]["pairs.csv"] = file_checksum(out("pairs.csv"));
        record_stage("stats", stage_signature(cj, {}, {count_sig}), false);

        // ---- embed -----------------------------------------------------
        stage = "embed";
        const std::vector<std::string> embed_keys = {
            "model", "shift_k", "sgns.d", "sgns.negatives", "sgns.epochs",
            "sgns.lr_start", "sgns.lr_end", "sgns.neg_exponent", "window", "seed", "workers"};
        const std::string embed_sig = stage_signature(cj, embed_keys, {count_sig});
        EmbeddingSpace space;
        std::vector<std::string> embed_artifacts = {"W.txt", "C.txt"};
        const bool is_sgns = cfg.model == "sgns";
        if (is_sgns) embed_artifacts.push_back("train_log.csv");
        bool embed_cached = cache.fresh("embed", embed_sig, embed_artifacts, cfg.out_dir);
        if (embed_cached) {
            space.W = load_embeddings(out("W.txt"), vocab);
            space.C = load_embeddings(out("C.txt"), vocab);
            space.d = static_cast<int>(space.W.cols());
            space.shift_k = is_sgns ? cfg.sgns.negatives : cfg.shift_k;
            space.provenance = is_sgns ? Provenance::sgns
                               : cfg.model == "exact" ? Provenance::exact
                                                      : Provenance::truncated;
            space.vocab_ref = vocab.checksum();
        } else if (is_sgns) {
            SgnsConfig sgns_cfg = cfg.sgns;
            sgns_cfg.window = cfg.window;
            sgns_cfg.seed = cfg.seed;
            sgns_cfg.threads = cfg.workers;
            const std::vector<int> ids = encode(corpus_tokens, vocab);
            std::vector<TrainLogRow> train_log;
            space = train_sgns(ids, vocab, sgns_cfg, &train_log);
            save_train_log(out("train_log.csv"), train_log);
        } else {
            const auto m = stats.shifted_pmi_matrix(cfg.shift_k);
            if (cfg.model == "exact") {
                space = exact_factorize(m.values, cfg.shift_k, vocab.checksum());
            } else {
                const int d = std::stoi(cfg.model.substr(std::string("truncated:").size()));
                space = truncated_factorize(m.values, d, cfg.shift_k, vocab.checksum());
            }
        }
        if (!embed_cached) {
            save_embeddings(out("W.txt"), vocab, space.W);
            save_embeddings(out("C.txt"), vocab, space.C);
        }
        for (const auto& a : embed_artifacts) manifest["artifacts"][a] = file_checksum(out(a));
        record_stage("embed", embed_sig, embed_cached);

        // ---- eval ------------------------------------------------------
        stage = "eval";
        std::optional<AnalogySet> set;
        if (!cfg.analogy_set_path.empty()) {
            set = load_analogy_set(cfg.analogy_set_path);
        } else if (have_generated_set) {
            set = generated_set;
        }
        const Metric metric = metric_from_name(cfg.metric);
        AnalogyReport areport;
        if (set) {
            areport = analogy_report(space, stats, vocab, *set, metric, cfg.candidate_cap);
            save_category_results(out("analogy_results.csv"),
                                  evaluate_analogy_set(space, vocab, *set, metric,
                                                       cfg.candidate_cap, cfg.workers));
        } else {
            std::ofstream empty(out("analogy_results.csv"));
            empty << "category,accuracy,coverage,attempted\n";
        }
        save_analogy_report_csv(out("analogy_report.csv"), areport);
        manifest["artifacts"]["analogy_results.csv"] = file_checksum(out("analogy_results.csv"));
        manifest["artifacts"]["analogy_report.csv"] = file_checksum(out("analogy_report.csv"));
        record_stage("eval", stage_signature(cj, {"analogy_set", "metric", "candidate_cap"},
                                             {embed_sig}),
                     false);

        // ---- verify ----------------------------------------------------
        stage = "verify";
        VerificationSuite suite;
        const auto pairs = sample_observed_pairs(stats, cfg.thresholds.sample_pairs, cfg.seed);
        CheckThresholds th = cfg.thresholds;
        th.seed = cfg.seed;
        if (check_enabled(cfg, "cspmi_identity")) {
            suite.add(cspmi_identity_check(space, stats, pairs, th));
        }
        if (check_enabled(cfg, "euclid_cspmi_raw")) {
            suite.add(euclid_cspmi_correlation(space, stats, pairs, false, th));
        }
        if (check_enabled(cfg, "euclid_cspmi_normalized")) {
            suite.add(euclid_cspmi_correlation(space, stats, pairs, true, th));
        }
        if (check_enabled(cfg, "zipf_self_cooccurrence")) {
            suite.add(zipf_self_cooccurrence_check(stats, th));
        }
        if (check_enabled(cfg, "lambda_estimate")) {
            suite.add(lambda_estimate(space, th));
        }
        if (check_enabled(cfg, "noise_by_frequency")) {
            const auto m = stats.shifted_pmi_matrix(space.shift_k);
            const auto noise = noise_by_frequency(space, m, stats.table(), cfg.noise_bins);
            CheckReport nr;
            nr.name = "noise_by_frequency";
            nr.scope = space.provenance == Provenance::sgns ? "statistical" : "exact";
            nr.stats["residual_max"] = noise.residual_max;
            std::int64_t b = 0;
            for (const auto& bin : noise.bins) {
                nr.stats["bin" + std::to_string(b) + "_variance"] = bin.variance;
                nr.samples["bin" + std::to_string(b) + "_pairs"] = bin.n_pairs;
                ++b;
            }
            if (space.provenance == Provenance::exact) {
                nr.passed = noise.residual_max <= 1e-8;
            } else if (noise.bins.size() >= 2) {
                nr.passed = noise.bins.back().variance < noise.bins.front().variance;
            }
            suite.add(std::move(nr));
        }
        if (check_enabled(cfg, "pennington_ratio") && set) {
            std::vector<std::array<int, 4>> quadruples;
            for (const auto& cat : set->categories) {
                for (std::size_t i = 0; i + 1 < cat.pairs.size(); i += 2) {
                    const int x1 = vocab.id(cat.pairs[i].first);
                    const int y1 = vocab.id(cat.pairs[i].second);
                    const int x2 = vocab.id(cat.pairs[i + 1].first);
                    const int y2 = vocab.id(cat.pairs[i + 1].second);
                    if (x1 < 0 || y1 < 0 || x2 < 0 || y2 < 0) continue;
                    quadruples.push_back({x1, y1, x2, y2});
                }
            }
            if (!quadruples.empty()) {
                suite.add(pennington_check(stats, quadruples, &space, metric, th));
            }
        }
        suite.save_sample_csvs(cfg.out_dir);

        nlohmann::json report;
        report["config"] = cj;
        report["verification"] = suite.to_json();
        report["analogy"] = areport.to_json();
        {
            std::ofstream jr(out("report.json"));
            jr << report.dump(2) << '\n';
        }
        {
            std::ofstream tr(out("report.txt"));
            tr << suite.to_table();
        }
        manifest["artifacts"]["report.json"] = file_checksum(out("report.json"));
        manifest["artifacts"]["report.txt"] = file_checksum(out("report.txt"));
        for (const auto& c : suite.checks) {
            const std::string name = "check_" + c.name + ".csv";
            if (fs::exists(out(name))) manifest["artifacts"][name] = file_checksum(out(name));
        }
        record_stage("verify", stage_signature(cj, {"checks", "sample_pairs", "noise_bins"},
                                               {embed_sig}),
                     false);

        std::ofstream mf(out("manifest.json"));
        mf << manifest.dump(2) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "[" << stage << "] error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace embkit
