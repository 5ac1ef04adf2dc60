#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "embkit/sgns.hpp"
#include "embkit/theorem.hpp"

namespace embkit {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Declarative run description. Parsed from "key = value" config files;
// command-line overrides win. Seeds are mandatory.
struct RunConfig {
    // corpus
    std::string corpus_source;  // "file" | "zipf" | "analogy"
    std::string corpus_path;
    int zipf_vocab = 2000;
    std::int64_t zipf_tokens = 100000;
    double zipf_exponent = 1.0;
    int analogy_relations = 3;
    int analogy_pairs = 8;
    std::vector<int> analogy_repetitions;  // per relation; single value broadcast
    // preprocessing
    int window = 5;
    std::int64_t min_count = 1;
    bool lowercase = true;
    // model
    std::string model = "sgns";  // "exact" | "truncated:<d>" | "sgns"
    SgnsConfig sgns;
    int shift_k = 1;  // shift for exact/truncated factorization
    // evaluation
    std::string analogy_set_path;  // empty: use generated set when available
    std::string metric = "cosine";
    int candidate_cap = 0;
    // verification
    std::vector<std::string> checks;  // empty = all applicable
    CheckThresholds thresholds;
    int noise_bins = 5;
    // run
    bool has_seed = false;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir;

    void validate() const;
};

RunConfig parse_config_file(const std::string& path);
void apply_overrides(RunConfig& cfg,
                     const std::vector<std::pair<std::string, std::string>>& kv);
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

// Default output root: EMBKIT_OUT env var, else "runs".
std::string default_output_root();

std::string file_checksum(const std::string& path);  // fnv1a64 hex of bytes

// Executes ingest -> count -> stats -> embed -> eval -> verify, writing every
// export format plus manifest.json. Stages whose input signatures match the
// previous manifest are loaded from their artifacts instead of recomputed;
// outputs are identical either way.
int run_pipeline(const RunConfig& cfg);

}  // namespace embkit
