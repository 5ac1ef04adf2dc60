#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace embkit {

struct EmptyCorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Word <-> id index with unigram counts. Ids are dense 0..|V|-1, assigned in
// descending count order, ties broken lexicographically.
struct Vocabulary {
    std::vector<std::string> words;            // id -> surface form
    std::vector<std::int64_t> counts;          // id -> token count
    std::unordered_map<std::string, int> id_of;
    std::int64_t total_tokens = 0;

    int size() const { return static_cast<int>(words.size()); }

    int id(const std::string& w) const {
        auto it = id_of.find(w);
        return it == id_of.end() ? -1 : it->second;
    }

    // FNV-1a over "word\tcount\n" lines; identifies the vocabulary in files.
    std::string checksum() const;
};

std::vector<std::string> tokenize(std::istream& in, bool lowercase);

Vocabulary build_vocabulary(const std::vector<std::string>& tokens,
                            std::int64_t min_count);

// Whitespace tokenization + min_count filter. Throws EmptyCorpusError if no
// token survives the filter.
Vocabulary ingest_corpus(std::istream& in, std::int64_t min_count,
                         bool lowercase);

// Maps tokens to ids, dropping words not in the vocabulary (positions close
// up before windowing).
std::vector<int> encode(const std::vector<std::string>& tokens,
                        const Vocabulary& vocab);

void save_vocabulary(const std::string& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::string& path);

std::uint64_t fnv1a64(std::span<const char> data, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string fnv1a64_hex(const std::string& data);

}  // namespace embkit
