#include "embkit/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace embkit {

std::uint64_t fnv1a64(std::span<const char> data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

std::string Vocabulary::checksum() const {
    std::string blob;
    for (int i = 0; i < size(); ++i) {
        blob += words[i];
        blob += '\t';
        blob += std::to_string(counts[i]);
        blob += '\n';
    }
    return fnv1a64_hex(blob);
}

std::vector<std::string> tokenize(std::istream& in, bool lowercase) {
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) {
        if (lowercase) {
            std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) {
                return static_cast<char>(std::tolower(c));
            });
        }
        tokens.push_back(std::move(tok));
        tok.clear();
    }
    return tokens;
}

Vocabulary build_vocabulary(const std::vector<std::string>& tokens,
                            std::int64_t min_count) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    std::unordered_map<std::string, std::int64_t> freq;
    for (const auto& t : tokens) ++freq[t];

    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (auto& [w, c] : freq) {
        if (c >= min_count) kept.emplace_back(w, c);
    }
    if (kept.empty()) throw EmptyCorpusError("no tokens survive the min_count filter");

    // Descending count, ties lexicographic.
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.words.reserve(kept.size());
    vocab.counts.reserve(kept.size());
    for (auto& [w, c] : kept) {
        vocab.id_of.emplace(w, static_cast<int>(vocab.words.size()));
        vocab.words.push_back(w);
        vocab.counts.push_back(c);
        vocab.total_tokens += c;
    }
    return vocab;
}

Vocabulary ingest_corpus(std::istream& in, std::int64_t min_count, bool lowercase) {
    return build_vocabulary(tokenize(in, lowercase), min_count);
}

std::vector<int> encode(const std::vector<std::string>& tokens,
                        const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        int id = vocab.id(t);
        if (id >= 0) ids.push_back(id);
    }
    return ids;
}

void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int i = 0; i < vocab.size(); ++i) {
        out << vocab.words[i] << '\t' << vocab.counts[i] << '\n';
    }
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw std::runtime_error("bad vocab line: " + line);
        std::string word = line.substr(0, tab);
        std::int64_t count = std::stoll(line.substr(tab + 1));
        vocab.id_of.emplace(word, static_cast<int>(vocab.words.size()));
        vocab.words.push_back(std::move(word));
        vocab.counts.push_back(count);
        vocab.total_tokens += count;
    }
    return vocab;
}

}  // namespace embkit
