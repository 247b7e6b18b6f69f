#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mailclass {

using Tokens = std::vector<std::string>;

class StopWordList {
public:
    StopWordList() = default;
    // Entries are lowercased; entries containing whitespace are rejected.
    explicit StopWordList(std::span<const std::string> words);

    // One word per line, '#' starts a comment.
    static StopWordList parse(std::string_view text);
    static StopWordList load(const std::filesystem::path& path);
    // The bundled English function-word list (data/stopwords.txt).
    static const StopWordList& english();

    bool contains(std::string_view word) const;
    std::size_t size() const { return words_.size(); }
    std::vector<std::string> sorted_words() const;

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    std::unordered_set<std::string, Hash, std::equal_to<>> words_;
};

// Lowercase, split on anything outside [a-z0-9'], strip edge apostrophes,
// drop tokens shorter than two characters and stop words.
Tokens tokenize(std::string_view text, const StopWordList& stop_words);

// Word ranks by descending corpus count, ties broken lexicographically.
// Rank r (1-based) is stored at index r - 1.
class Vocabulary {
public:
    struct Entry {
        std::string word;
        std::uint64_t count;

        bool operator==(const Entry&) const = default;
    };

    Vocabulary() = default;
    // Entries must already be in rank order.
    explicit Vocabulary(std::vector<Entry> ranked);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& word(std::size_t rank) const { return entries_.at(rank - 1).word; }

    std::optional<std::size_t> rank_of(std::string_view word) const;
    std::optional<std::uint64_t> count_of(std::string_view word) const;

    // "rank,word,count"
    std::string to_csv() const;
    std::uint64_t fingerprint() const;

    bool operator==(const Vocabulary& other) const { return entries_ == other.entries_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

// Throws EmptyVocabulary when there are no tokens at all.
Vocabulary build_vocabulary(std::span<const Tokens> documents);

// Keeps the min(num_words, size) best-ranked words.
Vocabulary truncate(const Vocabulary& vocab, std::size_t num_words);

}  // namespace mailclass
