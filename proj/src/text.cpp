#include "mailclass/text.hpp"

#include <algorithm>
#include <map>

#include "mailclass/error.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

namespace detail {
extern const char* const kEnglishStopWords;
}

namespace {

bool is_token_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\''; }

}  // namespace

StopWordList::StopWordList(std::span<const std::string> words) {
    for (const auto& w : words) {
        const auto word = to_lower_ascii(trim(w));
        if (word.empty()) continue;
        if (word.find_first_of(" \t\r\n") != std::string::npos)
            throw Error(ErrorCode::Schema, "stop word contains whitespace: \"" + word + "\"");
        words_.insert(word);
    }
}

StopWordList StopWordList::parse(std::string_view text) {
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) words.emplace_back(line);
        pos = nl + 1;
    }
    return StopWordList(words);
}

StopWordList StopWordList::load(const std::filesystem::path& path) { return parse(read_file(path)); }

const StopWordList& StopWordList::english() {
    static const StopWordList list = parse(detail::kEnglishStopWords);
    return list;
}

bool StopWordList::contains(std::string_view word) const { return words_.find(word) != words_.end(); }

std::vector<std::string> StopWordList::sorted_words() const {
    std::vector<std::string> out(words_.begin(), words_.end());
    std::sort(out.begin(), out.end());
    return out;
}

Tokens tokenize(std::string_view text, const StopWordList& stop_words) {
    Tokens tokens;
    std::string current;
    auto flush = [&] {
        std::string_view tok = current;
        while (!tok.empty() && tok.front() == '\'') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == '\'') tok.remove_suffix(1);
        if (tok.size() >= 2 && !stop_words.contains(tok)) tokens.emplace_back(tok);
        current.clear();
    };
    for (char c : text) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (is_token_char(c)) {
            current += c;
        } else if (!current.empty()) {
            flush();
        }
    }
    if (!current.empty()) flush();
    return tokens;
}

Vocabulary::Vocabulary(std::vector<Entry> ranked) : entries_(std::move(ranked)) {
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!index_.emplace(entries_[i].word, i).second)
            throw Error(ErrorCode::Domain, "duplicate vocabulary word: " + entries_[i].word);
        if (i > 0) {
            const auto& prev = entries_[i - 1];
            const auto& cur = entries_[i];
            if (prev.count < cur.count || (prev.count == cur.count && !(prev.word < cur.word)))
                throw Error(ErrorCode::Domain, "vocabulary entries out of rank order at " + cur.word);
        }
    }
}

std::optional<std::size_t> Vocabulary::rank_of(std::string_view word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second + 1;
}

std::optional<std::uint64_t> Vocabulary::count_of(std::string_view word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].count;
}

std::string Vocabulary::to_csv() const {
    std::string out = "rank,word,count\n";
    for (std::size_t i = 0; i < entries_.size(); ++i)
        out += std::to_string(i + 1) + "," + csv_field(entries_[i].word) + "," + std::to_string(entries_[i].count) + "\n";
    return out;
}

std::uint64_t Vocabulary::fingerprint() const { return fnv1a64(to_csv()); }

Vocabulary build_vocabulary(std::span<const Tokens> documents) {
    std::map<std::string, std::uint64_t, std::less<>> counts;
    for (const auto& doc : documents)
        for (const auto& token : doc) ++counts[token];
    if (counts.empty()) throw Error(ErrorCode::EmptyVocabulary, "no tokens in corpus");

    std::vector<Vocabulary::Entry> entries;
    entries.reserve(counts.size());
    for (auto& [word, count] : counts) entries.push_back({word, count});
    // std::map iteration is already lexicographic, so a stable sort on count
    // leaves equal-count words in lexicographic order.
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
    return Vocabulary(std::move(entries));
}

Vocabulary truncate(const Vocabulary& vocab, std::size_t num_words) {
    if (num_words == 0) throw Error(ErrorCode::Domain, "num_words must be at least 1");
    if (num_words >= vocab.size()) return vocab;
    std::vector<Vocabulary::Entry> kept(vocab.entries().begin(), vocab.entries().begin() + static_cast<std::ptrdiff_t>(num_words));
    return Vocabulary(std::move(kept));
}

}  // namespace mailclass
