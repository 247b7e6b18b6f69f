#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mailclass/text.hpp"

namespace mailclass {

struct EmailDocument {
    std::string id;
    std::string text;
    std::string label;

    bool operator==(const EmailDocument&) const = default;
};

class LabeledCorpus {
public:
    LabeledCorpus() = default;
    // Label list is derived from the documents (sorted, unique).
    explicit LabeledCorpus(std::vector<EmailDocument> documents);

    const std::vector<EmailDocument>& documents() const { return documents_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }

    // Index of the document's label within labels().
    std::size_t label_index(std::string_view label) const;
    std::vector<std::size_t> label_indices() const;
    std::vector<std::string> texts() const;

    bool operator==(const LabeledCorpus&) const = default;

private:
    std::vector<EmailDocument> documents_;
    std::vector<std::string> labels_;
};

struct LabelStats {
    std::map<std::string, std::uint64_t> per_label_email_count;
    std::map<std::string, std::uint64_t> per_label_word_count;
    std::uint64_t total_emails = 0;
    std::uint64_t total_words = 0;

    // "label,emails,words" rows plus a total row.
    std::string to_csv() const;
};

struct CorpusSource {
    enum class Kind { Mbox, Directory, Csv };
    Kind kind = Kind::Directory;
    std::filesystem::path path;

    // Directory -> label directories, *.csv -> CSV, anything else -> mbox.
    static CorpusSource detect(const std::filesystem::path& path);
};

struct LoadResult {
    LabeledCorpus corpus;
    std::size_t skipped_unlabeled = 0;
    std::size_t skipped_files = 0;
    std::vector<std::string> warnings;
};

// Gmail system labels dropped before choosing an email's class.
const std::set<std::string>& gmail_system_labels();

// Drops system labels from a comma-separated X-Gmail-Labels value and returns
// the lexicographically smallest remaining label.
std::optional<std::string> choose_gmail_label(std::string_view header_value);

LoadResult load_corpus(const CorpusSource& source);

LabeledCorpus filter_labels(const LabeledCorpus& corpus, std::size_t min_count, const std::set<std::string>& drop);

LabelStats corpus_stats(const LabeledCorpus& corpus, const StopWordList& stop_words);

}  // namespace mailclass
