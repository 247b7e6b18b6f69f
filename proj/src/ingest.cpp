#include "mailclass/ingest.hpp"

#include <algorithm>

#include "mailclass/error.hpp"
#include "mailclass/mime.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

namespace fs = std::filesystem;

LabeledCorpus::LabeledCorpus(std::vector<EmailDocument> documents) : documents_(std::move(documents)) {
    for (const auto& doc : documents_) {
        if (doc.label.empty()) throw Error(ErrorCode::Schema, "document " + doc.id + " has an empty label");
        labels_.push_back(doc.label);
    }
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

std::size_t LabeledCorpus::label_index(std::string_view label) const {
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) throw Error(ErrorCode::UnknownLabel, std::string(label));
    return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<std::size_t> LabeledCorpus::label_indices() const {
    std::vector<std::size_t> out;
    out.reserve(documents_.size());
    for (const auto& doc : documents_) out.push_back(label_index(doc.label));
    return out;
}

std::vector<std::string> LabeledCorpus::texts() const {
    std::vector<std::string> out;
    out.reserve(documents_.size());
    for (const auto& doc : documents_) out.push_back(doc.text);
    return out;
}

std::string LabelStats::to_csv() const {
    std::string out = "label,emails,words\n";
    for (const auto& [label, emails] : per_label_email_count) {
        const auto words = per_label_word_count.count(label) ? per_label_word_count.at(label) : 0;
        out += csv_field(label) + "," + std::to_string(emails) + "," + std::to_string(words) + "\n";
    }
    out += "TOTAL," + std::to_string(total_emails) + "," + std::to_string(total_words) + "\n";
    return out;
}

CorpusSource CorpusSource::detect(const fs::path& path) {
    if (fs::is_directory(path)) return {Kind::Directory, path};
    if (to_lower_ascii(path.extension().string()) == ".csv") return {Kind::Csv, path};
    return {Kind::Mbox, path};
}

const std::set<std::string>& gmail_system_labels() {
    static const std::set<std::string> labels{"Inbox", "Sent", "Unread", "Starred", "Important", "Archived"};
    return labels;
}

std::optional<std::string> choose_gmail_label(std::string_view header_value) {
    std::optional<std::string> best;
    std::size_t pos = 0;
    while (pos <= header_value.size()) {
        auto comma = header_value.find(',', pos);
        if (comma == std::string_view::npos) comma = header_value.size();
        auto label = trim(header_value.substr(pos, comma - pos));
        if (label.size() >= 2 && label.front() == '"' && label.back() == '"') label = label.substr(1, label.size() - 2);
        if (!label.empty() && !gmail_system_labels().contains(std::string(label)) && (!best || label < *best))
            best = std::string(label);
        pos = comma + 1;
    }
    return best;
}

namespace {

void load_mbox(const fs::path& path, LoadResult& result, std::vector<EmailDocument>& docs) {
    const auto bytes = read_file(path);
    const auto emails = parse_mbox(bytes);
    for (std::size_t i = 0; i < emails.size(); ++i) {
        const auto& email = emails[i];
        const std::string id = "mbox:" + std::to_string(i);
        for (const auto& w : email.warnings) result.warnings.push_back(id + ": " + w);
        const auto label = choose_gmail_label(email.header("X-Gmail-Labels").value_or(""));
        if (!label) {
            ++result.skipped_unlabeled;
            continue;
        }
        std::vector<std::string> warnings;
        auto text = extract_text(email, warnings);
        for (const auto& w : warnings) result.warnings.push_back(id + ": " + w);
        docs.push_back({id, std::move(text), *label});
    }
}

void load_directory(const fs::path& root, LoadResult& result, std::vector<EmailDocument>& docs) {
    std::vector<fs::path> label_dirs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root, ec))
        if (entry.is_directory() && !entry.path().filename().string().starts_with(".")) label_dirs.push_back(entry.path());
    if (ec) throw Error(ErrorCode::Io, "cannot list " + root.string() + ": " + ec.message());
    std::sort(label_dirs.begin(), label_dirs.end());

    for (const auto& dir : label_dirs) {
        const auto label = dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir, ec))
            if (entry.is_regular_file()) files.push_back(entry.path());
        if (ec) throw Error(ErrorCode::Io, "cannot list " + dir.string() + ": " + ec.message());
        std::sort(files.begin(), files.end());

        for (const auto& file : files) {
            const auto ext = to_lower_ascii(file.extension().string());
            const std::string id = label + "/" + file.filename().string();
            if (ext == ".txt") {
                std::vector<std::string> warnings;
                auto text = decode_charset(read_file(file), "utf-8", warnings);
                docs.push_back({id, std::string(trim(text)), label});
            } else if (ext == ".eml") {
                const auto email = parse_eml(read_file(file));
                for (const auto& w : email.warnings) result.warnings.push_back(id + ": " + w);
                std::vector<std::string> warnings;
                auto text = extract_text(email, warnings);
                for (const auto& w : warnings) result.warnings.push_back(id + ": " + w);
                docs.push_back({id, std::move(text), label});
            } else {
                ++result.skipped_files;
            }
        }
    }
}

void load_csv(const fs::path& path, std::vector<EmailDocument>& docs) {
    const auto rows = parse_csv(read_file(path));
    if (rows.empty()) throw Error(ErrorCode::Schema, path.string() + ": missing header row");
    const auto& header = rows.front();
    std::optional<std::size_t> text_col, label_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = to_lower_ascii(trim(header[i]));
        if (name == "text") text_col = i;
        if (name == "label") label_col = i;
    }
    if (!text_col || !label_col) throw Error(ErrorCode::Schema, path.string() + ": header must contain text,label");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() <= std::max(*text_col, *label_col))
            throw Error(ErrorCode::Schema, path.string() + ": row " + std::to_string(r) + " has too few columns");
        const std::string label(trim(row[*label_col]));
        if (label.empty()) throw Error(ErrorCode::Schema, path.string() + ": row " + std::to_string(r) + " has no label");
        docs.push_back({"csv:" + std::to_string(r), row[*text_col], label});
    }
}

}  // namespace

LoadResult load_corpus(const CorpusSource& source) {
    if (!fs::exists(source.path)) throw Error(ErrorCode::Io, "no such corpus source: " + source.path.string());
    LoadResult result;
    std::vector<EmailDocument> docs;
    switch (source.kind) {
        case CorpusSource::Kind::Mbox: load_mbox(source.path, result, docs); break;
        case CorpusSource::Kind::Directory: load_directory(source.path, result, docs); break;
        case CorpusSource::Kind::Csv: load_csv(source.path, docs); break;
    }
    if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents loaded from " + source.path.string());
    result.corpus = LabeledCorpus(std::move(docs));
    return result;
}

LabeledCorpus filter_labels(const LabeledCorpus& corpus, std::size_t min_count, const std::set<std::string>& drop) {
    std::map<std::string, std::size_t, std::less<>> counts;
    for (const auto& doc : corpus.documents()) ++counts[doc.label];
    std::vector<EmailDocument> kept;
    for (const auto& doc : corpus.documents())
        if (!drop.contains(doc.label) && counts[doc.label] >= min_count) kept.push_back(doc);
    if (kept.empty()) throw Error(ErrorCode::EmptyCorpus, "label filtering removed every document");
    return LabeledCorpus(std::move(kept));
}

LabelStats corpus_stats(const LabeledCorpus& corpus, const StopWordList& stop_words) {
    LabelStats stats;
    for (const auto& doc : corpus.documents()) {
        const auto words = tokenize(doc.text, stop_words).size();
        ++stats.per_label_email_count[doc.label];
        stats.per_label_word_count[doc.label] += words;
        ++stats.total_emails;
        stats.total_words += words;
    }
    return stats;
}

}  // namespace mailclass
