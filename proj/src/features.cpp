#include "mailclass/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "mailclass/error.hpp"
#include "mailclass/svg.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols, std::span<const double> row_major) {
    if (row_major.size() != rows * cols) throw Error(ErrorCode::Shape, "dense buffer does not match shape");
    SparseMatrix m(0, cols);
    std::vector<Entry> row;
    for (std::size_t i = 0; i < rows; ++i) {
        row.clear();
        for (std::size_t j = 0; j < cols; ++j)
            if (row_major[i * cols + j] != 0.0) row.push_back({static_cast<std::uint32_t>(j), row_major[i * cols + j]});
        m.append_row(row);
    }
    return m;
}

void SparseMatrix::append_row(std::span<const Entry> entries) {
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].col >= cols_) throw Error(ErrorCode::Shape, "column index out of range");
        if (k > 0 && entries[k].col <= entries[k - 1].col) throw Error(ErrorCode::Shape, "row columns not increasing");
    }
    entries_.insert(entries_.end(), entries.begin(), entries.end());
    row_ptr_.push_back(entries_.size());
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto r = row(i);
    const auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t c) { return e.col < c; });
    return it != r.end() && it->col == j ? it->value : 0.0;
}

std::vector<double> SparseMatrix::dense() const {
    std::vector<double> out(rows() * cols_, 0.0);
    for (std::size_t i = 0; i < rows(); ++i)
        for (const auto& e : row(i)) out[i * cols_ + e.col] = e.value;
    return out;
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
    SparseMatrix m(0, cols_);
    for (auto i : rows) m.append_row(row(i));
    return m;
}

SparseMatrix SparseMatrix::select_columns(std::span<const std::size_t> columns) const {
    std::vector<std::int64_t> remap(cols_, -1);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] >= cols_ || (k > 0 && columns[k] <= columns[k - 1]))
            throw Error(ErrorCode::Shape, "columns must be ascending and in range");
        remap[columns[k]] = static_cast<std::int64_t>(k);
    }
    SparseMatrix m(0, columns.size());
    std::vector<Entry> row_entries;
    for (std::size_t i = 0; i < rows(); ++i) {
        row_entries.clear();
        for (const auto& e : row(i))
            if (remap[e.col] >= 0) row_entries.push_back({static_cast<std::uint32_t>(remap[e.col]), e.value});
        m.append_row(row_entries);
    }
    return m;
}

std::string_view weighting_name(Weighting mode) {
    switch (mode) {
        case Weighting::Binary: return "binary";
        case Weighting::Count: return "count";
        case Weighting::Freq: return "freq";
        case Weighting::Tfidf: return "tfidf";
    }
    return "binary";
}

Weighting parse_weighting(std::string_view name) {
    for (auto mode : {Weighting::Binary, Weighting::Count, Weighting::Freq, Weighting::Tfidf})
        if (weighting_name(mode) == name) return mode;
    throw Error(ErrorCode::Usage, "unknown weighting mode: " + std::string(name));
}

LabelMatrix::LabelMatrix(std::vector<std::size_t> classes, std::vector<std::string> class_names)
    : classes_(std::move(classes)), class_names_(std::move(class_names)) {
    if (!std::is_sorted(class_names_.begin(), class_names_.end()))
        throw Error(ErrorCode::Domain, "class names must be sorted");
    for (auto c : classes_)
        if (c >= class_names_.size()) throw Error(ErrorCode::UnknownLabel, "class index " + std::to_string(c));
}

LabelMatrix LabelMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> picked;
    picked.reserve(rows.size());
    for (auto i : rows) picked.push_back(classes_.at(i));
    return LabelMatrix(std::move(picked), class_names_);
}

std::vector<double> inverse_document_frequency(std::span<const Tokens> documents, const Vocabulary& vocab) {
    std::vector<std::size_t> df(vocab.size(), 0);
    std::vector<std::size_t> last_seen(vocab.size(), SIZE_MAX);
    for (std::size_t d = 0; d < documents.size(); ++d) {
        for (const auto& token : documents[d]) {
            const auto rank = vocab.rank_of(token);
            if (!rank) continue;
            if (last_seen[*rank - 1] != d) {
                last_seen[*rank - 1] = d;
                ++df[*rank - 1];
            }
        }
    }
    const double n = static_cast<double>(documents.size());
    std::vector<double> idf(vocab.size());
    for (std::size_t j = 0; j < vocab.size(); ++j) idf[j] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[j])));
    return idf;
}

DocTermMatrix vectorize(std::span<const Tokens> documents, const Vocabulary& vocab, Weighting mode) {
    if (mode == Weighting::Tfidf) {
        const auto idf = inverse_document_frequency(documents, vocab);
        return vectorize(documents, vocab, mode, idf);
    }
    return vectorize(documents, vocab, mode, {});
}

DocTermMatrix vectorize(std::span<const Tokens> documents, const Vocabulary& vocab, Weighting mode,
                        std::span<const double> idf) {
    if (vocab.empty()) throw Error(ErrorCode::EmptyVocabulary, "cannot vectorize against an empty vocabulary");
    std::vector<std::string> words;
    words.reserve(vocab.size());
    for (const auto& e : vocab.entries()) words.push_back(e.word);
    return vectorize_words(documents, words, mode, idf);
}

DocTermMatrix vectorize_words(std::span<const Tokens> documents, std::span<const std::string> words, Weighting mode,
                              std::span<const double> idf) {
    if (mode == Weighting::Tfidf && idf.size() != words.size())
        throw Error(ErrorCode::Shape, "idf length does not match the feature count");
    std::unordered_map<std::string_view, std::uint32_t> column;
    column.reserve(words.size());
    for (std::size_t j = 0; j < words.size(); ++j) column.emplace(words[j], static_cast<std::uint32_t>(j));

    DocTermMatrix out;
    out.mode = mode;
    out.values = SparseMatrix(0, words.size());
    out.feature_words.assign(words.begin(), words.end());

    std::map<std::uint32_t, double> counts;
    std::vector<SparseMatrix::Entry> row;
    for (const auto& doc : documents) {
        counts.clear();
        double total = 0;
        for (const auto& token : doc) {
            if (const auto it = column.find(token); it != column.end()) {
                counts[it->second] += 1.0;
                total += 1.0;
            }
        }
        row.clear();
        for (const auto& [col, count] : counts) {
            double v = count;
            switch (mode) {
                case Weighting::Binary: v = 1.0; break;
                case Weighting::Count: break;
                case Weighting::Freq: v = count / total; break;
                case Weighting::Tfidf: v = count * idf[col]; break;
            }
            if (v != 0.0) row.push_back({col, v});
        }
        out.values.append_row(row);
    }
    return out;
}

LabelMatrix one_hot(std::span<const std::string> labels, std::span<const std::string> class_names) {
    std::vector<std::string> names(class_names.begin(), class_names.end());
    if (!std::is_sorted(names.begin(), names.end())) throw Error(ErrorCode::Domain, "class names must be sorted");
    std::vector<std::size_t> classes;
    classes.reserve(labels.size());
    for (const auto& label : labels) {
        const auto it = std::lower_bound(names.begin(), names.end(), label);
        if (it == names.end() || *it != label) throw Error(ErrorCode::UnknownLabel, label);
        classes.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    return LabelMatrix(std::move(classes), std::move(names));
}

std::vector<FeatureScore> chi2_scores(const DocTermMatrix& x, const LabelMatrix& y) {
    if (x.rows() != y.rows()) throw Error(ErrorCode::Shape, "feature and label row counts differ");
    if (x.rows() == 0) throw Error(ErrorCode::Shape, "chi-square needs at least one row");
    const std::size_t classes = y.cols();
    const std::size_t features = x.cols();

    // observed[c * features + j] = sum of feature j over rows of class c
    std::vector<double> observed(classes * features, 0.0);
    std::vector<double> class_rows(classes, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto c = y.class_of(i);
        class_rows[c] += 1.0;
        for (const auto& e : x.values.row(i)) {
            if (!(e.value >= 0.0) || !std::isfinite(e.value))
                throw Error(ErrorCode::Domain, "chi-square requires finite nonnegative features");
            observed[c * features + e.col] += e.value;
        }
    }

    const double n = static_cast<double>(x.rows());
    std::vector<FeatureScore> scores(features);
    for (std::size_t j = 0; j < features; ++j) {
        double feature_total = 0.0;
        for (std::size_t c = 0; c < classes; ++c) feature_total += observed[c * features + j];
        double score = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            const double expected = class_rows[c] / n * feature_total;
            if (expected == 0.0) continue;
            const double diff = observed[c * features + j] - expected;
            score += diff * diff / expected;
        }
        scores[j] = {j < x.feature_words.size() ? x.feature_words[j] : std::to_string(j), score};
    }
    return scores;
}

DocTermMatrix select_columns(const DocTermMatrix& x, std::span<const std::size_t> columns) {
    DocTermMatrix out;
    out.mode = x.mode;
    out.values = x.values.select_columns(columns);
    for (auto c : columns) out.feature_words.push_back(x.feature_words.at(c));
    return out;
}

Selection select_k_best(const DocTermMatrix& x, std::span<const FeatureScore> scores, std::size_t k) {
    if (scores.size() != x.cols()) throw Error(ErrorCode::Shape, "score count does not match column count");
    std::vector<std::size_t> order(x.cols());
    std::iota(order.begin(), order.end(), 0);
    if (k < order.size()) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a].score > scores[b].score; });
        order.resize(k);
        std::sort(order.begin(), order.end());
    }
    Selection s;
    s.matrix = select_columns(x, order);
    s.columns = std::move(order);
    return s;
}

std::vector<FeatureScore> best_words_report(std::span<const FeatureScore> scores, std::size_t top_n) {
    std::vector<FeatureScore> out(scores.begin(), scores.end());
    std::sort(out.begin(), out.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.word < b.word;
    });
    if (out.size() > top_n) out.resize(top_n);
    return out;
}

std::string best_words_csv(std::span<const FeatureScore> report) {
    std::string out = "rank,word,score\n";
    for (std::size_t i = 0; i < report.size(); ++i)
        out += std::to_string(i + 1) + "," + csv_field(report[i].word) + "," + format_fixed(report[i].score, 6) + "\n";
    return out;
}

std::string best_words_svg(std::span<const FeatureScore> report) {
    svg::BarChart chart;
    chart.title = "Top words by chi-square score";
    chart.x_label = "Word";
    chart.y_label = "Chi-square score";
    for (const auto& s : report) {
        chart.labels.push_back(s.word);
        chart.values.push_back(s.score);
    }
    return svg::render_bar_chart(chart);
}

}  // namespace mailclass
