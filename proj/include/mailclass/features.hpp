#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mailclass/text.hpp"

namespace mailclass {

// Compressed sparse rows. Column indices within a row are strictly increasing.
class SparseMatrix {
public:
    struct Entry {
        std::uint32_t col;
        double value;
    };

    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols);
    static SparseMatrix from_dense(std::size_t rows, std::size_t cols, std::span<const double> row_major);

    // Rows are appended in order; entries must have increasing columns.
    void append_row(std::span<const Entry> entries);

    std::size_t rows() const { return row_ptr_.size() - 1; }
    std::size_t cols() const { return cols_; }
    std::size_t nonzeros() const { return entries_.size(); }

    std::span<const Entry> row(std::size_t i) const {
        return {entries_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    double at(std::size_t i, std::size_t j) const;
    std::vector<double> dense() const;

    SparseMatrix select_rows(std::span<const std::size_t> rows) const;
    // Keeps the listed columns (ascending) and renumbers them 0..k-1.
    SparseMatrix select_columns(std::span<const std::size_t> columns) const;

    bool operator==(const SparseMatrix&) const = default;

private:
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<Entry> entries_;

    friend bool operator==(const Entry& a, const Entry& b) { return a.col == b.col && a.value == b.value; }
};

enum class Weighting { Binary, Count, Freq, Tfidf };

std::string_view weighting_name(Weighting mode);
Weighting parse_weighting(std::string_view name);

struct DocTermMatrix {
    SparseMatrix values;
    Weighting mode = Weighting::Binary;
    std::vector<std::string> feature_words;  // column j <-> feature_words[j]

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
};

// One-hot labels stored as class indices.
class LabelMatrix {
public:
    LabelMatrix() = default;
    LabelMatrix(std::vector<std::size_t> classes, std::vector<std::string> class_names);

    std::size_t rows() const { return classes_.size(); }
    std::size_t cols() const { return class_names_.size(); }
    double at(std::size_t i, std::size_t c) const { return classes_[i] == c ? 1.0 : 0.0; }
    std::size_t class_of(std::size_t i) const { return classes_[i]; }
    const std::vector<std::size_t>& classes() const { return classes_; }
    const std::vector<std::string>& class_names() const { return class_names_; }

    LabelMatrix select_rows(std::span<const std::size_t> rows) const;

private:
    std::vector<std::size_t> classes_;
    std::vector<std::string> class_names_;
};

struct FeatureScore {
    std::string word;
    double score = 0.0;
};

// ln((1 + N) / (1 + df)) per vocabulary rank, computed over `documents`.
std::vector<double> inverse_document_frequency(std::span<const Tokens> documents, const Vocabulary& vocab);

// Column j holds the word of rank j + 1. For tfidf the idf is computed from
// the same documents.
DocTermMatrix vectorize(std::span<const Tokens> documents, const Vocabulary& vocab, Weighting mode);
// tfidf with idf fitted elsewhere (e.g. on training rows); `idf` is ignored
// for the other modes.
DocTermMatrix vectorize(std::span<const Tokens> documents, const Vocabulary& vocab, Weighting mode,
                        std::span<const double> idf);

// Same weighting rules against an explicit word list (column j <-> words[j]).
DocTermMatrix vectorize_words(std::span<const Tokens> documents, std::span<const std::string> words, Weighting mode,
                              std::span<const double> idf);

// class_names must be sorted; throws UnknownLabel for labels outside it.
LabelMatrix one_hot(std::span<const std::string> labels, std::span<const std::string> class_names);

// One-way observed vs expected statistic per feature over class-conditional
// feature mass. Classes with zero expected mass contribute nothing.
std::vector<FeatureScore> chi2_scores(const DocTermMatrix& x, const LabelMatrix& y);

struct Selection {
    DocTermMatrix matrix;
    std::vector<std::size_t> columns;  // ascending indices into the input
};

// Keeps the k best-scoring columns (ties: lower column index), in original order.
Selection select_k_best(const DocTermMatrix& x, std::span<const FeatureScore> scores, std::size_t k);
DocTermMatrix select_columns(const DocTermMatrix& x, std::span<const std::size_t> columns);

// Descending score, ties lexicographic, at most top_n rows.
std::vector<FeatureScore> best_words_report(std::span<const FeatureScore> scores, std::size_t top_n);
// "rank,word,score" with six decimals.
std::string best_words_csv(std::span<const FeatureScore> report);
std::string best_words_svg(std::span<const FeatureScore> report);

}  // namespace mailclass
