#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mailclass {

struct Split {
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
    std::uint64_t seed = 0;

    std::uint64_t fingerprint() const;
};

// Train size is ceil(n * train_ratio). Stratified mode takes
// ceil(count_c * train_ratio) per class, then removes one training row from
// classes in descending size order (ties: lower class index) until the overall
// size is met.
Split train_test_split(std::span<const std::size_t> labels, double train_ratio, std::uint64_t seed, bool stratified);

class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    ConfusionMatrix(std::size_t classes, std::vector<std::string> class_names);

    std::size_t classes() const { return classes_; }
    const std::vector<std::string>& class_names() const { return class_names_; }
    // rows = true class, columns = predicted class
    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * classes_ + predicted]; }
    void add(std::size_t truth, std::size_t predicted);

    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t column_sum(std::size_t predicted) const;

    // Header "true\pred,<classes...>", then one row per true class.
    std::string to_csv() const;
    // Integer grid with row and column headers.
    std::string to_text() const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t classes_ = 0;
    std::vector<std::string> class_names_;
    std::vector<std::uint64_t> counts_;
};

// Throws DomainError on unequal lengths or out-of-range indices. Class names
// default to "0".."C-1" when not given.
ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                 std::size_t classes, std::vector<std::string> class_names = {});

// trace / total; throws DegenerateInput when total is zero.
double accuracy(const ConfusionMatrix& cm);

struct EvaluationReport {
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    std::vector<double> precision;
    std::vector<double> recall;
    // Set where the ratio had a zero denominator and 0 was reported.
    std::vector<bool> precision_undefined;
    std::vector<bool> recall_undefined;

    std::string to_json() const;
};

EvaluationReport evaluate(const ConfusionMatrix& cm);

// Cell shade for a count: grey level in [0, 255], 255 = lightest. Shading is
// count / row maximum so small classes stay visible.
int heatmap_grey_level(const ConfusionMatrix& cm, std::size_t truth, std::size_t predicted);

struct Heatmap {
    std::string svg;   // 700x700
    std::string text;  // plain integer grid
};
Heatmap render_heatmap(const ConfusionMatrix& cm);

}  // namespace mailclass
