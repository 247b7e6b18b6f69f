#include "mailclass/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "mailclass/error.hpp"
#include "mailclass/rng.hpp"
#include "mailclass/svg.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

std::uint64_t Split::fingerprint() const {
    std::string bytes;
    for (auto i : train_indices) bytes += std::to_string(i) + ",";
    bytes += "|";
    for (auto i : test_indices) bytes += std::to_string(i) + ",";
    return fnv1a64(bytes);
}

Split train_test_split(std::span<const std::size_t> labels, double train_ratio, std::uint64_t seed, bool stratified) {
    const std::size_t n = labels.size();
    if (n < 2) throw Error(ErrorCode::DegenerateSplit, "need at least two rows to split");
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw Error(ErrorCode::DegenerateSplit, "train_ratio must be in (0, 1)");
    const auto train_size = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_ratio));
    if (train_size == 0 || train_size >= n)
        throw Error(ErrorCode::DegenerateSplit, "ratio " + std::to_string(train_ratio) + " leaves an empty side for n=" +
                                                    std::to_string(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng(seed).shuffle(std::span(order));

    Split split;
    split.seed = seed;
    std::vector<char> in_train(n, 0);

    if (!stratified) {
        for (std::size_t k = 0; k < train_size; ++k) in_train[order[k]] = 1;
    } else {
        const std::size_t classes = *std::max_element(labels.begin(), labels.end()) + 1;
        std::vector<std::vector<std::size_t>> members(classes);
        for (auto i : order) members[labels[i]].push_back(i);
        std::vector<std::size_t> take(classes, 0);
        std::size_t total = 0;
        for (std::size_t c = 0; c < classes; ++c) {
            if (members[c].empty()) continue;
            if (members[c].size() < 2)
                throw Error(ErrorCode::Stratify, "class " + std::to_string(c) +
                                                     " has a single member; use a non-stratified split");
            take[c] = static_cast<std::size_t>(std::ceil(static_cast<double>(members[c].size()) * train_ratio));
            total += take[c];
        }
        std::vector<std::size_t> by_size(classes);
        std::iota(by_size.begin(), by_size.end(), 0);
        std::stable_sort(by_size.begin(), by_size.end(),
                         [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });
        for (std::size_t k = 0; total > train_size && k < by_size.size(); ++k) {
            const auto c = by_size[k];
            if (take[c] == 0) continue;
            --take[c];
            --total;
        }
        for (std::size_t c = 0; c < classes; ++c)
            for (std::size_t k = 0; k < take[c]; ++k) in_train[members[c][k]] = 1;
    }

    for (std::size_t i = 0; i < n; ++i) (in_train[i] ? split.train_indices : split.test_indices).push_back(i);
    if (split.train_indices.empty() || split.test_indices.empty())
        throw Error(ErrorCode::DegenerateSplit, "split produced an empty side");
    return split;
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::string> class_names)
    : classes_(classes), class_names_(std::move(class_names)), counts_(classes * classes, 0) {
    if (class_names_.empty())
        for (std::size_t c = 0; c < classes; ++c) class_names_.push_back(std::to_string(c));
    if (class_names_.size() != classes) throw Error(ErrorCode::Shape, "class name count does not match class count");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
    if (truth >= classes_ || predicted >= classes_) throw Error(ErrorCode::Domain, "class index out of range");
    ++counts_[truth * classes_ + predicted];
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t c = 0; c < classes_; ++c) t += at(c, c);
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < classes_; ++p) s += at(truth, p);
    return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
    std::uint64_t s = 0;
    for (std::size_t t = 0; t < classes_; ++t) s += at(t, predicted);
    return s;
}

std::string ConfusionMatrix::to_csv() const {
    std::string out = "true\\pred";
    for (const auto& name : class_names_) out += "," + csv_field(name);
    out += "\n";
    for (std::size_t t = 0; t < classes_; ++t) {
        out += csv_field(class_names_[t]);
        for (std::size_t p = 0; p < classes_; ++p) out += "," + std::to_string(at(t, p));
        out += "\n";
    }
    return out;
}

std::string ConfusionMatrix::to_text() const {
    std::size_t label_width = 9;  // "true\pred"
    for (const auto& name : class_names_) label_width = std::max(label_width, name.size());
    std::vector<std::size_t> widths(classes_);
    for (std::size_t p = 0; p < classes_; ++p) {
        widths[p] = class_names_[p].size();
        for (std::size_t t = 0; t < classes_; ++t) widths[p] = std::max(widths[p], std::to_string(at(t, p)).size());
    }
    auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };
    auto pad_right = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };

    std::string out = pad_right("true\\pred", label_width);
    for (std::size_t p = 0; p < classes_; ++p) out += "  " + pad_left(class_names_[p], widths[p]);
    out += "\n";
    for (std::size_t t = 0; t < classes_; ++t) {
        out += pad_right(class_names_[t], label_width);
        for (std::size_t p = 0; p < classes_; ++p) out += "  " + pad_left(std::to_string(at(t, p)), widths[p]);
        out += "\n";
    }
    return out;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                 std::size_t classes, std::vector<std::string> class_names) {
    if (truth.size() != predicted.size()) throw Error(ErrorCode::Domain, "truth and prediction lengths differ");
    ConfusionMatrix cm(classes, std::move(class_names));
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) throw Error(ErrorCode::DegenerateInput, "accuracy of an empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

EvaluationReport evaluate(const ConfusionMatrix& cm) {
    EvaluationReport report;
    report.accuracy = accuracy(cm);
    report.confusion = cm;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        const auto tp = static_cast<double>(cm.at(c, c));
        const auto predicted = cm.column_sum(c);
        const auto actual = cm.row_sum(c);
        report.precision.push_back(predicted ? tp / static_cast<double>(predicted) : 0.0);
        report.precision_undefined.push_back(predicted == 0);
        report.recall.push_back(actual ? tp / static_cast<double>(actual) : 0.0);
        report.recall_undefined.push_back(actual == 0);
    }
    return report;
}

std::string EvaluationReport::to_json() const {
    nlohmann::ordered_json j;
    j["accuracy"] = accuracy;
    j["test_rows"] = confusion.total();
    j["class_names"] = confusion.class_names();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < confusion.classes(); ++t) {
        std::vector<std::uint64_t> row;
        for (std::size_t p = 0; p < confusion.classes(); ++p) row.push_back(confusion.at(t, p));
        rows.push_back(row);
    }
    j["confusion"] = rows;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < confusion.classes(); ++c) {
        per_class.push_back({{"label", confusion.class_names()[c]},
                             {"support", confusion.row_sum(c)},
                             {"precision", precision[c]},
                             {"precision_undefined", static_cast<bool>(precision_undefined[c])},
                             {"recall", recall[c]},
                             {"recall_undefined", static_cast<bool>(recall_undefined[c])}});
    }
    j["per_class"] = per_class;
    return j.dump(2) + "\n";
}

int heatmap_grey_level(const ConfusionMatrix& cm, std::size_t truth, std::size_t predicted) {
    std::uint64_t row_max = 0;
    for (std::size_t p = 0; p < cm.classes(); ++p) row_max = std::max(row_max, cm.at(truth, p));
    if (row_max == 0) return 255;
    const double share = static_cast<double>(cm.at(truth, predicted)) / static_cast<double>(row_max);
    return static_cast<int>(std::lround(255.0 * (1.0 - share)));
}

Heatmap render_heatmap(const ConfusionMatrix& cm) {
    constexpr int kSize = 700;
    constexpr double kMargin = 150;
    const std::size_t c = cm.classes();
    const double cell = c ? (kSize - kMargin - 20) / static_cast<double>(c) : 0;

    svg::Document doc(kSize, kSize);
    doc.rect(0, 0, kSize, kSize, "#ffffff", "class=\"background\"");
    doc.text(kMargin + (kSize - kMargin - 20) / 2, 24, "Predicted label", "middle", 14);
    doc.text(20, kMargin + (kSize - kMargin - 20) / 2, "True label", "middle", 14,
             "transform=\"rotate(-90 20 " + svg::num(kMargin + (kSize - kMargin - 20) / 2) + ")\"");
    for (std::size_t t = 0; t < c; ++t) {
        const double y = kMargin + cell * static_cast<double>(t);
        doc.text(kMargin - 6, y + cell / 2 + 4, cm.class_names()[t], "end", 11);
        for (std::size_t p = 0; p < c; ++p) {
            const double x = kMargin + cell * static_cast<double>(p);
            const int grey = heatmap_grey_level(cm, t, p);
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", grey, grey, grey);
            doc.rect(x, y, cell, cell, fill, "class=\"cell\" stroke=\"#999999\"");
            doc.text(x + cell / 2, y + cell / 2 + 4, std::to_string(cm.at(t, p)), "middle", 11,
                     grey < 128 ? "fill=\"#ffffff\"" : "fill=\"#000000\"");
        }
    }
    for (std::size_t p = 0; p < c; ++p) {
        const double x = kMargin + cell * static_cast<double>(p) + cell / 2;
        doc.text(x, kMargin - 8, cm.class_names()[p], "start", 11,
                 "transform=\"rotate(-45 " + svg::num(x) + " " + svg::num(kMargin - 8) + ")\"");
    }
    return {doc.str(), cm.to_text()};
}

}  // namespace mailclass
