#include "mailclass/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "mailclass/error.hpp"
#include "mailclass/rng.hpp"
#include "mailclass/svg.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

namespace {

constexpr std::string_view kConsonants = "bdfgklmprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = 13 * 5;

std::string syllable_word(std::size_t index, std::size_t min_syllables) {
    std::string word;
    std::size_t n = 0;
    do {
        const std::size_t s = index % kSyllables;
        word += kConsonants[s / kVowels.size()];
        word += kVowels[s % kVowels.size()];
        index /= kSyllables;
        ++n;
    } while (index > 0 || n < min_syllables);
    return word;
}

void check_increasing(std::span<const std::size_t> values, const char* what) {
    if (values.empty()) throw Error(ErrorCode::Usage, std::string(what) + " grid is empty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1]) throw Error(ErrorCode::Usage, std::string(what) + " grid must be strictly increasing");
}

std::string format_param(double v) {
    if (v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    return format_fixed(v, 6);
}

template <class Value>
SweepResult run_sweep(const LabeledCorpus& corpus, std::string name, std::span<const std::size_t> grid,
                      const PipelineSettings& settings, const TrainConfig& config, const SweepOptions& options,
                      Value&& point_args) {
    if (options.repeats < 1) throw Error(ErrorCode::Usage, "repeats must be >= 1");
    const auto data = prepare(corpus, settings, config.seed);

    SweepResult result;
    result.parameter_name = std::move(name);
    result.settings = settings;
    result.train_config = config;
    result.options = options;
    result.corpus_size = data.corpus.size();
    result.vocabulary_size = data.vocabulary.size();

    for (const auto value : grid) {
        const auto [num_words, hidden] = point_args(value);
        SweepPoint point;
        point.value = static_cast<double>(value);
        point.split_fingerprint = data.split.fingerprint();
        point.vocabulary_fingerprint = data.vocabulary.fingerprint();
        double sum = 0.0, seconds = 0.0;
        for (std::size_t r = 0; r < options.repeats; ++r) {
            auto cfg = config;
            cfg.seed = config.seed + r;
            const auto outcome = run_point(data, num_words, settings.select_k, hidden, settings.weighting, cfg);
            const double acc = outcome.report.accuracy;
            sum += acc;
            seconds += outcome.train_seconds;
            point.accuracy_min = r == 0 ? acc : std::min(point.accuracy_min, acc);
            point.accuracy_max = r == 0 ? acc : std::max(point.accuracy_max, acc);
            if (r == 0) point.epochs_run = outcome.trace.epochs_run;
        }
        point.accuracy = sum / static_cast<double>(options.repeats);
        point.train_seconds = options.record_timing ? seconds / static_cast<double>(options.repeats) : 0.0;
        result.points.push_back(point);
    }
    return result;
}

}  // namespace

// ---- synthetic corpus -------------------------------------------------------

void SyntheticSpec::validate() const {
    if (labels.empty()) throw Error(ErrorCode::Spec, "synthetic spec has no labels");
    if (shared_vocab_size < 1) throw Error(ErrorCode::Spec, "shared_vocab_size must be >= 1");
    if (min_tokens > max_tokens) throw Error(ErrorCode::Spec, "min_tokens exceeds max_tokens");
    const auto shared = synthetic_shared_vocabulary(shared_vocab_size);
    const std::set<std::string> shared_set(shared.begin(), shared.end());
    std::set<std::string> names;
    for (const auto& label : labels) {
        if (label.name.empty()) throw Error(ErrorCode::Spec, "label name is empty");
        if (!names.insert(label.name).second) throw Error(ErrorCode::Spec, "duplicate label " + label.name);
        if (label.email_count < 1) throw Error(ErrorCode::Spec, label.name + ": email_count must be >= 1");
        if (!(label.signal_strength > 0.0 && label.signal_strength <= 1.0))
            throw Error(ErrorCode::Spec, label.name + ": signal_strength must be in (0, 1]");
        if (label.signature_words.empty()) throw Error(ErrorCode::Spec, label.name + ": no signature words");
        for (const auto& w : label.signature_words)
            if (shared_set.contains(w))
                throw Error(ErrorCode::Spec, label.name + ": signature word \"" + w + "\" is in the shared vocabulary");
    }
}

SyntheticSpec SyntheticSpec::standard(std::uint64_t seed, double signal_strength) {
    static const std::vector<std::pair<std::string, std::size_t>> kLabels{
        {"bvp_", 102}, {"corprova2011", 238}, {"deepak@gmail.com", 73}, {"Inbox", 47},
        {"gupta@live.com", 21}, {"Imagic", 91}, {"Friends", 17}};
    SyntheticSpec spec;
    spec.seed = seed;
    for (std::size_t i = 0; i < kLabels.size(); ++i)
        spec.labels.push_back({kLabels[i].first, kLabels[i].second, synthetic_signature_words(i, 30), signal_strength});
    return spec;
}

std::vector<std::string> synthetic_shared_vocabulary(std::size_t size) {
    const auto& stop = StopWordList::english();
    std::vector<std::string> words;
    words.reserve(size);
    for (std::size_t i = 0; words.size() < size; ++i) {
        auto w = syllable_word(i, 2);
        if (!stop.contains(w)) words.push_back(std::move(w));
    }
    return words;
}

std::vector<std::string> synthetic_signature_words(std::size_t label_index, std::size_t count) {
    std::vector<std::string> words;
    words.reserve(count);
    for (std::size_t j = 0; j < count; ++j) words.push_back(syllable_word(kSyllables * kSyllables + label_index * 1000 + j, 3) + "n");
    return words;
}

LabeledCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
    spec.validate();
    const auto shared = synthetic_shared_vocabulary(spec.shared_vocab_size);
    std::vector<double> cumulative(shared.size());
    double total = 0.0;
    for (std::size_t r = 0; r < shared.size(); ++r) {
        total += 1.0 / static_cast<double>(r + 1);
        cumulative[r] = total;
    }

    Rng rng(spec.seed);
    std::vector<EmailDocument> docs;
    for (const auto& label : spec.labels) {
        for (std::size_t e = 0; e < label.email_count; ++e) {
            const std::size_t tokens = spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);
            std::string text;
            for (std::size_t t = 0; t < tokens; ++t) {
                if (t) text += ' ';
                if (rng.uniform() < label.signal_strength) {
                    text += label.signature_words[rng.below(label.signature_words.size())];
                } else {
                    const double u = rng.uniform() * total;
                    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
                    if (it == cumulative.end()) --it;
                    text += shared[static_cast<std::size_t>(it - cumulative.begin())];
                }
            }
            docs.push_back({"synthetic:" + label.name + ":" + std::to_string(e), std::move(text), label.name});
        }
    }
    return LabeledCorpus(std::move(docs));
}

// ---- pipeline ----------------------------------------------------------------

PreparedData prepare(const LabeledCorpus& corpus, const PipelineSettings& settings, std::uint64_t seed) {
    PreparedData data;
    data.corpus = filter_labels(corpus, settings.min_label_count, settings.drop_labels);
    data.tokens.reserve(data.corpus.size());
    for (const auto& doc : data.corpus.documents()) data.tokens.push_back(tokenize(doc.text, settings.stop_words));
    data.classes = data.corpus.label_indices();
    data.split = train_test_split(data.classes, settings.train_ratio, seed, settings.stratified);

    std::vector<Tokens> train_tokens;
    for (auto i : data.split.train_indices) train_tokens.push_back(data.tokens[i]);
    data.vocabulary = build_vocabulary(train_tokens);
    return data;
}

PointOutcome run_point(const PreparedData& data, std::size_t num_words, std::optional<std::size_t> select_k,
                       std::size_t hidden_units, Weighting weighting, const TrainConfig& config) {
    const auto vocab = truncate(data.vocabulary, num_words);
    const std::size_t k = select_k.value_or(num_words);
    if (k < 1) throw Error(ErrorCode::Usage, "select_k must be >= 1");

    std::vector<Tokens> train_tokens, test_tokens;
    std::vector<std::size_t> train_classes, test_classes;
    for (auto i : data.split.train_indices) {
        train_tokens.push_back(data.tokens[i]);
        train_classes.push_back(data.classes[i]);
    }
    for (auto i : data.split.test_indices) {
        test_tokens.push_back(data.tokens[i]);
        test_classes.push_back(data.classes[i]);
    }

    std::vector<double> idf;
    if (weighting == Weighting::Tfidf) idf = inverse_document_frequency(train_tokens, vocab);
    const auto train_counts = vectorize(train_tokens, vocab, Weighting::Count);
    const auto train_x = weighting == Weighting::Count ? train_counts : vectorize(train_tokens, vocab, weighting, idf);
    const auto test_x = vectorize(test_tokens, vocab, weighting, idf);
    const LabelMatrix train_y(train_classes, data.corpus.labels());

    PointOutcome outcome;
    outcome.feature_scores = chi2_scores(train_counts, train_y);
    const auto selection = select_k_best(train_x, outcome.feature_scores, k);
    const auto test_selected = select_columns(test_x, selection.columns);

    const LayerSpec spec{selection.matrix.cols(), hidden_units, data.corpus.labels().size()};
    const auto start = std::chrono::steady_clock::now();
    auto trained = train(selection.matrix, train_y, spec, config);
    outcome.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto predicted = predict(trained.params, test_selected.values);
    outcome.report = evaluate(confusion_matrix(test_classes, predicted, spec.output_dim, data.corpus.labels()));
    outcome.trace = std::move(trained.trace);

    auto& model = outcome.model;
    model.spec = spec;
    model.class_names = data.corpus.labels();
    model.feature_words = selection.matrix.feature_words;
    model.weighting = weighting;
    if (weighting == Weighting::Tfidf)
        for (auto c : selection.columns) model.idf.push_back(idf[c]);
    model.params = std::move(trained.params);
    return outcome;
}

// ---- sweeps -------------------------------------------------------------------

SweepResult sweep_hidden_units(const LabeledCorpus& corpus, std::span<const std::size_t> hidden_units,
                               const PipelineSettings& settings, const TrainConfig& config,
                               const SweepOptions& options) {
    check_increasing(hidden_units, "hidden_units");
    return run_sweep(corpus, "hidden_units", hidden_units, settings, config, options, [&](std::size_t hn) {
        return std::pair<std::size_t, std::size_t>{settings.num_words, hn};
    });
}

SweepResult sweep_num_words(const LabeledCorpus& corpus, std::span<const std::size_t> word_counts,
                            const PipelineSettings& settings, const TrainConfig& config, const SweepOptions& options) {
    check_increasing(word_counts, "num_words");
    if (word_counts.front() < 1) throw Error(ErrorCode::Usage, "num_words values must be >= 1");
    return run_sweep(corpus, "num_words", word_counts, settings, config, options, [&](std::size_t words) {
        return std::pair<std::size_t, std::size_t>{words, settings.hidden_units};
    });
}

std::string sweep_csv(const SweepResult& result) {
    const bool ranges = result.options.repeats > 1;
    std::string out = "param,accuracy,train_seconds,epochs_run";
    if (ranges) out += ",accuracy_min,accuracy_max";
    out += "\n";
    for (const auto& p : result.points) {
        out += format_param(p.value) + "," + format_fixed(p.accuracy, 6) + "," + format_fixed(p.train_seconds, 3) + "," +
               std::to_string(p.epochs_run);
        if (ranges) out += "," + format_fixed(p.accuracy_min, 6) + "," + format_fixed(p.accuracy_max, 6);
        out += "\n";
    }
    return out;
}

std::string sweep_svg(const SweepResult& result) {
    svg::LineChart chart;
    const bool hidden = result.parameter_name == "hidden_units";
    chart.title = hidden ? "Test accuracy vs hidden units" : "Test accuracy vs number of words";
    chart.x_label = hidden ? "Hidden units" : "Number of words";
    chart.y_label = "Test accuracy";
    for (const auto& p : result.points) {
        chart.xs.push_back(p.value);
        chart.ys.push_back(p.accuracy);
    }
    if (!chart.xs.empty() && chart.xs.front() > 0 && chart.xs.back() / chart.xs.front() >= 100) chart.log_x = true;
    return svg::render_line_chart(chart);
}

std::string sweep_json(const SweepResult& result) {
    using ojson = nlohmann::ordered_json;
    ojson j;
    j["parameter_name"] = result.parameter_name;
    ojson points = ojson::array();
    for (const auto& p : result.points) {
        points.push_back({{"value", p.value},
                          {"accuracy", p.accuracy},
                          {"accuracy_min", p.accuracy_min},
                          {"accuracy_max", p.accuracy_max},
                          {"train_seconds", p.train_seconds},
                          {"epochs_run", p.epochs_run},
                          {"split_fingerprint", hex64(p.split_fingerprint)},
                          {"vocabulary_fingerprint", hex64(p.vocabulary_fingerprint)}});
    }
    j["points"] = points;

    const auto& s = result.settings;
    const auto& c = result.train_config;
    std::vector<std::string> dropped(s.drop_labels.begin(), s.drop_labels.end());
    j["fixed_config"] = {
        {"corpus_size", result.corpus_size},
        {"vocabulary_size", result.vocabulary_size},
        {"min_label_count", s.min_label_count},
        {"drop_labels", dropped},
        {"num_words", s.num_words},
        {"select_k", s.select_k ? ojson(*s.select_k) : ojson(nullptr)},
        {"weighting", std::string(weighting_name(s.weighting))},
        {"hidden_units", s.hidden_units},
        {"train_ratio", s.train_ratio},
        {"stratified", s.stratified},
        {"stop_word_count", s.stop_words.size()},
        {"learning_rate", c.learning_rate},
        {"batch_size", c.batch_size},
        {"max_epochs", c.max_epochs},
        {"loss", std::string(loss_kind_name(c.loss_kind))},
        {"early_stop_min_delta", c.early_stop_min_delta},
        {"early_stop_patience", c.early_stop_patience},
        {"validation_fraction", c.validation_fraction},
        {"seed", c.seed},
        {"repeats", result.options.repeats},
        {"record_timing", result.options.record_timing},
    };
    // Accuracies published for the original private Gmail corpus, kept for
    // side-by-side comparison. Not expected to be reproduced.
    if (result.parameter_name == "hidden_units") {
        j["reference_accuracy"] = ojson::array({ojson{{"value", 1}, {"accuracy", 0.33}},
                                                ojson{{"value", 100}, {"accuracy", 0.85}},
                                                ojson{{"value", 1500}, {"accuracy", 0.90}}});
    } else {
        j["reference_accuracy"] = ojson::array({ojson{{"value", 5500}, {"hidden_units", 100}, {"accuracy", 0.8167}},
                                                ojson{{"value", 12000}, {"hidden_units", 100}, {"accuracy", 0.8833}}});
    }
    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_report(const SweepResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());
    const std::string stem = "sweep_" + result.parameter_name;
    std::vector<std::filesystem::path> paths{out_dir / (stem + ".csv"), out_dir / (stem + ".svg"),
                                             out_dir / (stem + ".json")};
    write_file(paths[0], sweep_csv(result));
    write_file(paths[1], sweep_svg(result));
    write_file(paths[2], sweep_json(result));
    return paths;
}

}  // namespace mailclass
