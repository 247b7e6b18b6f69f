#include "mailclass/app.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "mailclass/error.hpp"
#include "mailclass/mime.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

namespace fs = std::filesystem;

namespace {

std::size_t parse_size(std::string_view key, std::string_view value) {
    value = trim(value);
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw Error(ErrorCode::Usage, std::string(key) + ": expected a nonnegative integer, got \"" + std::string(value) + "\"");
    return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
    value = trim(value);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw Error(ErrorCode::Usage, std::string(key) + ": expected an unsigned integer, got \"" + std::string(value) + "\"");
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    const std::string s(trim(value));
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(out))
        throw Error(ErrorCode::Usage, std::string(key) + ": expected a number, got \"" + s + "\"");
    return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
    const auto v = to_lower_ascii(trim(value));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::Usage, std::string(key) + ": expected true or false, got \"" + v + "\"");
}

std::string show_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

template <class Field>
ConfigKey size_key(std::string name, std::string help, Field field) {
    return {name, std::move(help), [field](const RunConfig& c) { return std::to_string(c.*field); },
            [field, name](RunConfig& c, std::string_view v) { c.*field = parse_size(name, v); }};
}

template <class Field>
ConfigKey real_key(std::string name, std::string help, Field field) {
    return {name, std::move(help), [field](const RunConfig& c) { return show_real(c.*field); },
            [field, name](RunConfig& c, std::string_view v) { c.*field = parse_real(name, v); }};
}

template <class Field>
ConfigKey text_key(std::string name, std::string help, Field field) {
    return {name, std::move(help), [field](const RunConfig& c) { return c.*field; },
            [field](RunConfig& c, std::string_view v) { c.*field = std::string(trim(v)); }};
}

// Text value that must parse before it is stored.
template <class Field, class Check>
ConfigKey choice_key(std::string name, std::string help, Field field, Check check) {
    return {name, std::move(help), [field](const RunConfig& c) { return c.*field; },
            [field, check](RunConfig& c, std::string_view v) {
                const auto value = std::string(trim(v));
                check(value);
                c.*field = value;
            }};
}

template <class Field>
ConfigKey flag_key(std::string name, std::string help, Field field) {
    return {name, std::move(help), [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); },
            [field, name](RunConfig& c, std::string_view v) { c.*field = parse_flag(name, v); }};
}

std::set<std::string> split_labels(std::string_view text) {
    std::set<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        const auto label = trim(text.substr(pos, comma - pos));
        if (!label.empty()) out.emplace(label);
        pos = comma + 1;
    }
    return out;
}

bool looks_like_message(std::string_view input) {
    const auto line = input.substr(0, input.find('\n'));
    if (line.starts_with("From ")) return true;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    for (char c : line.substr(0, colon))
        if (c <= ' ' || c > '~') return false;
    return true;
}

std::string percent(double v) { return format_fixed(100.0 * v, 2) + "%"; }

}  // namespace

PipelineSettings RunConfig::pipeline_settings() const {
    PipelineSettings s;
    if (min_label_count < 1) throw Error(ErrorCode::Usage, "min_label_count must be >= 1");
    if (num_words < 1) throw Error(ErrorCode::Usage, "num_words must be >= 1");
    if (hidden_units < 1) throw Error(ErrorCode::Usage, "hidden_units must be >= 1");
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw Error(ErrorCode::Usage, "train_ratio must be in (0, 1)");
    s.min_label_count = min_label_count;
    s.drop_labels = split_labels(drop_labels);
    s.num_words = num_words;
    if (select_k > 0) s.select_k = select_k;
    s.weighting = parse_weighting(weighting);
    s.hidden_units = hidden_units;
    s.train_ratio = train_ratio;
    s.stratified = stratified;
    if (!stop_words.empty()) s.stop_words = StopWordList::load(stop_words);
    return s;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig c;
    c.learning_rate = learning_rate;
    c.batch_size = batch_size;
    c.max_epochs = max_epochs;
    c.loss_kind = parse_loss_kind(loss);
    c.early_stop_min_delta = early_stop_min_delta;
    c.early_stop_patience = early_stop_patience;
    c.validation_fraction = validation_fraction;
    c.seed = seed;
    c.validate();
    return c;
}

const std::vector<ConfigKey>& config_keys() {
    using C = RunConfig;
    static const std::vector<ConfigKey> keys{
        text_key("corpus", "corpus source: 'synthetic', an mbox file, a CSV file (text,label) or a label directory", &C::corpus),
        text_key("stop_words", "stop-word file, one word per line (empty: bundled English list)", &C::stop_words),
        size_key("min_label_count", "drop labels with fewer emails than this", &C::min_label_count),
        text_key("drop_labels", "comma-separated labels to remove", &C::drop_labels),
        size_key("num_words", "vocabulary size after frequency ranking", &C::num_words),
        size_key("select_k", "features kept by chi-square selection (0: num_words)", &C::select_k),
        choice_key("weighting", "feature weighting: binary, count, freq or tfidf", &C::weighting,
                   [](std::string_view v) { parse_weighting(v); }),
        size_key("hidden_units", "hidden units in the network", &C::hidden_units),
        real_key("learning_rate", "gradient descent step size", &C::learning_rate),
        size_key("batch_size", "mini-batch size", &C::batch_size),
        size_key("max_epochs", "maximum training epochs", &C::max_epochs),
        choice_key("loss", "training loss: cross_entropy or mse", &C::loss,
                   [](std::string_view v) { parse_loss_kind(v); }),
        real_key("early_stop_min_delta", "minimum validation MSE improvement", &C::early_stop_min_delta),
        size_key("early_stop_patience", "epochs without improvement before stopping", &C::early_stop_patience),
        real_key("validation_fraction", "share of training rows held out for early stopping", &C::validation_fraction),
        real_key("train_ratio", "share of emails used for training", &C::train_ratio),
        flag_key("stratified", "stratify the train/test split by label", &C::stratified),
        text_key("out_dir", "directory for output files", &C::out_dir),
        ConfigKey{"seed", "random seed for corpus generation, split and training",
                  [](const C& c) { return std::to_string(c.seed); },
                  [](C& c, std::string_view v) { c.seed = parse_u64("seed", v); }},
        real_key("signal_strength", "synthetic corpus: probability a token is a label signature word", &C::signal_strength),
        size_key("repeats", "sweep: training repeats per grid point", &C::repeats),
        flag_key("record_timing", "sweep: write wall-clock training seconds into reports", &C::record_timing),
        size_key("top_words", "stats: rows in the best-words report", &C::top_words),
    };
    return keys;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
    for (const auto& k : config_keys()) {
        if (k.name == key) {
            k.set(config, value);
            return;
        }
    }
    throw Error(ErrorCode::Usage, "unknown config key: " + std::string(key));
}

void apply_config_text(RunConfig& config, std::string_view text) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::Usage, "config line " + std::to_string(line_no) + ": expected key = value");
        set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

LabeledCorpus load_configured_corpus(const RunConfig& config, std::ostream& log) {
    if (config.corpus == "synthetic") {
        return generate_synthetic_corpus(SyntheticSpec::standard(config.seed, config.signal_strength));
    }
    auto loaded = load_corpus(CorpusSource::detect(config.corpus));
    for (const auto& w : loaded.warnings) log << "warning: " << w << "\n";
    if (loaded.skipped_unlabeled) log << "skipped " << loaded.skipped_unlabeled << " emails without a usable label\n";
    if (loaded.skipped_files) log << "skipped " << loaded.skipped_files << " files that are not .eml or .txt\n";
    return std::move(loaded.corpus);
}

LabelStats cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const auto settings = config.pipeline_settings();
    const auto corpus = load_configured_corpus(config, log);
    const auto stats = corpus_stats(corpus, settings.stop_words);

    out << "Label email breakdown:\n";
    for (const auto& [label, count] : stats.per_label_email_count) out << "\t" << label << ":" << count << "\n";
    out << "Total emails: " << stats.total_emails << "\n";
    out << "Label word breakdown:\n";
    for (const auto& [label, count] : stats.per_label_word_count) out << "\t" << label << ":" << count << "\n";
    out << "Total word count: " << stats.total_words << "\n";

    const fs::path dir = config.out_dir;
    fs::create_directories(dir);
    write_file(dir / "label_stats.csv", stats.to_csv());

    std::vector<Tokens> tokens;
    for (const auto& doc : corpus.documents()) tokens.push_back(tokenize(doc.text, settings.stop_words));
    try {
        const auto vocab = truncate(build_vocabulary(tokens), settings.num_words);
        write_file(dir / "vocabulary.csv", vocab.to_csv());
        std::vector<std::string> labels;
        for (const auto& d : corpus.documents()) labels.push_back(d.label);
        const auto y = one_hot(labels, corpus.labels());
        const auto scores = chi2_scores(vectorize(tokens, vocab, Weighting::Count), y);
        const auto report = best_words_report(scores, config.top_words);
        write_file(dir / "best_words.csv", best_words_csv(report));
        write_file(dir / "best_words.svg", best_words_svg(report));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyVocabulary) throw;
        log << "warning: corpus has no tokens; vocabulary and best-words reports skipped\n";
    }
    log << "wrote " << (dir / "label_stats.csv").string() << "\n";
    return stats;
}

TrainSummary cmd_train(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const auto settings = config.pipeline_settings();
    const auto train_cfg = config.train_config();
    const auto corpus = load_configured_corpus(config, log);
    const auto data = prepare(corpus, settings, train_cfg.seed);
    log << "corpus: " << data.corpus.size() << " emails, " << data.corpus.labels().size() << " labels; train "
        << data.split.train_indices.size() << ", test " << data.split.test_indices.size() << "; vocabulary "
        << data.vocabulary.size() << " words\n";

    auto outcome = run_point(data, settings.num_words, settings.select_k, settings.hidden_units, settings.weighting,
                             train_cfg);
    for (const auto& w : outcome.trace.warnings) log << "warning: " << w << "\n";
    log << "trained " << outcome.trace.epochs_run << " epochs" << (outcome.trace.stopped_early ? " (early stop)" : "")
        << ", best epoch " << outcome.trace.best_epoch << "\n";

    const fs::path dir = config.out_dir;
    fs::create_directories(dir);
    TrainSummary summary;
    summary.files = {dir / "model.json", dir / "report.json", dir / "confusion.csv", dir / "confusion.svg",
                     dir / "trace.csv"};
    save_model(outcome.model, summary.files[0]);
    write_file(summary.files[1], outcome.report.to_json());
    write_file(summary.files[2], outcome.report.confusion.to_csv());
    const auto heatmap = render_heatmap(outcome.report.confusion);
    write_file(summary.files[3], heatmap.svg);
    write_file(summary.files[4], outcome.trace.to_csv());

    out << "Test accuracy: " << format_fixed(outcome.report.accuracy, 6) << " ("
        << outcome.report.confusion.trace() << "/" << outcome.report.confusion.total() << ")\n";
    out << heatmap.text;
    summary.report = std::move(outcome.report);
    summary.trace = std::move(outcome.trace);
    return summary;
}

Prediction cmd_predict(const fs::path& model_path, std::string_view input, std::ostream& out, std::ostream& log) {
    const auto model = load_model(model_path);
    std::string text;
    std::vector<std::string> warnings;
    if (looks_like_message(input)) {
        const auto email = parse_eml(input);
        warnings = email.warnings;
        text = extract_text(email, warnings);
    } else {
        text = decode_charset(input, "utf-8", warnings);
    }
    for (const auto& w : warnings) log << "warning: " << w << "\n";

    const std::vector<Tokens> docs{tokenize(text, StopWordList{})};
    const auto x = featurize(model, docs);
    Prediction p;
    p.no_known_words = x.nonzeros() == 0;
    if (p.no_known_words) log << "warning: input contains no known feature words\n";
    const auto pass = forward(model.params, x);
    const auto probs = pass.probabilities.row(0);
    p.probabilities.assign(probs.begin(), probs.end());
    p.class_index = argmax(probs);
    p.class_names = model.class_names;
    p.label = model.class_names[p.class_index];

    out << "label: " << p.label << "\n";
    for (std::size_t c = 0; c < p.class_names.size(); ++c)
        out << p.class_names[c] << ": " << format_fixed(p.probabilities[c], 4) << "\n";
    return p;
}

std::vector<std::size_t> default_sweep_grid(SweepKind which) {
    if (which == SweepKind::HiddenUnits) return {1, 5, 10, 50, 100, 500, 1000, 1500, 2000};
    return {100, 500, 1000, 2000, 5500, 12000};
}

std::vector<std::size_t> parse_grid(std::string_view text) {
    std::vector<std::size_t> grid;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        const auto item = trim(text.substr(pos, comma - pos));
        const auto v = parse_size("grid", item);
        if (v < 1) throw Error(ErrorCode::Usage, "grid values must be positive");
        grid.push_back(v);
        pos = comma + 1;
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw Error(ErrorCode::Usage, "grid values must be strictly increasing");
    return grid;
}

SweepResult cmd_sweep(const RunConfig& config, SweepKind which, const std::vector<std::size_t>& grid,
                      std::ostream& out, std::ostream& log) {
    const auto settings = config.pipeline_settings();
    const auto train_cfg = config.train_config();
    const auto corpus = load_configured_corpus(config, log);
    SweepOptions options;
    options.repeats = config.repeats;
    options.record_timing = config.record_timing;

    const auto result = which == SweepKind::HiddenUnits
                            ? sweep_hidden_units(corpus, grid, settings, train_cfg, options)
                            : sweep_num_words(corpus, grid, settings, train_cfg, options);

    if (which == SweepKind::NumWords) {
        out << "Number of Words | Hidden Layers | Accuracy\n";
        for (const auto& p : result.points)
            out << static_cast<std::size_t>(p.value) << " | " << settings.hidden_units << " | " << percent(p.accuracy)
                << "\n";
    } else {
        out << "Hidden Layers | Number of Words | Accuracy\n";
        for (const auto& p : result.points)
            out << static_cast<std::size_t>(p.value) << " | " << settings.num_words << " | " << percent(p.accuracy)
                << "\n";
    }
    for (const auto& path : emit_report(result, config.out_dir)) log << "wrote " << path.string() << "\n";
    return result;
}

std::size_t cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const auto corpus = generate_synthetic_corpus(SyntheticSpec::standard(config.seed, config.signal_strength));
    const fs::path root = config.out_dir;
    std::map<std::string, std::size_t> next;
    for (const auto& doc : corpus.documents()) {
        const auto dir = root / doc.label;
        fs::create_directories(dir);
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.txt", ++next[doc.label]);
        write_file(dir / name, doc.text + "\n");
    }
    out << "wrote " << corpus.size() << " emails in " << corpus.labels().size() << " label directories under "
        << root.string() << "\n";
    log << "seed " << config.seed << ", signal_strength " << config.signal_strength << "\n";
    return corpus.size();
}

}  // namespace mailclass
