#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mailclass/experiments.hpp"

namespace mailclass {

// Flat run configuration. Keys are the snake_case field names; values come
// from defaults, then a "key = value" config file, then command-line flags.
struct RunConfig {
    std::string corpus = "synthetic";  // "synthetic", an mbox file, a CSV file or a label directory
    std::string stop_words;            // empty: bundled English list
    std::size_t min_label_count = 10;
    std::string drop_labels;           // comma-separated
    std::size_t num_words = 2000;
    std::size_t select_k = 0;          // 0: same as num_words
    std::string weighting = "binary";
    std::size_t hidden_units = 100;
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 50;
    std::string loss = "cross_entropy";
    double early_stop_min_delta = 1e-4;
    std::size_t early_stop_patience = 3;
    double validation_fraction = 0.1;
    double train_ratio = 0.9;
    bool stratified = true;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    double signal_strength = 0.3;      // synthetic corpus only
    std::size_t repeats = 1;           // sweep repeats per point
    bool record_timing = false;        // write wall-clock seconds into sweep reports
    std::size_t top_words = 30;        // rows in the best-words report

    PipelineSettings pipeline_settings() const;
    TrainConfig train_config() const;
};

struct ConfigKey {
    std::string name;
    std::string help;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;  // throws UsageError on bad values
};

const std::vector<ConfigKey>& config_keys();
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
// "key = value" lines, '#' comments. Unknown keys are rejected.
void apply_config_text(RunConfig& config, std::string_view text);

LabeledCorpus load_configured_corpus(const RunConfig& config, std::ostream& log);

LabelStats cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& log);

struct TrainSummary {
    EvaluationReport report;
    TrainTrace trace;
    std::vector<std::filesystem::path> files;  // model, report, confusion csv/svg, trace
};
TrainSummary cmd_train(const RunConfig& config, std::ostream& out, std::ostream& log);

struct Prediction {
    std::string label;
    std::size_t class_index = 0;
    std::vector<std::string> class_names;
    std::vector<double> probabilities;
    bool no_known_words = false;
};
// `input` is either an RFC 5322 message or plain text.
Prediction cmd_predict(const std::filesystem::path& model_path, std::string_view input, std::ostream& out,
                       std::ostream& log);

enum class SweepKind { HiddenUnits, NumWords };
SweepResult cmd_sweep(const RunConfig& config, SweepKind which, const std::vector<std::size_t>& grid,
                      std::ostream& out, std::ostream& log);
std::vector<std::size_t> default_sweep_grid(SweepKind which);
// Comma-separated positive integers; throws UsageError.
std::vector<std::size_t> parse_grid(std::string_view text);

// Writes the synthetic corpus under out_dir as <label>/<n>.txt; returns the number of files.
std::size_t cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace mailclass
