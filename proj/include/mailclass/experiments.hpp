#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mailclass/eval.hpp"
#include "mailclass/features.hpp"
#include "mailclass/ingest.hpp"
#include "mailclass/model.hpp"
#include "mailclass/text.hpp"

namespace mailclass {

// ---- synthetic corpus -------------------------------------------------------

struct SyntheticLabel {
    std::string name;
    std::size_t email_count = 1;
    std::vector<std::string> signature_words;
    double signal_strength = 0.3;  // probability that a token is a signature word
};

struct SyntheticSpec {
    std::vector<SyntheticLabel> labels;
    std::size_t shared_vocab_size = 3000;
    std::size_t min_tokens = 30;
    std::size_t max_tokens = 110;
    std::uint64_t seed = 42;

    // Throws SpecError.
    void validate() const;

    // Seven labels sized like the retained labels of the reference Gmail
    // corpus (589 emails), 30 signature words each.
    static SyntheticSpec standard(std::uint64_t seed = 42, double signal_strength = 0.3);
};

// Pseudo-words ending in a vowel; rank 1 is the most frequent under the Zipf draw.
std::vector<std::string> synthetic_shared_vocabulary(std::size_t size);
// Pseudo-words ending in 'n', hence disjoint from the shared vocabulary.
std::vector<std::string> synthetic_signature_words(std::size_t label_index, std::size_t count);

// Each email draws a token count in [min_tokens, max_tokens]; each token is a
// signature word of its label with probability signal_strength, otherwise a
// shared word drawn from a Zipf(1.0) law over shared-vocabulary ranks.
LabeledCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

// ---- pipeline ----------------------------------------------------------------

struct PipelineSettings {
    std::size_t min_label_count = 10;
    std::set<std::string> drop_labels;
    std::size_t num_words = 2000;
    std::optional<std::size_t> select_k;  // defaults to num_words
    Weighting weighting = Weighting::Binary;
    std::size_t hidden_units = 100;
    double train_ratio = 0.9;
    bool stratified = true;
    StopWordList stop_words = StopWordList::english();
};

// Everything fixed across the points of a sweep: filtered corpus, tokens,
// split and the vocabulary fitted on the training rows.
struct PreparedData {
    LabeledCorpus corpus;
    std::vector<Tokens> tokens;
    std::vector<std::size_t> classes;
    Split split;
    Vocabulary vocabulary;
};

PreparedData prepare(const LabeledCorpus& corpus, const PipelineSettings& settings, std::uint64_t seed);

struct PointOutcome {
    EvaluationReport report;
    ModelFile model;
    TrainTrace trace;
    std::vector<FeatureScore> feature_scores;  // chi-square over the truncated vocabulary
    double train_seconds = 0.0;
};

// Truncate -> vectorize -> chi-square select -> train -> evaluate on test rows.
PointOutcome run_point(const PreparedData& data, std::size_t num_words, std::optional<std::size_t> select_k,
                       std::size_t hidden_units, Weighting weighting, const TrainConfig& config);

// ---- sweeps -------------------------------------------------------------------

struct SweepPoint {
    double value = 0.0;
    double accuracy = 0.0;  // mean over repeats
    double accuracy_min = 0.0;
    double accuracy_max = 0.0;
    double train_seconds = 0.0;
    std::size_t epochs_run = 0;
    std::uint64_t split_fingerprint = 0;
    std::uint64_t vocabulary_fingerprint = 0;
};

struct SweepOptions {
    // Training repeats per point with seeds seed, seed + 1, ...; the split stays fixed.
    std::size_t repeats = 1;
    // Wall-clock training time is only written when set; otherwise 0 so that
    // reports are byte-identical across runs.
    bool record_timing = false;
};

struct SweepResult {
    std::string parameter_name;  // "hidden_units" or "num_words"
    std::vector<SweepPoint> points;
    PipelineSettings settings;
    TrainConfig train_config;
    SweepOptions options;
    std::size_t corpus_size = 0;
    std::size_t vocabulary_size = 0;
};

SweepResult sweep_hidden_units(const LabeledCorpus& corpus, std::span<const std::size_t> hidden_units,
                               const PipelineSettings& settings, const TrainConfig& config,
                               const SweepOptions& options = {});
SweepResult sweep_num_words(const LabeledCorpus& corpus, std::span<const std::size_t> word_counts,
                            const PipelineSettings& settings, const TrainConfig& config,
                            const SweepOptions& options = {});

std::string sweep_csv(const SweepResult& result);
std::string sweep_svg(const SweepResult& result);
std::string sweep_json(const SweepResult& result);

// Writes sweep_<parameter_name>.{csv,svg,json} and returns the paths.
std::vector<std::filesystem::path> emit_report(const SweepResult& result, const std::filesystem::path& out_dir);

}  // namespace mailclass
