#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mailclass/features.hpp"

namespace mailclass {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct LayerSpec {
    std::size_t input_dim = 1;
    std::size_t hidden_units = 1;
    std::size_t output_dim = 1;

    void validate() const;
    bool operator==(const LayerSpec&) const = default;
};

// input -> relu hidden layer -> softmax output.
struct MlpParams {
    Matrix w1;               // input_dim x hidden_units
    std::vector<double> b1;  // hidden_units
    Matrix w2;               // hidden_units x output_dim
    std::vector<double> b2;  // output_dim

    static MlpParams zeros(const LayerSpec& spec);
    LayerSpec spec() const { return {w1.rows(), w1.cols(), w2.cols()}; }
    bool all_finite() const;

    bool operator==(const MlpParams&) const = default;
};

// Gradients have the same layout as the parameters.
using Gradients = MlpParams;

enum class LossKind { CrossEntropy, Mse };

std::string_view loss_kind_name(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 50;
    LossKind loss_kind = LossKind::CrossEntropy;
    double early_stop_min_delta = 1e-4;
    std::size_t early_stop_patience = 3;
    double validation_fraction = 0.1;
    std::uint64_t seed = 42;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double validation_mse = 0.0;
    double validation_accuracy = 0.0;
};

struct TrainTrace {
    std::vector<EpochRecord> epochs;
    bool stopped_early = false;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;  // epoch whose parameters were returned
    // True when no validation rows were available and training rows were monitored instead.
    bool monitored_training_set = false;
    std::vector<std::string> warnings;

    // "epoch,train_loss,validation_loss,validation_mse,validation_accuracy"
    std::string to_csv() const;
};

struct ForwardPass {
    Matrix hidden;         // rows x hidden_units, after relu
    Matrix probabilities;  // rows x output_dim
};

// Glorot-uniform weights in [-L, L], L = sqrt(6 / (fan_in + fan_out)), zero biases.
MlpParams init_params(const LayerSpec& spec, std::uint64_t seed);

ForwardPass forward(const MlpParams& params, const SparseMatrix& x);
ForwardPass forward(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows);

// `classes[i]` is the true class of probability row i.
double loss(const Matrix& probabilities, std::span<const std::size_t> classes, LossKind kind);
double loss(const Matrix& probabilities, const LabelMatrix& y, LossKind kind);

// Batch-averaged analytic gradients of `loss` for the given rows of x.
Gradients backward(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows,
                   std::span<const std::size_t> classes, const ForwardPass& pass, LossKind kind);
Gradients backward(const MlpParams& params, const SparseMatrix& x, const LabelMatrix& y, const ForwardPass& pass,
                   LossKind kind);

struct TrainResult {
    MlpParams params;
    TrainTrace trace;
};

TrainResult train(const SparseMatrix& x, const LabelMatrix& y, const LayerSpec& spec, const TrainConfig& config);
TrainResult train(const DocTermMatrix& x, const LabelMatrix& y, const LayerSpec& spec, const TrainConfig& config);

// Row-wise argmax of the forward probabilities; ties go to the smallest index.
std::vector<std::size_t> predict(const MlpParams& params, const SparseMatrix& x);
std::size_t argmax(std::span<const double> values);

// Everything needed to classify raw text with a trained network.
struct ModelFile {
    LayerSpec spec;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_words;
    Weighting weighting = Weighting::Binary;
    std::vector<double> idf;  // per feature, tfidf only
    MlpParams params;
};

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(std::string_view json);
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

// Feature row for one tokenized document using the model's stored words.
SparseMatrix featurize(const ModelFile& model, std::span<const Tokens> documents);

}  // namespace mailclass
