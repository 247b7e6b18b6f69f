#include "mailclass/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "mailclass/error.hpp"
#include "mailclass/rng.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

namespace {

constexpr double kProbabilityFloor = 1e-12;

// Stream ids for the seeded generators used by training.
constexpr std::uint64_t kInitW1Stream = 11;
constexpr std::uint64_t kInitW2Stream = 12;
constexpr std::uint64_t kValidationStream = 21;
constexpr std::uint64_t kBatchStream = 22;

void fill_uniform(Matrix& m, double limit, Rng rng) {
    for (auto& v : m.data()) v = rng.uniform(-limit, limit);
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

// Accumulates gradients for `rows` into `grad`. Only the W1 rows listed in
// `touched` are nonzero afterwards; they must be zero on entry.
void accumulate_gradients(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows,
                          std::span<const std::size_t> classes, const ForwardPass& pass, LossKind kind,
                          Gradients& grad, std::vector<std::uint32_t>& touched) {
    const std::size_t n = rows.size();
    const std::size_t hidden = params.w1.cols();
    const std::size_t out = params.w2.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> delta_out(out);
    std::vector<double> delta_hidden(hidden);
    std::vector<char> seen(params.w1.rows(), 0);
    for (auto r : touched) seen[r] = 1;

    for (std::size_t r = 0; r < n; ++r) {
        const auto p = pass.probabilities.row(r);
        const auto h = pass.hidden.row(r);
        if (kind == LossKind::CrossEntropy) {
            for (std::size_t c = 0; c < out; ++c) delta_out[c] = (p[c] - (classes[r] == c ? 1.0 : 0.0)) * inv_n;
        } else {
            // d/dz of mean squared error through softmax.
            const double scale = 2.0 * inv_n / static_cast<double>(out);
            double dot = 0.0;
            for (std::size_t c = 0; c < out; ++c) {
                delta_out[c] = scale * (p[c] - (classes[r] == c ? 1.0 : 0.0));
                dot += delta_out[c] * p[c];
            }
            for (std::size_t c = 0; c < out; ++c) delta_out[c] = p[c] * (delta_out[c] - dot);
        }

        for (std::size_t c = 0; c < out; ++c) grad.b2[c] += delta_out[c];
        for (std::size_t k = 0; k < hidden; ++k) {
            auto g_row = grad.w2.row(k);
            const auto w_row = params.w2.row(k);
            double back = 0.0;
            for (std::size_t c = 0; c < out; ++c) {
                g_row[c] += h[k] * delta_out[c];
                back += w_row[c] * delta_out[c];
            }
            delta_hidden[k] = h[k] > 0.0 ? back : 0.0;
        }
        for (std::size_t k = 0; k < hidden; ++k) grad.b1[k] += delta_hidden[k];
        for (const auto& e : x.row(rows[r])) {
            if (!seen[e.col]) {
                seen[e.col] = 1;
                touched.push_back(e.col);
            }
            auto g_row = grad.w1.row(e.col);
            for (std::size_t k = 0; k < hidden; ++k) g_row[k] += e.value * delta_hidden[k];
        }
    }
}

double accuracy_of(const Matrix& probabilities, std::span<const std::size_t> classes) {
    if (classes.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < classes.size(); ++r)
        if (argmax(probabilities.row(r)) == classes[r]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(classes.size());
}

}  // namespace

void LayerSpec::validate() const {
    if (input_dim < 1 || hidden_units < 1 || output_dim < 1)
        throw Error(ErrorCode::Domain, "layer dimensions must all be at least 1");
}

MlpParams MlpParams::zeros(const LayerSpec& spec) {
    spec.validate();
    return {Matrix(spec.input_dim, spec.hidden_units), std::vector<double>(spec.hidden_units, 0.0),
            Matrix(spec.hidden_units, spec.output_dim), std::vector<double>(spec.output_dim, 0.0)};
}

bool MlpParams::all_finite() const {
    auto finite = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
    };
    return finite(w1.data()) && finite(b1) && finite(w2.data()) && finite(b2);
}

std::string_view loss_kind_name(LossKind kind) { return kind == LossKind::Mse ? "mse" : "cross_entropy"; }

LossKind parse_loss_kind(std::string_view name) {
    if (name == "cross_entropy") return LossKind::CrossEntropy;
    if (name == "mse") return LossKind::Mse;
    throw Error(ErrorCode::Usage, "unknown loss kind: " + std::string(name));
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw Error(ErrorCode::Usage, "learning_rate must be > 0");
    if (batch_size < 1) throw Error(ErrorCode::Usage, "batch_size must be >= 1");
    if (max_epochs < 1) throw Error(ErrorCode::Usage, "max_epochs must be >= 1");
    if (!(early_stop_min_delta >= 0.0)) throw Error(ErrorCode::Usage, "early_stop_min_delta must be >= 0");
    if (early_stop_patience < 1) throw Error(ErrorCode::Usage, "early_stop_patience must be >= 1");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw Error(ErrorCode::Usage, "validation_fraction must be in [0, 1)");
}

std::string TrainTrace::to_csv() const {
    std::string out = "epoch,train_loss,validation_loss,validation_mse,validation_accuracy\n";
    for (const auto& e : epochs)
        out += std::to_string(e.epoch) + "," + format_fixed(e.train_loss, 8) + "," + format_fixed(e.validation_loss, 8) +
               "," + format_fixed(e.validation_mse, 8) + "," + format_fixed(e.validation_accuracy, 6) + "\n";
    return out;
}

MlpParams init_params(const LayerSpec& spec, std::uint64_t seed) {
    auto params = MlpParams::zeros(spec);
    fill_uniform(params.w1, std::sqrt(6.0 / static_cast<double>(spec.input_dim + spec.hidden_units)),
                 Rng::stream(seed, kInitW1Stream));
    fill_uniform(params.w2, std::sqrt(6.0 / static_cast<double>(spec.hidden_units + spec.output_dim)),
                 Rng::stream(seed, kInitW2Stream));
    return params;
}

ForwardPass forward(const MlpParams& params, const SparseMatrix& x) { return forward(params, x, all_rows(x.rows())); }

ForwardPass forward(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows) {
    if (x.cols() != params.w1.rows())
        throw Error(ErrorCode::Shape, "input has " + std::to_string(x.cols()) + " columns, network expects " +
                                          std::to_string(params.w1.rows()));
    const std::size_t hidden = params.w1.cols();
    const std::size_t out = params.w2.cols();
    ForwardPass pass{Matrix(rows.size(), hidden), Matrix(rows.size(), out)};

    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto h = pass.hidden.row(r);
        std::copy(params.b1.begin(), params.b1.end(), h.begin());
        for (const auto& e : x.row(rows[r])) {
            if (!std::isfinite(e.value)) throw Error(ErrorCode::Domain, "non-finite input value");
            const auto w = params.w1.row(e.col);
            for (std::size_t k = 0; k < hidden; ++k) h[k] += e.value * w[k];
        }
        for (auto& v : h) v = v > 0.0 ? v : 0.0;

        auto p = pass.probabilities.row(r);
        std::copy(params.b2.begin(), params.b2.end(), p.begin());
        for (std::size_t k = 0; k < hidden; ++k) {
            if (h[k] == 0.0) continue;
            const auto w = params.w2.row(k);
            for (std::size_t c = 0; c < out; ++c) p[c] += h[k] * w[c];
        }
        const double max = *std::max_element(p.begin(), p.end());
        double sum = 0.0;
        for (auto& v : p) {
            v = std::exp(v - max);
            sum += v;
        }
        for (auto& v : p) v /= sum;
    }
    return pass;
}

double loss(const Matrix& probabilities, std::span<const std::size_t> classes, LossKind kind) {
    if (probabilities.rows() != classes.size()) throw Error(ErrorCode::Shape, "probability and label rows differ");
    if (classes.empty()) return 0.0;
    const std::size_t n = classes.size();
    const std::size_t c_count = probabilities.cols();
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (classes[r] >= c_count) throw Error(ErrorCode::Shape, "label index exceeds probability columns");
        const auto p = probabilities.row(r);
        if (kind == LossKind::CrossEntropy) {
            total -= std::log(std::max(p[classes[r]], kProbabilityFloor));
        } else {
            for (std::size_t c = 0; c < c_count; ++c) {
                const double d = p[c] - (classes[r] == c ? 1.0 : 0.0);
                total += d * d;
            }
        }
    }
    if (kind == LossKind::CrossEntropy) return total / static_cast<double>(n);
    return total / static_cast<double>(n * c_count);
}

double loss(const Matrix& probabilities, const LabelMatrix& y, LossKind kind) {
    if (probabilities.cols() != y.cols()) throw Error(ErrorCode::Shape, "probability and label columns differ");
    return loss(probabilities, y.classes(), kind);
}

Gradients backward(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows,
                   std::span<const std::size_t> classes, const ForwardPass& pass, LossKind kind) {
    if (rows.empty()) throw Error(ErrorCode::Shape, "backward needs a nonempty batch");
    if (rows.size() != classes.size() || pass.probabilities.rows() != rows.size())
        throw Error(ErrorCode::Shape, "batch, labels and forward pass sizes differ");
    auto grad = MlpParams::zeros(params.spec());
    std::vector<std::uint32_t> touched;
    accumulate_gradients(params, x, rows, classes, pass, kind, grad, touched);
    return grad;
}

Gradients backward(const MlpParams& params, const SparseMatrix& x, const LabelMatrix& y, const ForwardPass& pass,
                   LossKind kind) {
    return backward(params, x, all_rows(x.rows()), y.classes(), pass, kind);
}

TrainResult train(const DocTermMatrix& x, const LabelMatrix& y, const LayerSpec& spec, const TrainConfig& config) {
    return train(x.values, y, spec, config);
}

TrainResult train(const SparseMatrix& x, const LabelMatrix& y, const LayerSpec& spec, const TrainConfig& config) {
    spec.validate();
    config.validate();
    if (x.rows() != y.rows()) throw Error(ErrorCode::Shape, "feature and label row counts differ");
    if (x.rows() < 2) throw Error(ErrorCode::Shape, "training needs at least two rows");
    if (x.cols() != spec.input_dim || y.cols() != spec.output_dim)
        throw Error(ErrorCode::Shape, "layer spec does not match data shape");

    TrainResult result;
    auto& trace = result.trace;

    const std::size_t n = x.rows();
    auto order = all_rows(n);
    Rng::stream(config.seed, kValidationStream).shuffle(std::span(order));
    std::size_t n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * config.validation_fraction));
    n_val = std::min(n_val, n - 1);
    if (config.validation_fraction > 0.0 && n_val == 0)
        trace.warnings.push_back("validation_fraction leaves no validation rows; monitoring training loss instead");

    std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(val_rows.begin(), val_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    trace.monitored_training_set = val_rows.empty();
    const std::vector<std::size_t> monitor_rows = val_rows.empty() ? train_rows : val_rows;
    std::vector<std::size_t> monitor_classes;
    for (auto r : monitor_rows) monitor_classes.push_back(y.class_of(r));

    auto params = init_params(spec, config.seed);
    auto best = params;
    double best_mse = std::numeric_limits<double>::infinity();
    double reference_mse = std::numeric_limits<double>::infinity();
    std::size_t stale_epochs = 0;

    Rng batch_rng = Rng::stream(config.seed, kBatchStream);
    auto grad = MlpParams::zeros(spec);
    std::vector<std::uint32_t> touched;
    std::vector<std::size_t> batch_classes;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        batch_rng.shuffle(std::span(train_rows));
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < train_rows.size(); start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(start + config.batch_size, train_rows.size());
            const std::span<const std::size_t> batch(train_rows.data() + start, end - start);
            batch_classes.clear();
            for (auto r : batch) batch_classes.push_back(y.class_of(r));

            const auto pass = forward(params, x, batch);
            const double batch_loss = loss(pass.probabilities, batch_classes, config.loss_kind);
            if (!std::isfinite(batch_loss))
                throw Error(ErrorCode::Divergence, "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                                       std::to_string(batch_index));
            loss_sum += batch_loss * static_cast<double>(batch.size());

            for (auto r : touched) std::fill(grad.w1.row(r).begin(), grad.w1.row(r).end(), 0.0);
            touched.clear();
            std::fill(grad.b1.begin(), grad.b1.end(), 0.0);
            std::fill(grad.w2.data().begin(), grad.w2.data().end(), 0.0);
            std::fill(grad.b2.begin(), grad.b2.end(), 0.0);
            accumulate_gradients(params, x, batch, batch_classes, pass, config.loss_kind, grad, touched);

            const double lr = config.learning_rate;
            for (auto r : touched) {
                auto w = params.w1.row(r);
                const auto g = grad.w1.row(r);
                for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * g[k];
            }
            for (std::size_t k = 0; k < params.b1.size(); ++k) params.b1[k] -= lr * grad.b1[k];
            auto w2 = params.w2.data();
            const auto g2 = grad.w2.data();
            for (std::size_t k = 0; k < w2.size(); ++k) w2[k] -= lr * g2[k];
            for (std::size_t c = 0; c < params.b2.size(); ++c) params.b2[c] -= lr * grad.b2[c];
        }

        const auto monitor = forward(params, x, monitor_rows);
        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(train_rows.size());
        record.validation_loss = loss(monitor.probabilities, monitor_classes, config.loss_kind);
        record.validation_mse = loss(monitor.probabilities, monitor_classes, LossKind::Mse);
        record.validation_accuracy = accuracy_of(monitor.probabilities, monitor_classes);
        if (!std::isfinite(record.validation_mse) || !std::isfinite(record.train_loss))
            throw Error(ErrorCode::Divergence, "non-finite loss after epoch " + std::to_string(epoch));
        trace.epochs.push_back(record);
        trace.epochs_run = epoch;

        if (record.validation_mse < best_mse) {
            best_mse = record.validation_mse;
            best = params;
            trace.best_epoch = epoch;
        }
        if (record.validation_mse < reference_mse - config.early_stop_min_delta) {
            reference_mse = record.validation_mse;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.early_stop_patience && epoch < config.max_epochs) {
            trace.stopped_early = true;
            break;
        }
    }

    result.params = std::move(best);
    return result;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

std::vector<std::size_t> predict(const MlpParams& params, const SparseMatrix& x) {
    const auto pass = forward(params, x);
    std::vector<std::size_t> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = argmax(pass.probabilities.row(r));
    return out;
}

// ---- model file ------------------------------------------------------------

namespace {

using ojson = nlohmann::ordered_json;

ojson matrix_json(const Matrix& m) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Matrix matrix_from_json(const ojson& j, std::size_t rows, std::size_t cols, const char* name) {
    if (!j.is_array() || j.size() != rows)
        throw Error(ErrorCode::ModelFormat, std::string(name) + " must have " + std::to_string(rows) + " rows");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != cols)
            throw Error(ErrorCode::ModelFormat, std::string(name) + " row " + std::to_string(i) + " has wrong width");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!row[k].is_number()) throw Error(ErrorCode::ModelFormat, std::string(name) + " holds a non-number");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

std::vector<double> vector_from_json(const ojson& j, std::size_t size, const char* name) {
    if (!j.is_array() || j.size() != size)
        throw Error(ErrorCode::ModelFormat, std::string(name) + " must have " + std::to_string(size) + " entries");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw Error(ErrorCode::ModelFormat, std::string(name) + " holds a non-number");
        v.push_back(e.get<double>());
    }
    return v;
}

const ojson& field(const ojson& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ModelFormat, std::string("missing field ") + key);
    return j.at(key);
}

std::size_t dim(const ojson& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_unsigned() || v.get<std::size_t>() < 1)
        throw Error(ErrorCode::ModelFormat, std::string(key) + " must be a positive integer");
    return v.get<std::size_t>();
}

}  // namespace

std::string model_to_json(const ModelFile& model) {
    ojson j;
    j["format_version"] = kModelFormatVersion;
    j["spec"] = {{"input_dim", model.spec.input_dim},
                 {"hidden_units", model.spec.hidden_units},
                 {"output_dim", model.spec.output_dim}};
    j["class_names"] = model.class_names;
    j["feature_words"] = model.feature_words;
    j["weighting"] = std::string(weighting_name(model.weighting));
    if (model.weighting == Weighting::Tfidf) j["idf"] = model.idf;
    j["weights"] = {{"W1", matrix_json(model.params.w1)},
                    {"b1", model.params.b1},
                    {"W2", matrix_json(model.params.w2)},
                    {"b2", model.params.b2}};
    return j.dump() + "\n";
}

ModelFile model_from_json(std::string_view text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ModelFormat, std::string("invalid JSON: ") + e.what());
    }
    const auto& version = field(j, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
        throw Error(ErrorCode::ModelFormat, "unsupported format_version " + version.dump());

    ModelFile model;
    const auto& spec = field(j, "spec");
    model.spec = {dim(spec, "input_dim"), dim(spec, "hidden_units"), dim(spec, "output_dim")};
    try {
        model.class_names = field(j, "class_names").get<std::vector<std::string>>();
        model.feature_words = field(j, "feature_words").get<std::vector<std::string>>();
        model.weighting = parse_weighting(field(j, "weighting").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ModelFormat, e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::ModelFormat, e.what());
    }
    if (model.class_names.size() != model.spec.output_dim)
        throw Error(ErrorCode::ModelFormat, "class_names does not match output_dim");
    if (!std::is_sorted(model.class_names.begin(), model.class_names.end()))
        throw Error(ErrorCode::ModelFormat, "class_names must be sorted");
    if (model.feature_words.size() != model.spec.input_dim)
        throw Error(ErrorCode::ModelFormat, "feature_words does not match input_dim");
    if (model.weighting == Weighting::Tfidf) model.idf = vector_from_json(field(j, "idf"), model.spec.input_dim, "idf");

    const auto& w = field(j, "weights");
    model.params.w1 = matrix_from_json(field(w, "W1"), model.spec.input_dim, model.spec.hidden_units, "W1");
    model.params.b1 = vector_from_json(field(w, "b1"), model.spec.hidden_units, "b1");
    model.params.w2 = matrix_from_json(field(w, "W2"), model.spec.hidden_units, model.spec.output_dim, "W2");
    model.params.b2 = vector_from_json(field(w, "b2"), model.spec.output_dim, "b2");
    if (!model.params.all_finite()) throw Error(ErrorCode::ModelFormat, "weights contain non-finite values");
    return model;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) { write_file(path, model_to_json(model)); }

ModelFile load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

SparseMatrix featurize(const ModelFile& model, std::span<const Tokens> documents) {
    return vectorize_words(documents, model.feature_words, model.weighting, model.idf).values;
}

}  // namespace mailclass
