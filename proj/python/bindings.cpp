// Python bindings for the mailclass core.
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mailclass/app.hpp"
#include "mailclass/error.hpp"
#include "mailclass/eval.hpp"
#include "mailclass/experiments.hpp"
#include "mailclass/features.hpp"
#include "mailclass/ingest.hpp"
#include "mailclass/mime.hpp"
#include "mailclass/model.hpp"
#include "mailclass/text.hpp"

namespace py = pybind11;
using namespace mailclass;

namespace {

const StopWordList& stop_words_or_default(const std::optional<std::vector<std::string>>& words,
                                          StopWordList& storage) {
    if (!words) return StopWordList::english();
    storage = StopWordList(*words);
    return storage;
}

RunConfig make_config(const py::dict& options) {
    RunConfig config;
    for (const auto& [key, value] : options) {
        std::string text;
        if (py::isinstance<py::bool_>(value))
            text = value.cast<bool>() ? "true" : "false";
        else
            text = py::str(value).cast<std::string>();
        set_config_value(config, key.cast<std::string>(), text);
    }
    return config;
}

py::dict sweep_to_dict(const SweepResult& result) {
    py::list points;
    for (const auto& p : result.points) {
        py::dict d;
        d["value"] = p.value;
        d["accuracy"] = p.accuracy;
        d["accuracy_min"] = p.accuracy_min;
        d["accuracy_max"] = p.accuracy_max;
        d["epochs_run"] = p.epochs_run;
        d["train_seconds"] = p.train_seconds;
        points.append(d);
    }
    py::dict out;
    out["parameter_name"] = result.parameter_name;
    out["points"] = points;
    out["csv"] = sweep_csv(result);
    return out;
}

}  // namespace

PYBIND11_MODULE(_mailclass, m) {
    m.doc() = "Email classification with a bag-of-words neural network";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result(
        [&] { return py::object(py::exception<Error>(m, "MailclassError", PyExc_RuntimeError)); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto& type = error_type.get_stored();
            py::object exc = type(e.what());
            exc.attr("code") = std::string(error_code_name(e.code()));
            exc.attr("exit_status") = exit_status(e.code());
            PyErr_SetObject(type.ptr(), exc.ptr());
        }
    });

    py::class_<Header>(m, "Header")
        .def_readonly("name", &Header::name)
        .def_readonly("value", &Header::value)
        .def("__repr__", [](const Header& h) { return "Header(" + h.name + ": " + h.value + ")"; });

    py::class_<BodyPart>(m, "BodyPart")
        .def_readonly("content_type", &BodyPart::content_type)
        .def_readonly("transfer_encoding", &BodyPart::transfer_encoding)
        .def_readonly("charset", &BodyPart::charset)
        .def_property_readonly("raw_bytes", [](const BodyPart& p) { return py::bytes(p.raw_bytes); });

    py::class_<RawEmail>(m, "RawEmail")
        .def_readonly("headers", &RawEmail::headers)
        .def_readonly("body_parts", &RawEmail::body_parts)
        .def_readonly("warnings", &RawEmail::warnings)
        .def("header", &RawEmail::header, py::arg("name"))
        .def("text", [](const RawEmail& e) { return extract_text(e); }, "Subject and body text.");

    m.def("parse_mbox", [](const py::bytes& data) { return parse_mbox(std::string(data)); }, py::arg("data"));
    m.def("parse_eml", [](const py::bytes& data) { return parse_eml(std::string(data)); }, py::arg("data"));
    m.def("serialize_mbox", [](const std::vector<RawEmail>& emails) { return py::bytes(serialize_mbox(emails)); });

    py::class_<EmailDocument>(m, "EmailDocument")
        .def_readonly("id", &EmailDocument::id)
        .def_readonly("text", &EmailDocument::text)
        .def_readonly("label", &EmailDocument::label);

    py::class_<LabeledCorpus>(m, "LabeledCorpus")
        .def(py::init([](const std::vector<std::pair<std::string, std::string>>& items) {
                 std::vector<EmailDocument> docs;
                 for (std::size_t i = 0; i < items.size(); ++i)
                     docs.push_back({"py:" + std::to_string(i), items[i].first, items[i].second});
                 return LabeledCorpus(std::move(docs));
             }),
             py::arg("items"), "Build from (text, label) pairs.")
        .def_property_readonly("documents", &LabeledCorpus::documents)
        .def_property_readonly("labels", &LabeledCorpus::labels)
        .def("__len__", &LabeledCorpus::size);

    m.def("load_corpus", [](const std::filesystem::path& path) { return load_corpus(CorpusSource::detect(path)).corpus; },
          py::arg("path"), "Load an mbox file, a CSV file or a label directory.");
    m.def("filter_labels", &filter_labels, py::arg("corpus"), py::arg("min_count"),
          py::arg("drop") = std::set<std::string>{});
    m.def(
        "corpus_stats",
        [](const LabeledCorpus& corpus) {
            const auto stats = corpus_stats(corpus, StopWordList::english());
            py::dict d;
            d["emails"] = stats.per_label_email_count;
            d["words"] = stats.per_label_word_count;
            d["total_emails"] = stats.total_emails;
            d["total_words"] = stats.total_words;
            return d;
        },
        py::arg("corpus"));

    m.def("english_stop_words", [] { return StopWordList::english().sorted_words(); });
    m.def(
        "tokenize",
        [](std::string_view text, const std::optional<std::vector<std::string>>& stop_words) {
            StopWordList storage;
            return tokenize(text, stop_words_or_default(stop_words, storage));
        },
        py::arg("text"), py::arg("stop_words") = py::none(),
        "Tokens of `text`; stop_words defaults to the bundled English list.");
    m.def(
        "build_vocabulary",
        [](const std::vector<Tokens>& documents) {
            std::vector<std::pair<std::string, std::uint64_t>> ranked;
            const Vocabulary vocab = build_vocabulary(documents);
            for (const auto& e : vocab.entries()) ranked.emplace_back(e.word, e.count);
            return ranked;
        },
        py::arg("documents"), "(word, count) pairs in rank order.");

    m.def(
        "chi2_scores",
        [](const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& y, std::size_t classes) {
            const std::size_t cols = x.empty() ? 0 : x[0].size();
            std::vector<double> flat;
            for (const auto& row : x) {
                if (row.size() != cols) throw Error(ErrorCode::Shape, "ragged feature rows");
                flat.insert(flat.end(), row.begin(), row.end());
            }
            DocTermMatrix m;
            m.values = SparseMatrix::from_dense(x.size(), cols, flat);
            m.feature_words.resize(cols);
            std::vector<std::string> names;
            for (std::size_t c = 0; c < classes; ++c) names.push_back(std::to_string(c));
            std::vector<double> out;
            for (const auto& s : chi2_scores(m, LabelMatrix(y, names))) out.push_back(s.score);
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("classes"));

    m.def(
        "train_test_split",
        [](const std::vector<std::size_t>& labels, double ratio, std::uint64_t seed, bool stratified) {
            const auto s = train_test_split(labels, ratio, seed, stratified);
            return std::make_pair(s.train_indices, s.test_indices);
        },
        py::arg("labels"), py::arg("train_ratio") = 0.9, py::arg("seed") = 42, py::arg("stratified") = true);

    m.def(
        "confusion_matrix",
        [](const std::vector<std::size_t>& truth, const std::vector<std::size_t>& predicted, std::size_t classes) {
            const auto cm = confusion_matrix(truth, predicted, classes);
            std::vector<std::vector<std::uint64_t>> grid(classes, std::vector<std::uint64_t>(classes));
            for (std::size_t t = 0; t < classes; ++t)
                for (std::size_t p = 0; p < classes; ++p) grid[t][p] = cm.at(t, p);
            return std::make_pair(grid, cm.total() ? accuracy(cm) : 0.0);
        },
        py::arg("truth"), py::arg("predicted"), py::arg("classes"), "(counts, accuracy)");

    m.def(
        "synthetic_corpus",
        [](std::uint64_t seed, double signal_strength) {
            return generate_synthetic_corpus(SyntheticSpec::standard(seed, signal_strength));
        },
        py::arg("seed") = 42, py::arg("signal_strength") = 0.3);

    m.def("config_keys", [] {
        const RunConfig defaults;
        py::dict d;
        for (const auto& key : config_keys()) d[py::str(key.name)] = key.get(defaults);
        return d;
    });

    m.def(
        "train",
        [](const py::kwargs& options) {
            const auto config = make_config(options);
            std::ostringstream out, log;
            const auto summary = cmd_train(config, out, log);
            py::dict d;
            d["accuracy"] = summary.report.accuracy;
            d["epochs_run"] = summary.trace.epochs_run;
            d["stopped_early"] = summary.trace.stopped_early;
            std::vector<std::string> files;
            for (const auto& f : summary.files) files.push_back(f.string());
            d["files"] = files;
            d["output"] = out.str();
            return d;
        },
        "Run the training pipeline; keyword arguments are configuration keys.");

    m.def(
        "predict",
        [](const std::filesystem::path& model_path, std::string_view input) {
            std::ostringstream out, log;
            const auto p = cmd_predict(model_path, input, out, log);
            py::dict probabilities;
            for (std::size_t c = 0; c < p.class_names.size(); ++c) probabilities[py::str(p.class_names[c])] = p.probabilities[c];
            return py::make_tuple(p.label, probabilities);
        },
        py::arg("model_path"), py::arg("input"), "(label, {class: probability}) for an email or plain text.");

    m.def(
        "sweep",
        [](const std::string& which, const std::vector<std::size_t>& grid, const py::kwargs& options) {
            SweepKind kind;
            if (which == "hidden")
                kind = SweepKind::HiddenUnits;
            else if (which == "words")
                kind = SweepKind::NumWords;
            else
                throw Error(ErrorCode::Usage, "which must be 'hidden' or 'words'");
            const auto config = make_config(options);
            std::ostringstream out, log;
            return sweep_to_dict(cmd_sweep(config, kind, grid, out, log));
        },
        py::arg("which"), py::arg("grid"), "Accuracy sweep; keyword arguments are configuration keys.");
}
