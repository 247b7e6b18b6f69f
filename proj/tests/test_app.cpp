#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "mailclass/app.hpp"
#include "mailclass/error.hpp"
#include "mailclass/util.hpp"

using namespace mailclass;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("mailclass_test_app_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void expect_code(ErrorCode code, auto&& fn) {
    try {
        fn();
        FAIL("no exception thrown");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

// Trains the default synthetic model once for the prediction tests.
const fs::path& trained_model() {
    static const fs::path path = [] {
        RunConfig config;
        config.out_dir = scratch("model").string();
        std::ostringstream out, log;
        cmd_train(config, out, log);
        return fs::path(config.out_dir) / "model.json";
    }();
    return path;
}

}  // namespace

TEST_CASE("exit statuses") {
    CHECK(exit_status(ErrorCode::Usage) == 1);
    CHECK(exit_status(ErrorCode::EmptyCorpus) == 2);
    CHECK(exit_status(ErrorCode::Io) == 2);
    CHECK(exit_status(ErrorCode::ModelFormat) == 2);
    CHECK(exit_status(ErrorCode::Divergence) == 3);
    CHECK(std::string(Error(ErrorCode::EmptyCorpus, "none").what()) == "EmptyCorpus: none");
}

TEST_CASE("config text and keys") {
    RunConfig config;
    apply_config_text(config, "# comment\nhidden_units = 12\n\nweighting=tfidf  # trailing\nstratified = false\n");
    CHECK(config.hidden_units == 12);
    CHECK(config.weighting == "tfidf");
    CHECK_FALSE(config.stratified);
    CHECK(config.pipeline_settings().weighting == Weighting::Tfidf);

    expect_code(ErrorCode::Usage, [&] { apply_config_text(config, "no_such_key = 1\n"); });
    expect_code(ErrorCode::Usage, [&] { apply_config_text(config, "hidden_units\n"); });
    expect_code(ErrorCode::Usage, [&] { set_config_value(config, "hidden_units", "-3"); });
    expect_code(ErrorCode::Usage, [&] { set_config_value(config, "learning_rate", "fast"); });
    expect_code(ErrorCode::Usage, [&] { set_config_value(config, "weighting", "squared"); });
    expect_code(ErrorCode::Usage, [&] { set_config_value(config, "loss", "hinge"); });

    const RunConfig defaults;
    std::set<std::string> names;
    for (const auto& key : config_keys()) {
        names.insert(key.name);
        RunConfig copy;
        CHECK_NOTHROW(set_config_value(copy, key.name, key.get(defaults)));
        CHECK(key.get(copy) == key.get(defaults));
    }
    CHECK(names.size() == config_keys().size());
    for (const char* expected : {"corpus", "stop_words", "min_label_count", "drop_labels", "num_words", "select_k",
                                 "weighting", "hidden_units", "learning_rate", "batch_size", "max_epochs", "loss",
                                 "early_stop_min_delta", "early_stop_patience", "validation_fraction", "train_ratio",
                                 "stratified", "out_dir", "seed"})
        CHECK(names.contains(expected));

    const auto train = defaults.train_config();
    CHECK(train.learning_rate == 0.1);
    CHECK(train.batch_size == 32);
    CHECK(train.max_epochs == 50);
    CHECK(defaults.pipeline_settings().select_k == std::nullopt);
}

TEST_CASE("stats on the fixture directory") {
    RunConfig config;
    config.corpus = (fs::path(MAILCLASS_FIXTURES) / "labeled").string();
    config.min_label_count = 1;
    config.out_dir = scratch("stats").string();
    std::ostringstream out, log;
    const auto stats = cmd_stats(config, out, log);
    const auto manifest = nlohmann::json::parse(read_file(fs::path(MAILCLASS_FIXTURES) / "manifest.json"));
    const auto& expected = manifest["directory"]["stats"];
    CHECK(stats.total_emails == expected["total_emails"].get<std::uint64_t>());
    CHECK(stats.total_words == expected["total_words"].get<std::uint64_t>());
    const auto text = out.str();
    CHECK(text.find("Label email breakdown:\n\tBilling:2\n\tSupport:2\n") != std::string::npos);
    CHECK(text.find("Total word count: 17\n") != std::string::npos);
    for (const char* file : {"label_stats.csv", "vocabulary.csv", "best_words.csv", "best_words.svg"})
        CHECK(fs::exists(fs::path(config.out_dir) / file));
    fs::remove_all(config.out_dir);
}

TEST_CASE("stats on an empty directory") {
    RunConfig config;
    config.corpus = scratch("empty").string();
    config.out_dir = scratch("empty_out").string();
    std::ostringstream out, log;
    try {
        cmd_stats(config, out, log);
        FAIL("expected EmptyCorpus");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyCorpus);
        CHECK(exit_status(e.code()) == 2);
    }
}

TEST_CASE("train writes reproducible artifacts") {
    RunConfig config;
    config.out_dir = scratch("train_a").string();
    std::ostringstream out, log;
    const auto summary = cmd_train(config, out, log);
    CHECK(summary.files.size() == 5);
    for (const auto& f : summary.files) CHECK(fs::exists(f));

    const auto report = nlohmann::json::parse(read_file(fs::path(config.out_dir) / "report.json"));
    const double accuracy = report["accuracy"].get<double>();
    CHECK(out.str().rfind("Test accuracy: " + format_fixed(accuracy, 6), 0) == 0);
    CHECK(accuracy >= 0.9);

    RunConfig second = config;
    second.out_dir = scratch("train_b").string();
    std::ostringstream out2, log2;
    cmd_train(second, out2, log2);
    for (const char* file : {"model.json", "report.json", "confusion.csv", "confusion.svg", "trace.csv"})
        CHECK(read_file(fs::path(config.out_dir) / file) == read_file(fs::path(second.out_dir) / file));
    CHECK(out.str() == out2.str());
    fs::remove_all(config.out_dir);
    fs::remove_all(second.out_dir);
}

TEST_CASE("predict") {
    const auto model = load_model(trained_model());
    std::ostringstream out, log;

    SUBCASE("signature words pick their label") {
        const auto words = synthetic_signature_words(1, 30);
        std::string text;
        for (const auto& w : words) text += w + " ";
        const auto p = cmd_predict(trained_model(), text, out, log);
        CHECK(p.label == "corprova2011");
        CHECK(out.str().rfind("label: corprova2011\n", 0) == 0);
    }
    SUBCASE("email input") {
        const auto words = synthetic_signature_words(6, 30);
        const std::string eml = "Subject: " + words[0] + " " + words[1] + "\nFrom: a@b\n\n" + words[2] + " " + words[3];
        CHECK(cmd_predict(trained_model(), eml, out, log).label == "Friends");
    }
    SUBCASE("empty input") {
        const auto p = cmd_predict(trained_model(), "", out, log);
        CHECK(p.no_known_words);
        CHECK(log.str().find("warning") != std::string::npos);
        CHECK(p.probabilities.size() == model.class_names.size());
    }
    SUBCASE("printed probabilities sum to one") {
        cmd_predict(trained_model(), "some words and then more", out, log);
        std::istringstream lines(out.str());
        std::string line;
        std::getline(lines, line);
        double sum = 0.0;
        std::size_t count = 0;
        while (std::getline(lines, line)) {
            sum += std::stod(line.substr(line.rfind(' ') + 1));
            ++count;
        }
        CHECK(count == model.class_names.size());
        CHECK(std::abs(sum - 1.0) <= 2e-4);
    }
    SUBCASE("missing model") {
        expect_code(ErrorCode::Io, [&] { cmd_predict("/nonexistent/model.json", "x", out, log); });
    }
}

TEST_CASE("sweep table mirrors the reference layout") {
    RunConfig config;
    config.out_dir = scratch("sweep").string();
    std::ostringstream out, log;
    const std::vector<std::size_t> grid{5500, 12000};
    const auto result = cmd_sweep(config, SweepKind::NumWords, grid, out, log);
    CHECK(result.points.size() == 2);
    std::istringstream lines(out.str());
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "Number of Words | Hidden Layers | Accuracy");
    CHECK(rows[1].rfind("5500 | 100 | ", 0) == 0);
    CHECK(rows[1].back() == '%');
    const auto csv = read_file(fs::path(config.out_dir) / "sweep_num_words.csv");
    std::ostringstream again_out, again_log;
    cmd_sweep(config, SweepKind::NumWords, grid, again_out, again_log);
    CHECK(read_file(fs::path(config.out_dir) / "sweep_num_words.csv") == csv);
    fs::remove_all(config.out_dir);
}

TEST_CASE("grids") {
    CHECK(parse_grid("1,10,100") == std::vector<std::size_t>{1, 10, 100});
    CHECK(parse_grid(" 5500 , 12000 ") == std::vector<std::size_t>{5500, 12000});
    expect_code(ErrorCode::Usage, [] { parse_grid("10,1"); });
    expect_code(ErrorCode::Usage, [] { parse_grid("1,1"); });
    expect_code(ErrorCode::Usage, [] { parse_grid("0,4"); });
    expect_code(ErrorCode::Usage, [] { parse_grid("a"); });
    expect_code(ErrorCode::Usage, [] { parse_grid(""); });
    CHECK(default_sweep_grid(SweepKind::HiddenUnits).front() == 1);
    CHECK(default_sweep_grid(SweepKind::HiddenUnits).back() == 2000);
    CHECK(default_sweep_grid(SweepKind::NumWords).back() == 12000);
}

TEST_CASE("gen writes a loadable label directory") {
    RunConfig config;
    config.out_dir = scratch("gen").string();
    std::ostringstream out, log;
    CHECK(cmd_gen(config, out, log) == 589);
    RunConfig reload;
    reload.corpus = config.out_dir;
    const auto corpus = load_configured_corpus(reload, log);
    CHECK(corpus.size() == 589);
    const auto synthetic = generate_synthetic_corpus(SyntheticSpec::standard());
    CHECK(corpus.labels() == synthetic.labels());
    fs::remove_all(config.out_dir);
}
