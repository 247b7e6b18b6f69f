// mailclass: email classification with a bag-of-words neural network.
//
//   mailclass stats   --corpus mail.mbox
//   mailclass train   --corpus corpus_dir --out-dir out
//   mailclass predict --model out/model.json message.eml
//   mailclass sweep   --which words --grid 5500,12000
//   mailclass gen     --out-dir corpus_dir

#include <algorithm>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "mailclass/app.hpp"
#include "mailclass/error.hpp"
#include "mailclass/util.hpp"

namespace {

std::string flag_name(const std::string& key) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return flag;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mailclass;

    CLI::App app{"Email classification with a bag-of-words neural network"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    const RunConfig defaults;
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_options;
    std::string config_path;
    app.add_option("--config", config_path, "config file with one 'key = value' per line");
    for (const auto& key : config_keys()) {
        std::string names = flag_name(key.name);
        if (key.name.find('_') != std::string::npos) names += ",--" + key.name;
        const auto shown = key.get(defaults);
        auto* opt = app.add_option(names, flag_values[key.name], key.help);
        opt->default_str(shown.empty() ? "\"\"" : shown)->group("Configuration keys");
        flag_options[key.name] = opt;
    }

    auto* stats = app.add_subcommand("stats", "per-label email and word counts, vocabulary and best-words reports");
    auto* train = app.add_subcommand("train", "train on the configured corpus and evaluate on held-out emails");

    auto* predict = app.add_subcommand("predict", "classify one email with a trained model");
    std::string model_path;
    std::string input_path = "-";
    predict->add_option("--model", model_path, "model JSON written by train")->required();
    predict->add_option("input", input_path, "eml or text file; '-' reads standard input")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "accuracy sweep over hidden units or number of words");
    std::string which;
    std::string grid_text;
    sweep->add_option("--which", which, "hidden or words")->required()->check(CLI::IsMember({"hidden", "words"}));
    sweep->add_option("--grid", grid_text, "comma-separated, strictly increasing values (default grid if omitted)");

    auto* gen = app.add_subcommand("gen", "write the synthetic corpus as label directories under --out-dir");

    for (auto* sub : {stats, train, predict, sweep, gen}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) apply_config_text(config, read_file(config_path));
        for (const auto& key : config_keys())
            if (flag_options[key.name]->count() > 0) set_config_value(config, key.name, flag_values[key.name]);

        if (stats->parsed()) {
            cmd_stats(config, std::cout, std::cerr);
        } else if (train->parsed()) {
            cmd_train(config, std::cout, std::cerr);
        } else if (predict->parsed()) {
            std::string input;
            if (input_path == "-") {
                input.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
            } else {
                input = read_file(input_path);
            }
            if (trim(input).empty()) std::cerr << "warning: empty input\n";
            cmd_predict(model_path, input, std::cout, std::cerr);
        } else if (sweep->parsed()) {
            const auto kind = which == "hidden" ? SweepKind::HiddenUnits : SweepKind::NumWords;
            const auto grid = grid_text.empty() ? default_sweep_grid(kind) : parse_grid(grid_text);
            cmd_sweep(config, kind, grid, std::cout, std::cerr);
        } else if (gen->parsed()) {
            cmd_gen(config, std::cout, std::cerr);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_status(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: IoError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
