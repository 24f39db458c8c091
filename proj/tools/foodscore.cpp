#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foodscore/error.hpp"
#include "foodscore/pipeline.hpp"
#include "foodscore/text.hpp"

using namespace foodscore;

namespace {

struct Common {
    std::string config = "config.json";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "pipeline config file")->capture_default_str();
    cmd->add_option("--seed", c.seed, "override the config seed");
}

PipelineConfig load_config(const Common& c)
{
    auto cfg = PipelineConfig::load(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.jobs) cfg.jobs = std::max(1u, *c.jobs);
    return cfg;
}

std::vector<TargetKey> parse_target_list(const std::string& csv)
{
    std::vector<TargetKey> out;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto t = trim(item);
        if (!t.empty()) out.push_back(parse_target(t));
    }
    return out;
}

std::vector<std::string> read_lines(const std::string& path)
{
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "input file not found: " + path);
        text = read_file(path);
    }
    std::vector<std::string> lines;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) {
        const auto t = trim(line);
        if (!t.empty()) lines.emplace_back(t);
    }
    return lines;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, origin + ": " + e.what());
    }
}

std::ostream& output_stream(const std::string& path, std::ofstream& file)
{
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::Config, "cannot write " + path);
    return file;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Food health scores from plain-text food descriptions"};
    app.require_subcommand(1);
    Logger log(&std::cerr);

    Common ingest_opts, train_opts, predict_opts, score_opts, validate_opts;

    auto* ingest = app.add_subcommand("ingest", "build the canonical dataset from raw tables");
    add_common(ingest, ingest_opts);

    auto* train = app.add_subcommand("train", "train per-target models and write a bundle");
    add_common(train, train_opts);
    std::string train_targets;
    train->add_option("--targets", train_targets, "comma-separated target keys");
    train->add_option("--jobs", train_opts.jobs, "parallel training jobs");

    auto* predict = app.add_subcommand("predict", "predict nutrient profiles for descriptions");
    add_common(predict, predict_opts);
    std::vector<std::string> predict_text;
    std::string predict_input, predict_output;
    predict->add_option("--text", predict_text, "description (repeatable)");
    predict->add_option("--input", predict_input, "file with one description per line, or - for stdin");
    predict->add_option("--output", predict_output, "output file (default stdout)");

    auto* score = app.add_subcommand("score", "score a profile or a description");
    add_common(score, score_opts);
    std::string score_profile, score_text, score_output;
    auto* profile_opt = score->add_option("--profile", score_profile, "profile JSON file, or - for stdin");
    score->add_option("--text", score_text, "description; with --profile it drives keyword checks only");
    score->add_option("--output", score_output, "output file (default stdout)");
    (void)profile_opt;

    auto* validate = app.add_subcommand("validate", "compare predicted and published scores");
    add_common(validate, validate_opts);
    bool oracle = false;
    validate->add_flag("--oracle", oracle, "score the dataset's own profiles instead of predictions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) {
            cmd_ingest(load_config(ingest_opts), log);
        } else if (train->parsed()) {
            const auto cfg = load_config(train_opts);
            const auto outcome = cmd_train(cfg, parse_target_list(train_targets), log);
            std::cout << read_file(cfg.resolve(cfg.bundle) / "metrics.csv");
        } else if (predict->parsed()) {
            const auto cfg = load_config(predict_opts);
            std::vector<std::string> descriptions = predict_text;
            if (!predict_input.empty()) {
                auto lines = read_lines(predict_input);
                descriptions.insert(descriptions.end(), lines.begin(), lines.end());
            }
            if (predict_text.empty() && predict_input.empty()) throw Error(ErrorKind::Config, "predict needs --text or --input");
            std::ofstream file;
            auto& out = output_stream(predict_output, file);
            if (!descriptions.empty()) {
                const auto bundle = load_configured_bundle(cfg);
                for (const auto& d : descriptions) out << prediction_to_json(d, predict_profile(bundle, d)).dump() << '\n';
            }
        } else if (score->parsed()) {
            const auto cfg = load_config(score_opts);
            const auto scoring = cfg.scoring();
            NutrientProfile profile;
            std::string description = score_text;
            if (!score_profile.empty()) {
                std::string text;
                if (score_profile == "-") {
                    std::ostringstream ss;
                    ss << std::cin.rdbuf();
                    text = ss.str();
                } else {
                    if (!std::filesystem::exists(score_profile)) throw Error(ErrorKind::Config, "profile file not found: " + score_profile);
                    text = read_file(score_profile);
                }
                const auto j = parse_json_text(text, score_profile == "-" ? "stdin" : score_profile);
                if (description.empty() && j.is_object() && j.contains("description")) description = j.at("description").get<std::string>();
                auto body = j;
                if (body.is_object()) body.erase("description");
                profile = profile_from_json(body);
            } else if (!score_text.empty()) {
                const auto bundle = load_configured_bundle(cfg);
                profile = predict_profile(bundle, score_text);
            } else {
                throw Error(ErrorKind::Config, "score needs --profile or --text");
            }
            auto out_json = breakdown_to_json(total_fcs(profile, description, scoring));
            std::ofstream file;
            output_stream(score_output, file) << out_json.dump(2) << '\n';
        } else if (validate->parsed()) {
            const auto report = cmd_validate(load_config(validate_opts), oracle, log);
            (void)report;
        }
    } catch (const Error& e) {
        log.warn("error", {{"kind", to_string(e.kind())}, {"message", e.what()}});
        return exit_code_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        log.warn("error", {{"kind", "ParseError"}, {"message", e.what()}});
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
