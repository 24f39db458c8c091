#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "foodscore/error.hpp"
#include "foodscore/pipeline.hpp"
#include "foodscore/scorer.hpp"
#include "foodscore/validate.hpp"

namespace py = pybind11;
using namespace foodscore;

namespace {

py::object to_py(const nlohmann::json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::handle& obj)
{
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

ScoringConfig scoring_from(const py::object& config)
{
    return config.is_none() ? ScoringConfig::defaults() : ScoringConfig::from_json(from_py(config));
}

std::vector<TargetKey> keys_from(const std::vector<std::string>& names)
{
    std::vector<TargetKey> out;
    for (const auto& n : names) out.push_back(parse_target(n));
    return out;
}

} // namespace

PYBIND11_MODULE(_foodscore, m)
{
    m.doc() = "Food health scoring from plain-text descriptions";

    py::register_exception<Error>(m, "FoodscoreError");

    m.def("target_names", [] {
        std::vector<std::string> out;
        for (const auto& t : target_registry()) out.emplace_back(t.name);
        return out;
    });

    m.def(
        "scale_score",
        [](double v, double l, double h, double p_min, double p_max, bool descending) {
            AttributeParams a;
            a.l = l;
            a.h = h;
            a.p_min = p_min;
            a.p_max = p_max;
            a.direction = descending ? Direction::descending : Direction::ascending;
            a.validate();
            return scale_score(v, a);
        },
        py::arg("v"), py::arg("l"), py::arg("h"), py::arg("p_min"), py::arg("p_max"), py::arg("descending") = false);

    m.def(
        "final_transform", [](double raw_sum, py::object config) { return final_transform(raw_sum, scoring_from(config)); },
        py::arg("raw_sum"), py::arg("config") = py::none());

    m.def(
        "score_profile",
        [](py::dict profile, const std::string& description, py::object config) {
            return to_py(breakdown_to_json(total_fcs(profile_from_json(from_py(profile)), description, scoring_from(config))));
        },
        py::arg("profile"), py::arg("description") = "", py::arg("config") = py::none(),
        "Scores a per-100-kcal profile given as {target: value} (optionally nested under 'profile').");

    m.def("default_scoring_config", [] { return to_py(ScoringConfig::defaults().to_json()); });

    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            const auto r = pearson(x, y);
            return py::make_tuple(r.r, r.p);
        },
        py::arg("x"), py::arg("y"));

    m.def(
        "error_stats",
        [](const std::vector<double>& predicted, const std::vector<double>& actual) {
            const auto s = error_stats(predicted, actual);
            py::dict d;
            d["mad"] = s.mad;
            d["median_ad"] = s.median_ad;
            d["mean_difference"] = s.mean_difference;
            d["predicted_sd"] = s.predicted_sd;
            d["actual_sd"] = s.actual_sd;
            return d;
        },
        py::arg("predicted"), py::arg("actual"));

    m.def(
        "ingest",
        [](const std::string& config_path) {
            const auto cfg = PipelineConfig::load(config_path);
            const auto result = cmd_ingest(cfg);
            return result.records.size();
        },
        py::arg("config"));

    m.def(
        "train",
        [](const std::string& config_path, const std::vector<std::string>& targets, std::optional<std::uint64_t> seed) {
            auto cfg = PipelineConfig::load(config_path);
            if (seed) cfg.seed = *seed;
            py::gil_scoped_release release;
            const auto outcome = cmd_train(cfg, keys_from(targets));
            std::vector<std::string> trained;
            for (const auto& [k, model] : outcome.bundle.models) trained.emplace_back(target_name(k));
            return trained;
        },
        py::arg("config"), py::arg("targets") = std::vector<std::string>{}, py::arg("seed") = py::none());

    m.def(
        "predict",
        [](const std::string& config_path, const std::vector<std::string>& descriptions) {
            const auto cfg = PipelineConfig::load(config_path);
            const auto bundle = load_configured_bundle(cfg);
            py::list out;
            for (const auto& d : descriptions) out.append(to_py(prediction_to_json(d, predict_profile(bundle, d))));
            return out;
        },
        py::arg("config"), py::arg("descriptions"));

    m.def(
        "validate",
        [](const std::string& config_path, bool oracle) { return to_py(cmd_validate(PipelineConfig::load(config_path), oracle).to_json()); },
        py::arg("config"), py::arg("oracle") = false);
}
