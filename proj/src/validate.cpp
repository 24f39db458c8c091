#include "foodscore/validate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "foodscore/error.hpp"

namespace foodscore {
namespace {

double mean_of(std::span<const double> v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean)
{
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void require_pairs(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw Error(ErrorKind::ShapeMismatch, "predicted and actual differ in length");
    if (a.empty()) throw Error(ErrorKind::EmptyDataset, "no pairs to compare");
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string num(double v)
{
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

nlohmann::ordered_json item_to_json(const ValidationItem& i)
{
    nlohmann::ordered_json j{{"food_code", i.food_code}, {"description", i.description}};
    j["category"] = i.category ? nlohmann::ordered_json(*i.category) : nlohmann::ordered_json(nullptr);
    j["actual"] = i.actual;
    j["predicted"] = i.predicted;
    j["abs_diff"] = i.abs_diff;
    j["seen_in_training"] = i.seen_in_training;
    return j;
}

ValidationItem item_from_json(const nlohmann::json& j)
{
    ValidationItem i;
    i.food_code = j.at("food_code").get<std::string>();
    i.description = j.at("description").get<std::string>();
    if (!j.at("category").is_null()) i.category = j.at("category").get<std::string>();
    i.actual = j.at("actual").get<double>();
    i.predicted = j.at("predicted").get<double>();
    i.abs_diff = j.at("abs_diff").get<double>();
    i.seen_in_training = j.at("seen_in_training").get<bool>();
    return i;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
    out << text;
}

} // namespace

PearsonResult pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw Error(ErrorKind::ShapeMismatch, "pearson inputs differ in length");
    if (x.size() < 3) throw Error(ErrorKind::TooFewRows, "pearson needs at least 3 pairs");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::ConstantInput, "pearson input is constant");
    PearsonResult res;
    res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(x.size() - 2);
    const double denom = 1.0 - res.r * res.r;
    if (denom <= 0.0) {
        res.p = 0.0;
    } else {
        const double t = std::abs(res.r) * std::sqrt(df / denom);
        res.p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
    }
    return res;
}

ErrorStats error_stats(std::span<const double> predicted, std::span<const double> actual)
{
    require_pairs(predicted, actual);
    const auto n = predicted.size();
    std::vector<double> abs_diff(n);
    double diff_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        abs_diff[i] = std::abs(actual[i] - predicted[i]);
        diff_sum += actual[i] - predicted[i];
    }
    ErrorStats s;
    s.mad = mean_of(abs_diff);
    std::sort(abs_diff.begin(), abs_diff.end());
    s.median_ad = n % 2 == 1 ? abs_diff[n / 2] : 0.5 * (abs_diff[n / 2 - 1] + abs_diff[n / 2]);
    s.mean_difference = diff_sum / static_cast<double>(n);
    s.predicted_mean = mean_of(predicted);
    s.actual_mean = mean_of(actual);
    s.predicted_sd = sample_sd(predicted, s.predicted_mean);
    s.actual_sd = sample_sd(actual, s.actual_mean);
    return s;
}

std::vector<double> threshold_rates(std::span<const double> predicted, std::span<const double> actual,
                                    std::span<const double> thresholds)
{
    require_pairs(predicted, actual);
    std::vector<double> out;
    for (double tau : thresholds) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) hits += std::abs(actual[i] - predicted[i]) <= tau ? 1 : 0;
        out.push_back(static_cast<double>(hits) / static_cast<double>(predicted.size()));
    }
    return out;
}

std::vector<CategoryError> category_breakdown(const std::vector<std::optional<std::string>>& categories,
                                              std::span<const double> predicted, std::span<const double> actual)
{
    require_pairs(predicted, actual);
    if (categories.size() != predicted.size()) throw Error(ErrorKind::ShapeMismatch, "category list length differs");
    std::map<std::string, std::pair<std::size_t, double>> acc;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        auto& [count, sum] = acc[categories[i].value_or(std::string(kUncategorized))];
        ++count;
        sum += std::abs(actual[i] - predicted[i]);
    }
    std::vector<CategoryError> out;
    for (const auto& [name, v] : acc) out.push_back({name, v.first, v.second / static_cast<double>(v.first)});
    std::stable_sort(out.begin(), out.end(), [](const CategoryError& a, const CategoryError& b) { return a.mad > b.mad; });
    return out;
}

ValidationReport run_validation(const std::vector<FoodRecord>& dataset, const ProfileSource& profiles, const ScoringConfig& scoring,
                                const ValidationOptions& options)
{
    ValidationReport report;
    report.thresholds = options.thresholds;
    for (const auto& rec : dataset) {
        if (!rec.published_fcs) {
            ++report.excluded_unlabeled;
            continue;
        }
        ValidationItem item;
        item.food_code = rec.food_code;
        item.description = rec.description;
        item.category = rec.category;
        item.actual = *rec.published_fcs;
        item.predicted = total_fcs(profiles(rec), rec.description, scoring).final_score;
        item.abs_diff = std::abs(item.actual - item.predicted);
        item.seen_in_training = options.seen && options.seen(rec.description);
        report.training_overlap += item.seen_in_training ? 1 : 0;
        report.items.push_back(std::move(item));
    }
    if (report.items.empty()) throw Error(ErrorKind::EmptyDataset, "no records carry a published score");
    report.n = report.items.size();

    std::vector<double> predicted, actual;
    std::vector<std::optional<std::string>> categories;
    for (const auto& i : report.items) {
        predicted.push_back(i.predicted);
        actual.push_back(i.actual);
        categories.push_back(i.category);
    }
    try {
        report.correlation = pearson(predicted, actual);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ConstantInput && e.kind() != ErrorKind::TooFewRows) throw;
    }
    report.errors = error_stats(predicted, actual);
    report.within = threshold_rates(predicted, actual, options.thresholds);
    report.categories = category_breakdown(categories, predicted, actual);

    report.worst = report.items;
    std::stable_sort(report.worst.begin(), report.worst.end(),
                     [](const ValidationItem& a, const ValidationItem& b) { return a.abs_diff > b.abs_diff; });
    report.worst.resize(std::min(options.worst_k, report.worst.size()));
    return report;
}

nlohmann::json ValidationReport::to_json() const
{
    nlohmann::ordered_json j;
    j["n"] = n;
    j["excluded_unlabeled"] = excluded_unlabeled;
    j["training_overlap"] = training_overlap;
    if (correlation) {
        j["pearson_r"] = correlation->r;
        j["pearson_p"] = correlation->p;
    } else {
        j["pearson_r"] = nullptr;
        j["pearson_p"] = nullptr;
    }
    j["mad"] = errors.mad;
    j["median_ad"] = errors.median_ad;
    j["mean_difference"] = errors.mean_difference;
    j["predicted_mean"] = errors.predicted_mean;
    j["predicted_sd"] = errors.predicted_sd;
    j["actual_mean"] = errors.actual_mean;
    j["actual_sd"] = errors.actual_sd;
    auto within_json = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < thresholds.size(); ++i) within_json.push_back({{"threshold", thresholds[i]}, {"fraction", within[i]}});
    j["within"] = within_json;
    auto cats = nlohmann::ordered_json::array();
    for (const auto& c : categories) cats.push_back({{"category", c.category}, {"n", c.n}, {"mad", c.mad}});
    j["categories"] = cats;
    auto worst_json = nlohmann::ordered_json::array();
    for (const auto& i : worst) worst_json.push_back(item_to_json(i));
    j["worst"] = worst_json;
    auto items_json = nlohmann::ordered_json::array();
    for (const auto& i : items) items_json.push_back(item_to_json(i));
    j["items"] = items_json;
    return j;
}

ValidationReport ValidationReport::from_json(const nlohmann::json& j)
{
    ValidationReport r;
    try {
        r.n = j.at("n").get<std::size_t>();
        r.excluded_unlabeled = j.at("excluded_unlabeled").get<std::size_t>();
        r.training_overlap = j.at("training_overlap").get<std::size_t>();
        if (!j.at("pearson_r").is_null()) r.correlation = PearsonResult{j.at("pearson_r").get<double>(), j.at("pearson_p").get<double>()};
        r.errors.mad = j.at("mad").get<double>();
        r.errors.median_ad = j.at("median_ad").get<double>();
        r.errors.mean_difference = j.at("mean_difference").get<double>();
        r.errors.predicted_mean = j.at("predicted_mean").get<double>();
        r.errors.predicted_sd = j.at("predicted_sd").get<double>();
        r.errors.actual_mean = j.at("actual_mean").get<double>();
        r.errors.actual_sd = j.at("actual_sd").get<double>();
        for (const auto& w : j.at("within")) {
            r.thresholds.push_back(w.at("threshold").get<double>());
            r.within.push_back(w.at("fraction").get<double>());
        }
        for (const auto& c : j.at("categories")) r.categories.push_back({c.at("category").get<std::string>(), c.at("n").get<std::size_t>(), c.at("mad").get<double>()});
        for (const auto& i : j.at("worst")) r.worst.push_back(item_from_json(i));
        for (const auto& i : j.at("items")) r.items.push_back(item_from_json(i));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("validation report: ") + e.what());
    }
    return r;
}

bool ValidationReport::operator==(const ValidationReport& o) const
{
    const bool corr_eq = correlation.has_value() == o.correlation.has_value() &&
                         (!correlation || (correlation->r == o.correlation->r && correlation->p == o.correlation->p));
    return n == o.n && excluded_unlabeled == o.excluded_unlabeled && training_overlap == o.training_overlap && corr_eq &&
           errors == o.errors && thresholds == o.thresholds && within == o.within && categories == o.categories && worst == o.worst &&
           items == o.items;
}

std::string items_csv(const ValidationReport& report)
{
    std::ostringstream out;
    out << "food_code,description,category,actual,predicted,abs_diff\n";
    for (const auto& i : report.items) {
        out << csv_field(i.food_code) << ',' << csv_field(i.description) << ',' << csv_field(i.category.value_or("")) << ','
            << num(i.actual) << ',' << num(i.predicted) << ',' << num(i.abs_diff) << '\n';
    }
    return out.str();
}

std::string scatter_csv(const ValidationReport& report)
{
    std::ostringstream out;
    out << "actual,predicted\n";
    for (const auto& i : report.items) out << num(i.actual) << ',' << num(i.predicted) << '\n';
    return out.str();
}

void write_validation_outputs(const ValidationReport& report, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", report.to_json().dump(2) + "\n");
    write_text(dir / "items.csv", items_csv(report));
    write_text(dir / "scatter.csv", scatter_csv(report));
}

} // namespace foodscore
