// Prints one PASS/FAIL/NOT RUN line per acceptance criterion; exits nonzero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "fcs_cases.hpp"
#include "fcs_oracle.hpp"
#include "foodscore/error.hpp"
#include "foodscore/pipeline.hpp"
#include "foodscore/scorer.hpp"
#include "foodscore/hashing.hpp"
#include "foodscore/text.hpp"
#include "foodscore/tfidf.hpp"
#include "foodscore/trainer.hpp"
#include "foodscore/validate.hpp"
#include "gradcheck.hpp"
#include "support.hpp"
#include "tfidf_oracle.hpp"

using namespace foodscore;
using TK = TargetKey;

namespace {

constexpr double kDomainTol = 1e-9;
constexpr double kOracleSeconds = 1.0;
constexpr double kGradTol = 1e-4;
constexpr std::size_t kGradCoords = 120;
constexpr double kGradSeconds = 10.0;
constexpr double kTrainR2 = 0.9;
constexpr int kTrainEpochs = 200;
constexpr double kTrainSeconds = 60.0;
constexpr double kTfidfTol = 1e-12;
constexpr double kPearsonTol = 1e-12;
constexpr double kDeterminismSeconds = 120.0;
constexpr int kMonotoneProfiles = 1000;

enum class Status { pass, fail, not_run };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

NutrientProfile random_profile(Rng& rng)
{
    auto p = fs_test::zero_profile(rng.uniform(1.0, 4.0));
    for (const auto& t : target_registry()) {
        if (t.key == TK::nova_class) continue;
        double scale = 5.0;
        if (t.unit == Unit::mg) scale = 300.0;
        if (t.unit == Unit::mcg) scale = 400.0;
        if (rng.uniform() < 0.7) p.set(t.key, rng.uniform(0.0, scale));
    }
    p.set(TK::fried_flag, rng.uniform() < 0.2 ? 1.0 : 0.0);
    p.set(TK::fermented_pct, rng.uniform(0.0, 100.0));
    return p;
}

Outcome c1_oracle()
{
    const auto start = Clock::now();
    const auto cfg = ScoringConfig::defaults();
    const auto cases = fcs_cases::hand_cases();
    double worst = 0.0;
    std::size_t score_mismatch = 0;
    for (const auto& k : cases) {
        const auto got = total_fcs(k.profile, k.description, cfg);
        const auto want = fcs_oracle::evaluate(fcs_cases::oracle_values(k.profile), k.description);
        for (std::size_t i = 0; i < 9; ++i) worst = std::max(worst, std::fabs(got.domains[i] - want.d[i]));
        score_mismatch += got.final_score != want.final_score;
    }
    const double secs = seconds_since(start);
    return verdict(cases.size() >= 20 && worst <= kDomainTol && score_mismatch == 0 && secs < kOracleSeconds,
                   std::to_string(cases.size()) + " profiles, max |dD| " + fmt(worst) + ", final mismatches " +
                       std::to_string(score_mismatch) + ", " + fmt(secs) + " s");
}

Outcome c2_fixed_points()
{
    const auto cfg = ScoringConfig::defaults();
    const int a = final_transform(29.94, cfg), b = final_transform(35.0, cfg), c = final_transform(-12.43, cfg),
              d = final_transform(-20.0, cfg), e = final_transform(8.755, cfg);
    const int z = total_fcs(fs_test::zero_profile(), "water", cfg).final_score;
    return verdict(a == 100 && b == 100 && c == 1 && d == 1 && e == 51 && z == 42,
                   "29.94->" + std::to_string(a) + " 35->" + std::to_string(b) + " -12.43->" + std::to_string(c) + " -20->" +
                       std::to_string(d) + " 8.755->" + std::to_string(e) + " zero profile->" + std::to_string(z));
}

Outcome c3_gradients()
{
    const auto start = Clock::now();
    std::vector<ModelConfig> nets(3);
    nets[0].input_dim = 10, nets[0].encoder_hidden = {8}, nets[0].embedding_dim = 4, nets[0].head_hidden = {};
    nets[1].input_dim = 7, nets[1].encoder_hidden = {12, 9}, nets[1].embedding_dim = 6, nets[1].head_hidden = {5, 3};
    nets[2].input_dim = 16, nets[2].encoder_hidden = {20}, nets[2].embedding_dim = 10, nets[2].head_hidden = {6};
    double worst = 0.0;
    std::size_t min_coords = SIZE_MAX;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        const auto r = gradcheck::run(nets[i], 101 + i, kGradCoords);
        worst = std::max(worst, r.max_rel_error);
        min_coords = std::min(min_coords, r.coordinates);
    }
    const double secs = seconds_since(start);
    return verdict(worst < kGradTol && min_coords >= 100 && secs < kGradSeconds,
                   "3 nets, " + std::to_string(min_coords) + " coords each, max rel err " + fmt(worst) + ", " + fmt(secs) + " s");
}

Outcome c4_training()
{
    const auto start = Clock::now();
    Rng rng(2024);
    const std::size_t n = 200, d = 10;
    std::vector<double> w(d);
    for (auto& v : w) v = rng.uniform(-2.0, 2.0);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
            s += w[j] * rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        y.push_back(s + 0.01 * rng.normal());
    }
    TrainConfig tc;
    tc.max_epochs = kTrainEpochs;
    tc.seed = 5;
    const auto model = train_target(rows, y, TK::fiber_g, ModelConfig{}, tc);
    const double r2 = model.report.test.r2;

    EarlyStopping es;
    int stopped_at = -1;
    for (int epoch = 0; epoch < 100 && stopped_at < 0; ++epoch) {
        if (es.update(epoch == 0 ? 1.0 : 1.0 + 1e-3 * epoch).stop) stopped_at = epoch;
    }
    const double secs = seconds_since(start);
    return verdict(r2 >= kTrainR2 && model.report.epochs_run <= kTrainEpochs && stopped_at == 16 && secs < kTrainSeconds,
                   "test R2 " + fmt(r2) + " after " + std::to_string(model.report.epochs_run) + " epochs (best " +
                       std::to_string(model.report.best_epoch) + "), plateau stop at epoch " + std::to_string(stopped_at) + ", " +
                       fmt(secs) + " s");
}

double tfidf_gap(const std::vector<std::string>& corpus, std::size_t cap, const std::set<std::string>& stop,
                 const std::vector<std::string>& probes, std::size_t& vocab_size, double& max_norm_error)
{
    const auto model = fit_tfidf(corpus, cap, stop);
    const auto vocab = tfidf_oracle::fit(corpus, cap, stop);
    vocab_size = model.size();
    if (model.terms != vocab.terms) return INFINITY;
    double gap = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) gap = std::max(gap, std::fabs(model.idf[i] - vocab.idf.at(model.terms[i])));
    for (const auto& text : probes) {
        const auto got = transform_tfidf(model, text);
        const auto want = tfidf_oracle::transform(vocab, text, stop);
        double norm = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            gap = std::max(gap, std::fabs(got[i] - want.at(model.terms[i])));
            norm += got[i] * got[i];
        }
        if (norm > 0.0) max_norm_error = std::max(max_norm_error, std::fabs(std::sqrt(norm) - 1.0));
    }
    return gap;
}

Outcome c5_tfidf()
{
    const std::set<std::string> stop{"the", "and", "with", "of", "a", "in"};
    std::size_t small_vocab = 0, big_vocab = 0;
    double norm_err = 0.0;
    const double g1 = tfidf_gap({"Grilled chicken with rice", "chicken and rice soup", "the rice pudding", "Apple pie with cream",
                                 "apple and the cream of rice"},
                                1024, stop, {"chicken rice", "rice rice soup", "the apple of my eye", "pudding with cream cream"}, small_vocab,
                                norm_err);
    // five long documents with more than 1024 distinct unigrams and bigrams
    Rng rng(77);
    std::vector<std::string> corpus(5);
    for (auto& doc : corpus) {
        for (int i = 0; i < 260; ++i) doc += "w" + std::to_string(rng.below(400)) + (rng.below(9) == 0 ? " the " : " ");
    }
    const double g2 = tfidf_gap(corpus, 1024, stop, {corpus[0].substr(0, 200), "w1 w2 w3 w1", "w399 the w5"}, big_vocab, norm_err);
    const bool ok = g1 <= kTfidfTol && g2 <= kTfidfTol && big_vocab == 1024 && norm_err <= kTfidfTol;
    return verdict(ok, "max gap " + fmt(std::max(g1, g2)) + ", vocab " + std::to_string(small_vocab) + " and " + std::to_string(big_vocab) +
                           " (cap 1024), max |norm-1| " + fmt(norm_err));
}

Outcome c6_metrics()
{
    const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    const double r_pos = pearson(x, x).r, r_neg = pearson(x, neg).r;
    const std::vector<double> a{10, 20}, p{12, 16};
    const auto s = error_stats(p, a);
    const std::vector<double> z{0, 0, 0}, d{10, 20, 30}, tau{15, 25};
    const auto rates = threshold_rates(d, z, tau);
    const std::vector<double> edge_a{50}, edge_p{35}, edge_tau{15};
    const double edge = threshold_rates(edge_p, edge_a, edge_tau)[0];
    const bool ok = std::fabs(r_pos - 1.0) <= kPearsonTol && std::fabs(r_neg + 1.0) <= kPearsonTol && s.mad == 3.0 && s.median_ad == 3.0 &&
                    s.mean_difference == 1.0 && rates[0] == 1.0 / 3.0 && rates[1] == 2.0 / 3.0 && edge == 1.0;
    return verdict(ok, "r(x,x) " + fmt(r_pos) + ", r(x,-x) " + fmt(r_neg) + ", MAD/median/bias " + fmt(s.mad) + "/" + fmt(s.median_ad) + "/" +
                           fmt(s.mean_difference) + ", within15/25 " + fmt(rates[0]) + "/" + fmt(rates[1]) + ", |d|=15 within " + fmt(edge));
}

std::map<std::string, std::string> tree_hashes(const std::filesystem::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = sha256_hex(fs_test::read_text(e.path()));
    }
    return out;
}

Outcome c7_determinism()
{
    const auto start = Clock::now();
    std::map<std::string, std::string> hashes[2];
    for (int run = 0; run < 2; ++run) {
        fs_test::TempDir dir("accept");
        const auto cfg = fs_test::synthetic_config(dir.path());
        for (const char* cmd : {"ingest", "train", "validate"}) {
            const auto r = fs_test::run_cli(std::string(cmd) + " --config " + fs_test::quoted(cfg), dir.path());
            if (r.exit_code != 0) return verdict(false, std::string(cmd) + " exited " + std::to_string(r.exit_code));
        }
        hashes[run] = tree_hashes(dir / "out");
    }
    const double secs = seconds_since(start);
    std::size_t models = 0;
    for (const auto& [name, h] : hashes[0]) models += name.ends_with(".fsm");
    const bool has_report = hashes[0].contains("validation/report.json");
    return verdict(hashes[0] == hashes[1] && models > 0 && has_report && secs < kDeterminismSeconds,
                   std::to_string(hashes[0].size()) + " files (" + std::to_string(models) + " models) " +
                       (hashes[0] == hashes[1] ? "identical" : "differ") + ", " + fmt(secs) + " s");
}

Outcome c8_monotonicity()
{
    const auto cfg = ScoringConfig::defaults();
    Rng rng(8);
    int fiber_bad = 0, sodium_bad = 0;
    std::string example;
    for (int i = 0; i < kMonotoneProfiles; ++i) {
        auto p = random_profile(rng);
        const int base = total_fcs(p, "food", cfg).final_score;
        auto f = p;
        f.set(TK::fiber_g, p.get(TK::fiber_g) + rng.uniform(0.0, 10.0));
        if (total_fcs(f, "food", cfg).final_score < base) ++fiber_bad;
        auto s = p;
        s.set(TK::sodium_mg, p.get(TK::sodium_mg) + rng.uniform(0.0, 600.0));
        const int after = total_fcs(s, "food", cfg).final_score;
        if (after > base) {
            if (sodium_bad++ == 0) {
                example = "e.g. sodium " + fmt(p.get(TK::sodium_mg)) + "->" + fmt(s.get(TK::sodium_mg)) + " mg with potassium " +
                          fmt(p.get(TK::potassium_mg)) + " mg: " + std::to_string(base) + "->" + std::to_string(after);
            }
        }
    }
    return verdict(fiber_bad == 0 && sodium_bad == 0, std::to_string(kMonotoneProfiles) + " profiles, fiber violations " +
                                                          std::to_string(fiber_bad) + ", sodium violations " + std::to_string(sodium_bad) +
                                                          (example.empty() ? "" : "; " + example));
}

double median_r2(const std::string& csv)
{
    std::vector<double> r2;
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::stringstream ls(line);
        std::string target, unit, value;
        std::getline(ls, target, ',');
        std::getline(ls, unit, ',');
        std::getline(ls, value, ',');
        if (!value.empty() && value != "nan" && value != "NA") r2.push_back(std::stod(value));
    }
    if (r2.empty()) return NAN;
    std::sort(r2.begin(), r2.end());
    const auto m = r2.size() / 2;
    return r2.size() % 2 ? r2[m] : (r2[m - 1] + r2[m]) / 2.0;
}

Outcome c9_paper_numbers()
{
    const char* env = std::getenv("FOODSCORE_PAPER_CONFIG");
    if (!env || !*env) return {Status::not_run, "set FOODSCORE_PAPER_CONFIG to a config over the FNDDS-derived corpus"};
    const std::filesystem::path config = env;
    const auto cfg = PipelineConfig::load(config);
    const auto scratch = std::filesystem::temp_directory_path();
    if (!std::filesystem::exists(cfg.resolve(cfg.bundle) / "index.json")) {
        for (const char* cmd : {"ingest", "train"}) {
            const auto r = fs_test::run_cli(std::string(cmd) + " --config " + fs_test::quoted(config), scratch);
            if (r.exit_code != 0) return verdict(false, std::string(cmd) + " exited " + std::to_string(r.exit_code));
        }
    }
    const auto report = cmd_validate(cfg, false);
    const double r = report.correlation ? report.correlation->r : NAN;
    const double mad = report.errors.mad;
    double within15 = NAN;
    for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
        if (report.thresholds[i] == 15.0) within15 = report.within[i];
    }
    const double med = median_r2(fs_test::read_text(cfg.resolve(cfg.bundle) / "metrics.csv"));
    const bool ok = std::fabs(r - 0.77) <= 0.05 && std::fabs(mad - 14.0) <= 2.0 && std::fabs(100.0 * within15 - 64.6) <= 5.0 &&
                    std::fabs(med - 0.81) <= 0.05;
    return verdict(ok, "n " + std::to_string(report.n) + ", r " + fmt(r) + ", MAD " + fmt(mad) + ", within15 " + fmt(100.0 * within15) +
                           "%, median R2 " + fmt(med));
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 scorer oracle equivalence", c1_oracle},       {"2 final-transform fixed points", c2_fixed_points},
        {"3 gradient correctness", c3_gradients},         {"4 training sanity", c4_training},
        {"5 tf-idf oracle", c5_tfidf},                    {"6 metric correctness", c6_metrics},
        {"7 determinism", c7_determinism},                {"8 monotonicity", c8_monotonicity},
        {"9 paper-number reproduction", c9_paper_numbers},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "NOT RUN";
        failures += o.status == Status::fail;
        std::cout << tag << "  " << name << "  (" << o.detail << ")" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
