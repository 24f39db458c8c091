#include "foodscore/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "foodscore/error.hpp"
#include "foodscore/random.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

const std::set<std::string> kModelKeys{"encoder_hidden", "embedding_dim", "head_hidden", "dropout"};

void check_model_keys(const nlohmann::json& j, const std::string& where)
{
    if (!j.is_object()) throw Error(ErrorKind::Config, where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!kModelKeys.contains(k)) throw Error(ErrorKind::Config, "unknown key '" + k + "' in " + where);
    }
}

std::filesystem::path require_path(const PipelineConfig& c, const std::optional<std::filesystem::path>& p, const char* what)
{
    if (!p) throw Error(ErrorKind::Config, std::string("config does not name a ") + what + " file");
    return c.resolve(*p);
}

void check_exists(const std::filesystem::path& p, const std::string& what)
{
    if (!std::filesystem::exists(p)) throw Error(ErrorKind::Config, what + " not found: " + p.string());
}

} // namespace

void Logger::emit(std::string_view level, std::string_view event, const nlohmann::json& fields) const
{
    if (!out_) return;
    nlohmann::ordered_json line{{"level", level}, {"event", event}};
    for (const auto& [k, v] : fields.items()) line[k] = v;
    *out_ << line.dump() << '\n';
    out_->flush();
}

void Logger::info(std::string_view event, const nlohmann::json& fields) const { emit("info", event, fields); }
void Logger::warn(std::string_view event, const nlohmann::json& fields) const { emit("warn", event, fields); }

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const
{
    return p.is_absolute() ? p : (base_dir / p).lexically_normal();
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    PipelineConfig c;
    c.base_dir = base_dir.empty() ? std::filesystem::path(".") : base_dir;
    auto path_of = [](const nlohmann::json& v) { return std::filesystem::path(v.get<std::string>()); };
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "comment") continue;
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "sources") {
                for (const auto& [tag, s] : v.items()) {
                    SourceConfig src;
                    src.tag = parse_source(tag);
                    for (const auto& [sk, sv] : s.items()) {
                        if (sk == "path") src.path = path_of(sv);
                        else if (sk == "schema") src.schema = TableSchema::from_json(sv);
                        else throw Error(ErrorKind::Config, "unknown key '" + sk + "' in source " + tag);
                    }
                    if (src.path.empty()) throw Error(ErrorKind::Config, "source " + tag + " has no path");
                    c.sources.push_back(std::move(src));
                }
            }
            else if (key == "dataset") c.dataset = path_of(v);
            else if (key == "validation_dataset") c.validation_dataset = path_of(v);
            else if (key == "bundle") c.bundle = path_of(v);
            else if (key == "validation_dir") c.validation_dir = path_of(v);
            else if (key == "stop_words") c.stop_words = path_of(v);
            else if (key == "denylist") c.denylist = path_of(v);
            else if (key == "augmentation") c.augmentation = path_of(v);
            else if (key == "augment") c.augment = v.get<bool>();
            else if (key == "holdout_published") c.holdout_published = v.get<bool>();
            else if (key == "heuristics") c.heuristics = path_of(v);
            else if (key == "embedding") {
                for (const auto& [ek, ev] : v.items()) {
                    if (ek == "file") c.embedding_file = path_of(ev);
                    else if (ek == "dimension") c.embedding_dim = ev.get<std::size_t>();
                    else throw Error(ErrorKind::Config, "unknown key '" + ek + "' in embedding");
                }
            }
            else if (key == "scoring_tables") c.scoring_tables = path_of(v);
            else if (key == "scorer") c.scorer_overrides = v;
            else if (key == "featurizer") {
                for (const auto& [fk, fv] : v.items()) {
                    if (fk == "tfidf_max_features") c.featurizer.tfidf_max_features = fv.get<std::size_t>();
                    else throw Error(ErrorKind::Config, "unknown key '" + fk + "' in featurizer");
                }
            }
            else if (key == "training") c.training = TrainConfig::from_json(v);
            else if (key == "model") {
                check_model_keys(v, "model");
                c.model_defaults = v;
            }
            else if (key == "models") {
                for (const auto& [t, mv] : v.items()) {
                    check_model_keys(mv, "models." + t);
                    c.model_overrides[parse_target(t)] = mv;
                }
            }
            else if (key == "registry") c.registry = registry_from_json(v);
            else if (key == "targets") {
                for (const auto& t : v) c.targets.push_back(parse_target(t.get<std::string>()));
            }
            else if (key == "jobs") c.jobs = std::max(1u, v.get<unsigned>());
            else throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("config: ") + e.what());
    }
    if (c.embedding_dim == 0) throw Error(ErrorKind::Config, "embedding dimension must be positive");
    c.training.validate();

    for (const auto& s : c.sources) check_exists(c.resolve(s.path), std::string(source_name(s.tag)) + " table");
    const std::pair<const std::optional<std::filesystem::path>*, const char*> inputs[] = {
        {&c.stop_words, "stop-word list"}, {&c.denylist, "denylist"},        {&c.augmentation, "augmentation rules"},
        {&c.heuristics, "heuristic spec"}, {&c.embedding_file, "embedding file"}, {&c.scoring_tables, "scoring tables"},
    };
    for (const auto& [p, what] : inputs) {
        if (*p) check_exists(c.resolve(**p), what);
    }
    c.scoring();  // surfaces bad scorer settings before any stage runs
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "config file not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

ScoringConfig PipelineConfig::scoring() const
{
    auto base = scoring_tables ? ScoringConfig::load(resolve(*scoring_tables)) : ScoringConfig::defaults();
    return ScoringConfig::from_json(scorer_overrides, std::move(base));
}

ModelConfig PipelineConfig::model_config(TargetKey key, std::size_t input_dim) const
{
    auto merged = ModelConfig{}.to_json();
    for (const auto& e : registry) {
        if (e.key == key) merged["embedding_dim"] = e.embedding_dim;
    }
    merged.update(model_defaults);
    if (auto it = model_overrides.find(key); it != model_overrides.end()) merged.update(it->second);
    merged["input_dim"] = input_dim;
    auto mc = ModelConfig::from_json(merged);
    mc.validate();
    return mc;
}

std::shared_ptr<const EmbeddingProvider> PipelineConfig::make_embedding() const
{
    if (!embedding_file) return std::make_shared<HashedEmbedding>(embedding_dim);
    std::shared_ptr<const FileEmbedding> file = FileEmbedding::load(resolve(*embedding_file), embedding_dim);
    return std::make_shared<FallbackEmbedding>(std::move(file), embedding_dim);
}

TableSchema infer_schema(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "input file not found: " + path.string());
    const auto text = read_file(path);
    if (trim(text).empty()) throw Error(ErrorKind::EmptyFile, path.string() + " is empty");
    const auto newline = text.find('\n');
    const auto header = split_delimited(std::string_view(text).substr(0, newline)).front();
    TableSchema schema;
    bool has_description = false;
    for (const auto& raw : header) {
        const auto h = std::string(trim(raw));
        if (h == "description") has_description = true;
        else if (h == "category") schema.category_column = h;
        else if (h == kPublishedFcsField || find_target(h)) schema.value_columns.emplace_back(h, h);
    }
    if (!has_description) schema.description_column.reset();
    return schema;
}

IngestResult cmd_ingest(const PipelineConfig& config, const Logger& log)
{
    if (config.sources.empty()) throw Error(ErrorKind::Config, "config lists no input sources");
    std::vector<RawTable> tables;
    for (const auto& s : config.sources) {
        const auto path = config.resolve(s.path);
        tables.push_back(parse_table(path, s.tag, s.schema ? *s.schema : infer_schema(path)));
        log.info("ingest.table", {{"source", source_name(s.tag)}, {"rows", tables.back().rows.size()}});
    }
    const auto denylist = read_word_list(require_path(config, config.denylist, "denylist"));
    auto result = run_ingest(tables, denylist);
    const auto& a = result.audit;
    log.info("ingest.audit", {{"joined", a.joined},
                              {"flavonoid_imputed", a.flavonoid_imputed},
                              {"dropped_missing", a.dropped_missing},
                              {"dropped_negative", a.dropped_negative},
                              {"rejected_nonfood", a.rejected_nonfood},
                              {"dropped_low_energy", a.dropped_low_energy},
                              {"kept", a.kept}});
    const auto out = config.resolve(config.dataset);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    write_dataset(out, result.records);
    log.info("ingest.written", {{"path", out.string()}, {"records", result.records.size()}});
    return result;
}

TrainOutcome train_bundle(const PipelineConfig& config, const std::vector<FoodRecord>& input, const std::vector<TargetKey>& requested,
                          const Logger& log)
{
    std::vector<FoodRecord> base;
    for (const auto& r : input) {
        if (!(config.holdout_published && r.published_fcs)) base.push_back(r);
    }
    if (base.size() != input.size()) log.info("train.holdout", {{"excluded", input.size() - base.size()}, {"kept", base.size()}});
    std::vector<FoodRecord> records = base;
    if (config.augment && config.augmentation) {
        auto rules = AugmentationRules::load(config.resolve(*config.augmentation));
        rules.seed = derive_seed(config.seed, 0xA7);
        records = augment_dataset(base, rules);
        log.info("train.augmented", {{"original", base.size()}, {"total", records.size()}});
    }
    if (records.empty()) throw Error(ErrorKind::EmptyDataset, "training dataset is empty");

    std::vector<TargetKey> targets = requested.empty() ? config.targets : requested;
    if (targets.empty()) {
        for (const auto& info : target_registry()) targets.push_back(info.key);
    }

    const auto stop_words = config.stop_words ? read_word_list(config.resolve(*config.stop_words)) : std::set<std::string>{};
    const auto heuristics = HeuristicSpec::load(require_path(config, config.heuristics, "heuristic spec"));
    std::vector<std::string> corpus;
    for (const auto& r : records) corpus.push_back(r.description);

    FeaturizerConfig fcfg = config.featurizer;
    fcfg.embedding_dim = config.embedding_dim;
    auto featurizer = std::make_shared<const Featurizer>(Featurizer::fit(corpus, config.make_embedding(), heuristics, stop_words, fcfg));
    std::vector<std::vector<double>> shared;
    shared.reserve(records.size());
    for (const auto& r : records) shared.push_back(featurizer->shared_segment(r.description));
    log.info("train.featurized", {{"records", records.size()}, {"tfidf_terms", featurizer->tfidf().terms.size()}});

    TrainOutcome outcome;
    outcome.bundle.featurizer = featurizer;
    outcome.bundle.seed = config.seed;
    for (const auto& r : records) outcome.bundle.train_description_hashes.push_back(description_hash(r.description));
    std::sort(outcome.bundle.train_description_hashes.begin(), outcome.bundle.train_description_hashes.end());
    outcome.bundle.train_description_hashes.erase(
        std::unique(outcome.bundle.train_description_hashes.begin(), outcome.bundle.train_description_hashes.end()),
        outcome.bundle.train_description_hashes.end());

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t t = next++; t < targets.size(); t = next++) {
            const auto key = targets[t];
            try {
                const auto dim = featurizer->segment_sizes(key).total();
                Eigen::MatrixXd rows(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(dim));
                std::vector<double> y(records.size());
                for (std::size_t i = 0; i < records.size(); ++i) {
                    const auto h = featurizer->featurize(shared[i], records[i].description, key);
                    rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(h.values.data(), static_cast<Eigen::Index>(dim));
                    y[i] = records[i].profile.require(key);
                }
                TrainConfig tc = config.training;
                tc.seed = derive_seed(config.seed, 1000 + index_of(key));
                auto model = train_target(rows, y, key, config.model_config(key, dim), tc, featurizer->fingerprint(key));
                std::lock_guard lock(mu);
                log.info("train.target", {{"target", target_name(key)},
                                          {"r2", model.report.test.r2_defined ? nlohmann::json(model.report.test.r2) : nlohmann::json(nullptr)},
                                          {"rmse", model.report.test.rmse},
                                          {"mae", model.report.test.mae},
                                          {"epochs", model.report.epochs_run}});
                outcome.bundle.models.emplace(key, std::move(model));
            } catch (const Error& e) {
                std::lock_guard lock(mu);
                if (e.kind() == ErrorKind::TooFewRows) {
                    log.warn("train.skipped", {{"target", target_name(key)}, {"reason", e.what()}});
                    outcome.skipped.emplace_back(target_name(key));
                } else if (!failure) {
                    failure = std::current_exception();
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::min<unsigned>(config.jobs, static_cast<unsigned>(std::max<std::size_t>(1, targets.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::sort(outcome.skipped.begin(), outcome.skipped.end());
    return outcome;
}

TrainOutcome cmd_train(const PipelineConfig& config, const std::vector<TargetKey>& targets, const Logger& log)
{
    const auto dataset = config.resolve(config.dataset);
    auto outcome = train_bundle(config, read_dataset(dataset), targets, log);
    const auto dir = config.resolve(config.bundle);
    save_bundle(outcome.bundle, dir);
    log.info("train.written", {{"path", dir.string()}, {"models", outcome.bundle.models.size()}});
    return outcome;
}

ModelBundle load_configured_bundle(const PipelineConfig& config)
{
    return load_bundle(config.resolve(config.bundle), config.make_embedding());
}

nlohmann::ordered_json prediction_to_json(std::string_view description, const NutrientProfile& profile)
{
    nlohmann::ordered_json j;
    j["description"] = description;
    const auto p = profile_to_json(profile);
    j["basis"] = p.at("basis");
    j["profile"] = p.at("profile");
    return j;
}

ValidationReport cmd_validate(const PipelineConfig& config, bool oracle, const Logger& log)
{
    const auto dataset_path = config.resolve(config.validation_dataset.value_or(config.dataset));
    const auto dataset = read_dataset(dataset_path);
    const auto scoring = config.scoring();
    ValidationOptions options;
    ValidationReport report;
    if (oracle) {
        report = run_validation(dataset, [](const FoodRecord& r) { return r.profile; }, scoring, options);
    } else {
        const auto bundle = load_configured_bundle(config);
        bundle.require_scorer_targets();
        options.seen = [&bundle](std::string_view d) { return bundle.saw_description(d); };
        report = run_validation(dataset, [&bundle](const FoodRecord& r) { return predict_profile(bundle, r.description); }, scoring,
                                options);
    }
    const auto dir = config.resolve(config.validation_dir);
    write_validation_outputs(report, dir);
    log.info("validate.report", {{"n", report.n},
                                 {"pearson_r", report.correlation ? nlohmann::json(report.correlation->r) : nlohmann::json(nullptr)},
                                 {"mad", report.errors.mad},
                                 {"median_ad", report.errors.median_ad},
                                 {"excluded_unlabeled", report.excluded_unlabeled},
                                 {"training_overlap", report.training_overlap},
                                 {"path", dir.string()}});
    return report;
}

} // namespace foodscore
