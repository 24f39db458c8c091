#include "foodscore/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "foodscore/error.hpp"
#include "foodscore/hashing.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

std::optional<double> parse_number(std::string_view cell)
{
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name, SourceTag source)
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    throw Error(ErrorKind::MissingColumn, "column '" + name + "' not found in " + std::string(source_name(source)) + " table");
}

void validate_field(const std::string& field)
{
    if (field == kPublishedFcsField) return;
    (void)parse_target(field);
}

void set_field(FoodRecord& record, const std::string& field, double value)
{
    if (field == kPublishedFcsField) {
        const double rounded = std::round(value);
        if (rounded < 1.0 || rounded > 100.0) {
            throw Error(ErrorKind::Parse, "published_fcs " + std::to_string(value) + " outside [1, 100] for " + record.food_code);
        }
        record.published_fcs = static_cast<int>(rounded);
        return;
    }
    const auto key = parse_target(field);
    if (!record.profile.has(key)) record.profile.set(key, value);
}

} // namespace

std::string_view source_name(SourceTag tag) noexcept
{
    switch (tag) {
    case SourceTag::nutrients: return "nutrients";
    case SourceTag::food_patterns: return "food_patterns";
    case SourceTag::flavonoids: return "flavonoids";
    case SourceTag::published_scores: return "published_scores";
    }
    return "?";
}

SourceTag parse_source(std::string_view name)
{
    for (auto tag : {SourceTag::nutrients, SourceTag::food_patterns, SourceTag::flavonoids, SourceTag::published_scores}) {
        if (source_name(tag) == name) return tag;
    }
    throw Error(ErrorKind::Config, "unknown source tag '" + std::string(name) + "'");
}

TableSchema TableSchema::from_json(const nlohmann::json& j)
{
    TableSchema schema;
    for (const auto& [key, value] : j.items()) {
        if (key == "code_column") {
            schema.code_column = value.get<std::string>();
        } else if (key == "description_column") {
            schema.description_column = value.is_null() ? std::nullopt : std::optional(value.get<std::string>());
        } else if (key == "category_column") {
            schema.category_column = value.is_null() ? std::nullopt : std::optional(value.get<std::string>());
        } else if (key == "columns") {
            for (const auto& [header, field] : value.items()) {
                schema.value_columns.emplace_back(header, field.get<std::string>());
            }
        } else {
            throw Error(ErrorKind::Config, "unknown schema key '" + key + "'");
        }
    }
    for (const auto& [header, field] : schema.value_columns) validate_field(field);
    return schema;
}

std::vector<std::vector<std::string>> split_delimited(std::string_view text)
{
    const auto first_newline = text.find('\n');
    const auto header_line = text.substr(0, first_newline);
    const char delim = header_line.find('\t') != std::string_view::npos ? '\t' : ',';

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool row_has_content = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        if (c == '"' && cell.empty()) {
            quoted = true;
            row_has_content = true;
        } else if (c == delim) {
            row.push_back(std::move(cell));
            cell.clear();
            row_has_content = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (row_has_content || !cell.empty()) {
                row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            row_has_content = false;
        } else {
            cell.push_back(c);
            row_has_content = true;
        }
    }
    if (row_has_content || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

RawTable parse_table_text(std::string_view text, SourceTag source, const TableSchema& schema)
{
    if (trim(text).empty()) throw Error(ErrorKind::EmptyFile, std::string(source_name(source)) + " table is empty");
    auto rows = split_delimited(text);
    const auto& header = rows.front();

    const auto code_col = column_index(header, schema.code_column, source);
    std::optional<std::size_t> desc_col;
    if (schema.description_column) desc_col = column_index(header, *schema.description_column, source);
    std::optional<std::size_t> cat_col;
    if (schema.category_column) cat_col = column_index(header, *schema.category_column, source);
    std::vector<std::size_t> value_cols;
    RawTable table;
    table.source = source;
    for (const auto& [name, field] : schema.value_columns) {
        validate_field(field);
        value_cols.push_back(column_index(header, name, source));
        table.fields.push_back(field);
    }

    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        auto cell = [&](std::size_t c) -> std::string_view { return c < cells.size() ? std::string_view(cells[c]) : std::string_view{}; };
        RawRow row;
        row.food_code = std::string(trim(cell(code_col)));
        if (row.food_code.empty()) throw Error(ErrorKind::Parse, "row " + std::to_string(r + 1) + " has an empty food code");
        if (!seen.emplace(row.food_code, r).second) {
            throw Error(ErrorKind::Parse, "duplicate food code '" + row.food_code + "' in " + std::string(source_name(source)) + " table");
        }
        if (desc_col) row.description = std::string(trim(cell(*desc_col)));
        if (cat_col) {
            auto cat = trim(cell(*cat_col));
            if (!cat.empty()) row.category = std::string(cat);
        }
        for (auto c : value_cols) row.values.push_back(parse_number(cell(c)));
        table.rows.push_back(std::move(row));
    }
    return table;
}

RawTable parse_table(const std::filesystem::path& path, SourceTag source, const TableSchema& schema)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Config, "input file not found: " + path.string());
    return parse_table_text(read_file(path), source, schema);
}

std::vector<FoodRecord> join_sources(const std::vector<RawTable>& tables)
{
    std::map<SourceTag, const RawTable*> by_tag;
    for (const auto& t : tables) {
        if (!by_tag.emplace(t.source, &t).second) {
            throw Error(ErrorKind::Config, "more than one " + std::string(source_name(t.source)) + " table");
        }
    }
    if (!by_tag.contains(SourceTag::nutrients)) throw Error(ErrorKind::Config, "a nutrients table is required");

    auto index = [](const RawTable& t) {
        std::unordered_map<std::string, const RawRow*> idx;
        for (const auto& row : t.rows) idx.emplace(row.food_code, &row);
        return idx;
    };
    std::map<SourceTag, std::unordered_map<std::string, const RawRow*>> indices;
    for (const auto& [tag, table] : by_tag) indices.emplace(tag, index(*table));

    auto apply = [](FoodRecord& rec, const RawTable& table, const RawRow& row) {
        if (rec.description.empty()) rec.description = row.description;
        if (!rec.category && row.category) rec.category = row.category;
        for (std::size_t i = 0; i < table.fields.size(); ++i) {
            if (row.values[i]) set_field(rec, table.fields[i], *row.values[i]);
        }
    };

    const auto& nutrients = *by_tag.at(SourceTag::nutrients);
    std::vector<FoodRecord> out;
    for (const auto& row : nutrients.rows) {
        const RawRow* pattern_row = nullptr;
        if (auto it = by_tag.find(SourceTag::food_patterns); it != by_tag.end()) {
            auto hit = indices.at(SourceTag::food_patterns).find(row.food_code);
            if (hit == indices.at(SourceTag::food_patterns).end()) continue;
            pattern_row = hit->second;
        }
        FoodRecord rec;
        rec.food_code = row.food_code;
        rec.profile = NutrientProfile(Basis::per_100g);
        apply(rec, nutrients, row);
        if (pattern_row) apply(rec, *by_tag.at(SourceTag::food_patterns), *pattern_row);

        const RawRow* flav_row = nullptr;
        if (by_tag.contains(SourceTag::flavonoids)) {
            auto& idx = indices.at(SourceTag::flavonoids);
            if (auto hit = idx.find(row.food_code); hit != idx.end()) flav_row = hit->second;
        }
        if (flav_row) {
            apply(rec, *by_tag.at(SourceTag::flavonoids), *flav_row);
        } else if (!rec.profile.has(TargetKey::flavonoids_mg)) {
            rec.profile.set(TargetKey::flavonoids_mg, 0.0);
            rec.flavonoid_imputed = true;
        }

        if (by_tag.contains(SourceTag::published_scores)) {
            auto& idx = indices.at(SourceTag::published_scores);
            if (auto hit = idx.find(row.food_code); hit != idx.end()) apply(rec, *by_tag.at(SourceTag::published_scores), *hit->second);
        }
        out.push_back(std::move(rec));
    }
    if (out.empty()) throw Error(ErrorKind::JoinEmpty, "no food codes common to the nutrient and food pattern tables");
    return out;
}

CleanResult clean_records(std::vector<FoodRecord> records)
{
    CleanResult result;
    for (auto& rec : records) {
        std::optional<DroppedRecord> drop;
        for (const auto& t : target_registry()) {
            if (!rec.profile.has(t.key)) {
                drop = DroppedRecord{{}, "missing value", t.key};
                break;
            }
            if (rec.profile.get(t.key) < 0.0) {
                drop = DroppedRecord{{}, "negative value", t.key};
                break;
            }
        }
        if (drop) {
            drop->record = std::move(rec);
            result.dropped.push_back(std::move(*drop));
        } else {
            result.kept.push_back(std::move(rec));
        }
    }
    return result;
}

FilterResult filter_nonfood(std::vector<FoodRecord> records, const std::set<std::string>& denylist)
{
    if (denylist.empty()) throw Error(ErrorKind::Config, "non-food denylist is empty");
    FilterResult result;
    for (auto& rec : records) {
        const auto tokens = tokenize(rec.description);
        const bool denied = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return denylist.contains(t); });
        if (denied || !has_alpha_token(tokens)) {
            result.rejected.push_back(std::move(rec));
        } else {
            result.kept.push_back(std::move(rec));
        }
    }
    return result;
}

NutrientProfile normalize_per_100kcal(const NutrientProfile& profile, double kcal_per_100g)
{
    if (!(kcal_per_100g >= kMinKcalPer100g)) {
        throw Error(ErrorKind::NearZeroEnergy, "energy density " + std::to_string(kcal_per_100g) + " kcal/100 g is below 1.0");
    }
    if (profile.basis() != Basis::per_100g) throw Error(ErrorKind::Invariant, "profile is already on a per-100 kcal basis");
    NutrientProfile out(Basis::per_100kcal);
    const double factor = 100.0 / kcal_per_100g;
    for (const auto& t : target_registry()) {
        if (!profile.has(t.key)) continue;
        const double v = profile.get(t.key);
        out.set(t.key, is_mass_basis(t.key) ? v * factor : v);
    }
    return out;
}

CleanResult normalize_records(std::vector<FoodRecord> records)
{
    CleanResult result;
    for (auto& rec : records) {
        const double kcal = rec.profile.get(TargetKey::calories);
        if (!(kcal >= kMinKcalPer100g)) {
            result.dropped.push_back({std::move(rec), "near-zero energy", TargetKey::calories});
            continue;
        }
        rec.profile = normalize_per_100kcal(rec.profile, kcal);
        result.kept.push_back(std::move(rec));
    }
    return result;
}

IngestResult run_ingest(const std::vector<RawTable>& tables, const std::set<std::string>& denylist)
{
    IngestResult result;
    auto joined = join_sources(tables);
    result.audit.joined = joined.size();
    result.audit.flavonoid_imputed = static_cast<std::size_t>(
        std::count_if(joined.begin(), joined.end(), [](const FoodRecord& r) { return r.flavonoid_imputed; }));

    auto cleaned = clean_records(std::move(joined));
    for (const auto& d : cleaned.dropped) {
        (d.reason == "negative value" ? result.audit.dropped_negative : result.audit.dropped_missing)++;
    }
    auto filtered = filter_nonfood(std::move(cleaned.kept), denylist);
    result.audit.rejected_nonfood = filtered.rejected.size();
    auto normalized = normalize_records(std::move(filtered.kept));
    result.audit.dropped_low_energy = normalized.dropped.size();
    result.records = std::move(normalized.kept);
    result.audit.kept = result.records.size();
    return result;
}

nlohmann::ordered_json record_to_json(const FoodRecord& record)
{
    nlohmann::ordered_json j;
    j["food_code"] = record.food_code;
    j["description"] = record.description;
    if (record.category) j["category"] = *record.category;
    if (record.published_fcs) j["published_fcs"] = *record.published_fcs;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& t : target_registry()) {
        if (record.profile.has(t.key)) values[std::string(t.name)] = record.profile.get(t.key);
    }
    j["profile"] = std::move(values);
    j["basis"] = basis_name(record.profile.basis());
    if (record.flavonoid_imputed) j["flavonoid_imputed"] = true;
    if (record.provenance) {
        j["provenance"] = {{"source_index", record.provenance->source_index},
                           {"mechanism", record.provenance->mechanism},
                           {"detail", record.provenance->detail}};
    }
    return j;
}

FoodRecord record_from_json(const nlohmann::json& j)
{
    static const std::set<std::string> kKnown{"food_code", "description", "category", "published_fcs", "profile", "basis", "flavonoid_imputed", "provenance"};
    for (const auto& [key, value] : j.items()) {
        if (!kKnown.contains(key)) throw Error(ErrorKind::Parse, "unknown dataset field '" + key + "'");
    }
    FoodRecord rec;
    rec.food_code = j.at("food_code").get<std::string>();
    rec.description = j.at("description").get<std::string>();
    if (j.contains("category")) rec.category = j.at("category").get<std::string>();
    if (j.contains("published_fcs")) rec.published_fcs = j.at("published_fcs").get<int>();
    rec.profile = NutrientProfile(parse_basis(j.at("basis").get<std::string>()));
    for (const auto& [name, value] : j.at("profile").items()) rec.profile.set(parse_target(name), value.get<double>());
    rec.flavonoid_imputed = j.value("flavonoid_imputed", false);
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        rec.provenance = Provenance{p.at("source_index").get<std::size_t>(), p.at("mechanism").get<std::string>(), p.at("detail").get<std::string>()};
    }
    validate_record(rec);
    return rec;
}

void write_dataset(std::ostream& out, const std::vector<FoodRecord>& records)
{
    for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

void write_dataset(const std::filesystem::path& path, const std::vector<FoodRecord>& records)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
    write_dataset(out, records);
}

std::vector<FoodRecord> read_dataset(std::istream& in)
{
    std::vector<FoodRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, "dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<FoodRecord> read_dataset(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::MissingArtifact, "dataset not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    return read_dataset(in);
}

std::uint64_t description_hash(std::string_view description)
{
    return fnv1a64(to_lower(trim(description)));
}

} // namespace foodscore
