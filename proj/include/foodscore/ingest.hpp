#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/records.hpp"

namespace foodscore {

enum class SourceTag { nutrients, food_patterns, flavonoids, published_scores };

std::string_view source_name(SourceTag tag) noexcept;
SourceTag parse_source(std::string_view name);

/// Field name used for the published score column in a schema.
inline constexpr std::string_view kPublishedFcsField = "published_fcs";

/// Maps file headers to record fields. Value fields are registry target names
/// or "published_fcs".
struct TableSchema {
    std::string code_column = "food_code";
    std::optional<std::string> description_column = "description";
    std::optional<std::string> category_column;
    std::vector<std::pair<std::string, std::string>> value_columns;  // header -> field

    static TableSchema from_json(const nlohmann::json& j);
};

struct RawRow {
    std::string food_code;
    std::string description;
    std::optional<std::string> category;
    std::vector<std::optional<double>> values;  // parallel to RawTable::fields; nullopt = missing
};

struct RawTable {
    SourceTag source = SourceTag::nutrients;
    std::vector<std::string> fields;
    std::vector<RawRow> rows;
};

/// Splits delimited text into records, honouring double quotes. The delimiter is
/// tab when the header line contains one, otherwise comma.
std::vector<std::vector<std::string>> split_delimited(std::string_view text);

RawTable parse_table_text(std::string_view text, SourceTag source, const TableSchema& schema);
RawTable parse_table(const std::filesystem::path& path, SourceTag source, const TableSchema& schema);

/// Inner join of nutrients and food patterns on food_code; flavonoids and
/// published scores are left-joined. Foods absent from the flavonoid table get
/// flavonoids_mg = 0 and `flavonoid_imputed` set.
std::vector<FoodRecord> join_sources(const std::vector<RawTable>& tables);

struct DroppedRecord {
    FoodRecord record;
    std::string reason;
    std::optional<TargetKey> target;
};

struct CleanResult {
    std::vector<FoodRecord> kept;
    std::vector<DroppedRecord> dropped;
};

/// Drops records with a missing or negative value in any registered target.
CleanResult clean_records(std::vector<FoodRecord> records);

struct FilterResult {
    std::vector<FoodRecord> kept;
    std::vector<FoodRecord> rejected;
};

/// Rejects descriptions containing a denylisted token or no alphabetic token at all.
FilterResult filter_nonfood(std::vector<FoodRecord> records, const std::set<std::string>& denylist);

inline constexpr double kMinKcalPer100g = 1.0;

/// Rescales per-mass values by 100 / kcal_per_100g. Energy density, NOVA class,
/// fermented share and fried flag are copied unchanged.
NutrientProfile normalize_per_100kcal(const NutrientProfile& profile, double kcal_per_100g);

/// Normalizes every record using its `calories` value; records under 1 kcal/100 g
/// are dropped with reason "near-zero energy".
CleanResult normalize_records(std::vector<FoodRecord> records);

struct IngestAudit {
    std::size_t joined = 0;
    std::size_t flavonoid_imputed = 0;
    std::size_t dropped_missing = 0;
    std::size_t dropped_negative = 0;
    std::size_t rejected_nonfood = 0;
    std::size_t dropped_low_energy = 0;
    std::size_t kept = 0;
};

struct IngestResult {
    std::vector<FoodRecord> records;
    IngestAudit audit;
};

/// join -> clean -> filter -> normalize.
IngestResult run_ingest(const std::vector<RawTable>& tables, const std::set<std::string>& denylist);

// Canonical dataset: one JSON object per line.
nlohmann::ordered_json record_to_json(const FoodRecord& record);
FoodRecord record_from_json(const nlohmann::json& j);
void write_dataset(std::ostream& out, const std::vector<FoodRecord>& records);
void write_dataset(const std::filesystem::path& path, const std::vector<FoodRecord>& records);
std::vector<FoodRecord> read_dataset(std::istream& in);
std::vector<FoodRecord> read_dataset(const std::filesystem::path& path);

/// Hash of the case-folded, trimmed description; used to detect train/validation overlap.
std::uint64_t description_hash(std::string_view description);

} // namespace foodscore
