#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "foodscore/records.hpp"
#include "foodscore/targets.hpp"

namespace fs_test {

inline std::filesystem::path source_dir() { return FOODSCORE_SOURCE_DIR; }

/// Removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t")
    {
        static std::atomic<int> counter{0};
        const char* base = std::getenv("TMPDIR");
        path_ = std::filesystem::path(base && *base ? base : "/tmp") /
                ("foodscore_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Every target 0 except nova_class.
inline foodscore::NutrientProfile zero_profile(double nova = 1.0)
{
    foodscore::NutrientProfile p(foodscore::Basis::per_100kcal);
    for (const auto& t : foodscore::target_registry()) p.set(t.key, 0.0);
    p.set(foodscore::TargetKey::nova_class, nova);
    return p;
}

/// Copy of the bundled synthetic config whose outputs land in `dir`. Input
/// paths are made absolute; `overrides` is merged on top.
inline std::filesystem::path synthetic_config(const std::filesystem::path& dir, const nlohmann::json& overrides = nlohmann::json::object())
{
    const auto src = source_dir() / "data/synthetic";
    auto j = nlohmann::json::parse(read_text(src / "config.json"));
    for (auto& [tag, source] : j["sources"].items()) source["path"] = (src / source["path"].get<std::string>()).lexically_normal().string();
    for (const char* key : {"stop_words", "denylist", "augmentation", "heuristics"}) {
        j[key] = (src / j[key].get<std::string>()).lexically_normal().string();
    }
    j.merge_patch(overrides);
    const auto path = dir / "config.json";
    write_text(path, j.dump(2));
    return path;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the foodscore executable with `args` (already shell-quoted).
inline CliResult run_cli(const std::string& args, const std::filesystem::path& scratch, const std::string& stdin_text = {})
{
    const auto in = scratch / "cli_stdin.txt";
    const auto out = scratch / "cli_stdout.txt";
    const auto err = scratch / "cli_stderr.txt";
    write_text(in, stdin_text);
    const std::string cmd = std::string("'") + FOODSCORE_CLI + "' " + args + " < '" + in.string() + "' > '" + out.string() + "' 2> '" +
                            err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out);
    r.err = read_text(err);
    return r;
}

inline std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

} // namespace fs_test
