#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace foodscore {

enum class ErrorKind {
    // input / configuration
    Parse,
    Config,
    MissingColumn,
    EmptyFile,
    UnknownKey,
    JoinEmpty,
    NearZeroEnergy,
    ModifierAlreadyPresent,
    UnknownModifier,
    EmptyCorpus,
    UnknownTarget,
    UnknownText,
    DimensionMismatch,
    TooFewRows,
    ShapeMismatch,
    EmptyBatch,
    ConstantInput,
    EmptyDataset,
    MissingTarget,
    // artifacts
    MissingArtifact,
    MissingModel,
    VersionMismatch,
    CorruptFile,
    // internal
    StaleCache,
    Invariant,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Process exit code for an error: 2 input/config, 3 missing artifact, 4 internal invariant.
int exit_code_for(ErrorKind kind);

} // namespace foodscore
