#include "foodscore/error.hpp"

namespace foodscore {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::JoinEmpty: return "JoinEmpty";
    case ErrorKind::NearZeroEnergy: return "NearZeroEnergy";
    case ErrorKind::ModifierAlreadyPresent: return "ModifierAlreadyPresent";
    case ErrorKind::UnknownModifier: return "UnknownModifier";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::UnknownText: return "UnknownText";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::ConstantInput: return "ConstantInput";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::MissingTarget: return "MissingTarget";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
    case ErrorKind::MissingModel: return "MissingModel";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::StaleCache: return "StaleCache";
    case ErrorKind::Invariant: return "InvariantViolation";
    }
    return "Error";
}

int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MissingArtifact:
    case ErrorKind::MissingModel:
    case ErrorKind::VersionMismatch:
    case ErrorKind::CorruptFile:
        return 3;
    case ErrorKind::StaleCache:
    case ErrorKind::Invariant:
        return 4;
    default:
        return 2;
    }
}

} // namespace foodscore
