#include "mailclass/error.hpp"

namespace mailclass {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Usage: return "UsageError";
        case ErrorCode::Io: return "IoError";
        case ErrorCode::MalformedMbox: return "MalformedMbox";
        case ErrorCode::MalformedMime: return "MalformedMime";
        case ErrorCode::Schema: return "SchemaError";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::Shape: return "ShapeError";
        case ErrorCode::Domain: return "DomainError";
        case ErrorCode::Divergence: return "DivergenceError";
        case ErrorCode::ModelFormat: return "ModelFormatError";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::Stratify: return "StratifyError";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::Spec: return "SpecError";
    }
    return "Error";
}

int exit_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::Usage:
            return 1;
        case ErrorCode::Shape:
        case ErrorCode::Domain:
        case ErrorCode::Divergence:
        case ErrorCode::DegenerateInput:
            return 3;
        default:
            return 2;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace mailclass
