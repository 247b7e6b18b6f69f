#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mailclass {

enum class ErrorCode {
    Usage,
    Io,
    MalformedMbox,
    MalformedMime,
    Schema,
    EmptyCorpus,
    EmptyVocabulary,
    UnknownLabel,
    Shape,
    Domain,
    Divergence,
    ModelFormat,
    DegenerateSplit,
    Stratify,
    DegenerateInput,
    Spec,
};

std::string_view error_code_name(ErrorCode code);

// Process exit status for an error: 1 = usage, 2 = data, 3 = runtime.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mailclass
