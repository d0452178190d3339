#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recordminer {

enum class ErrorKind {
    EmptyInput,
    EncodingError,
    UnknownNode,
    NotAnElement,
    NoChildren,
    SchemaError,
    DuplicateSelector,
    SelectorResolutionError,
    EmptyCorpus,
    InputNotFound,
    FetchError,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure the library reports. `stage` names the
/// pipeline step that raised it (dom, layout, region, records, eval, cli).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string stage, const std::string& message)
        : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    ErrorKind kind_;
    std::string stage_;
};

}  // namespace recordminer
