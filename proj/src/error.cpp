#include "recordminer/error.hpp"

namespace recordminer {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EncodingError: return "EncodingError";
        case ErrorKind::UnknownNode: return "UnknownNode";
        case ErrorKind::NotAnElement: return "NotAnElement";
        case ErrorKind::NoChildren: return "NoChildren";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::DuplicateSelector: return "DuplicateSelector";
        case ErrorKind::SelectorResolutionError: return "SelectorResolutionError";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::InputNotFound: return "InputNotFound";
        case ErrorKind::FetchError: return "FetchError";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace recordminer
