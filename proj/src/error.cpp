#include "ewnoise/error.hpp"

namespace ewnoise {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::ExtremaNotFound: return "ExtremaNotFound";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Io: return "IoError";
    }
    return "UnknownError";
}

int error_kind_exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedDocument:
    case ErrorKind::SchemaViolation:
    case ErrorKind::InvariantViolation:
    case ErrorKind::Io:
        return 3;
    default:
        return 4;
    }
}

} // namespace ewnoise
