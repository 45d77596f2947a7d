#ifndef EWNOISE_ERROR_HPP
#define EWNOISE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ewnoise {

enum class ErrorKind {
    MalformedDocument,
    SchemaViolation,
    InvariantViolation,
    GeometryMismatch,
    ExtremaNotFound,
    SingularSystem,
    DegenerateSystem,
    DegenerateRange,
    DegenerateVariance,
    DegenerateField,
    ShapeMismatch,
    Io,
};

const char* error_kind_name(ErrorKind kind);

/// Exit code the CLI uses for an error of this kind
/// (3 = input/parse, 4 = numerical/geometry).
int error_kind_exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    const char* name() const { return error_kind_name(kind_); }

private:
    ErrorKind kind_;
};

} // namespace ewnoise

#endif
