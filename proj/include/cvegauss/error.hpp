#pragma once

#include <stdexcept>
#include <string>

namespace cvegauss {

/// Broad failure classes. The CLI maps each one onto a process exit code.
enum class ErrorKind {
    InvalidArgument,  // bad parameter or precondition violation
    DataMismatch,     // well-formed inputs that do not fit together
    InputError,       // unreadable or malformed input file
    OutputError,      // output location cannot be written
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, const std::string& message,
                    ErrorKind kind = ErrorKind::InvalidArgument) {
    if (!condition) {
        throw Error(kind, message);
    }
}

}  // namespace cvegauss
