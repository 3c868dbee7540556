#pragma once

#include <stdexcept>
#include <string>

namespace gerbe {

enum class ErrorKind {
    Domain,        // invalid mathematical input
    Conditioning,  // input violates a numeric guard
    Certification, // a sampled certificate could not be established
    Quadrature,    // an integral failed its own consistency check
    Data,          // structurally invalid data (nonvanishing violated, bad schema)
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) fail(kind, msg);
}

} // namespace gerbe
