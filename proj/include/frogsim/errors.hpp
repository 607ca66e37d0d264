#pragma once

#include <stdexcept>
#include <string>

namespace frogsim {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    Overflow,
    CapExceeded,
    NonConvergence,
    Inconsistency,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw Error(ErrorKind::InvalidArgument, what);
}

} // namespace frogsim
