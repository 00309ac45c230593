#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ticketforge {

// Exit codes used by the CLI: 0 success, 2 block failure, 3 budget
// underflow, 4 I/O. Generic contract violations use 1.
enum class ErrorKind : int {
    generic = 1,
    block_failure = 2,
    budget_underflow = 3,
    io = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(ErrorKind::generic, msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(ErrorKind::generic, msg) {}
};

struct SizeError : Error {
    explicit SizeError(const std::string& msg) : Error(ErrorKind::generic, msg) {}
};

struct BlockFailure : Error {
    explicit BlockFailure(const std::string& msg) : Error(ErrorKind::block_failure, msg) {}
};

struct BudgetUnderflow : Error {
    explicit BudgetUnderflow(const std::string& msg) : Error(ErrorKind::budget_underflow, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

}  // namespace ticketforge
