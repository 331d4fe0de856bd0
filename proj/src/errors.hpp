// Internal error type. Core code throws cachenet::Error; the C API layer
// catches it and maps status() onto cn_status (the numeric values match).
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cachenet {

enum class Status : int {
    ok = 0,
    invalid = 1,
    infeasible = 2,
    no_converge = 3,
    ref_mismatch = 4,
    zero_total = 5,
    capacity = 6,
    no_holder = 7,
    horizon = 8,
    missing_exponents = 9,
    not_applicable = 10,
    io = 11,
    parse = 12,
    internal = 13,
};

class Error : public std::runtime_error {
public:
    Error(Status s, std::string msg)
        : std::runtime_error(std::move(msg)), status_(s) {}

    Status status() const noexcept { return status_; }

private:
    Status status_;
};

[[noreturn]] inline void fail(Status s, const std::string& msg) {
    throw Error(s, msg);
}

} // namespace cachenet
