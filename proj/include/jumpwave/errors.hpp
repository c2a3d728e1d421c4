// errors.hpp — exception hierarchy shared by all modules.
//
// InputError      : malformed definitions, bad parameters, schema violations.
// ContractError   : a numerical precondition or invariant failed at runtime
//                   (e.g. non-real spectrum, branch collision, out-of-cone
//                   energy). Carries the offending data in the message.
// AccuracyError   : a quadrature or fit could not reach the requested
//                   tolerance; carries the achieved bound.
// DomainError     : sampled domain too small for a characteristic trace or
//                   extraction stencil; carries the required extent.

#pragma once

#include <stdexcept>
#include <string>

namespace jumpwave {

class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_bound(achieved) {}
    double achieved_bound;
};

class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& msg, double required)
        : std::runtime_error(msg), required_extent(required) {}
    double required_extent;
};

} // namespace jumpwave
