#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace so {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Invalid mathematical input: wrong flavor, violated precondition, value
/// outside a formula's stated domain. CLI exit code 2.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Working precision N cannot certify a required valuation. Carries the
/// smallest N the caller should retry with (0 when no estimate is available).
/// CLI exit code 3.
class precision_error : public std::runtime_error {
public:
    precision_error(const std::string& msg, int suggested_n = 0)
        : std::runtime_error(msg), suggested_N(suggested_n) {}
    int suggested_N;
};

/// Enumeration node budget exhausted. CLI exit code 4.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A formula-vs-oracle comparison failed. CLI exit code 5.
class verification_error : public std::runtime_error {
public:
    explicit verification_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace so
