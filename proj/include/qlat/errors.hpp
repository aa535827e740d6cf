#pragma once

#include <stdexcept>
#include <string>

namespace qlat {

// Base class for everything thrown by the library.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input (bad lattice file, singular Gram, ...).
struct input_error : error {
    explicit input_error(const std::string& msg) : error(msg) {}
};

// A precondition of an operation is violated (wrong signature, m not a
// square multiple of D, s <= 0, ...).
struct domain_error : error {
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Work estimate exceeds the configured budget. Carries the estimate so
// callers can report it.
struct budget_error : error {
    double estimate;
    double budget;
    budget_error(const std::string& msg, double est, double bud)
        : error(msg + " (estimated " + std::to_string(est) + ", budget "
                + std::to_string(bud) + ")"),
          estimate(est), budget(bud) {}
};

// p-adic working precision is insufficient (pivot valuation at or beyond
// the precision exponent, chain depth too large, ...).
struct precision_error : error {
    explicit precision_error(const std::string& msg) : error(msg) {}
};

// Exhaustive check refused because the object is too large (discriminant
// p-part above the cap).
struct unsupported_size_error : error {
    explicit unsupported_size_error(const std::string& msg) : error(msg) {}
};

// The period point fails the operational Hodge-genericity test, or a chain
// model fails its genericity certificate.
struct nongeneric_error : error {
    explicit nongeneric_error(const std::string& msg) : error(msg) {}
};

} // namespace qlat
