#pragma once

#include <stdexcept>
#include <string>

namespace sunit {

// Violated precondition of a mathematical operation (zero input, singular matrix, ...).
class MathError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Refusal to run because a configured resource cap would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A certified inequality failed; always a defect, never expected at runtime.
class BoundViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sunit
