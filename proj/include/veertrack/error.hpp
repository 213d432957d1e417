#pragma once

#include <stdexcept>
#include <string>

namespace veertrack {

// Base of everything the library throws on purpose.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text. `position` is a byte offset when known.
class parse_error : public error {
public:
    explicit parse_error(const std::string& what, long position = -1)
        : error(position >= 0 ? what + " (at byte " + std::to_string(position) + ")" : what),
          position_(position) {}
    long position() const { return position_; }

private:
    long position_;
};

// Well-formed input that violates a structural rule (edge multiplicity, zero sum, ...).
class semantic_error : public error {
public:
    using error::error;
};

// A non-generic configuration: ties, axis-parallel saddle connections,
// simultaneous events. The CLI maps this to exit code 2.
class degeneracy_error : public error {
public:
    using error::error;
};

// Caller broke a documented precondition.
class precondition_error : public error {
public:
    using error::error;
};

}  // namespace veertrack
