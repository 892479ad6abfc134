#pragma once

#include <stdexcept>
#include <string>

namespace ponzi {

/// Bad or inconsistent input data (CLI exit code 2).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant did not hold (CLI exit code 3).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ponzi
