#pragma once

#include <stdexcept>
#include <string>

namespace pepsmqc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: wrong shapes, bad JSON, invalid bases.
class InputError : public Error {
  public:
    using Error::Error;
};

/// A configured size limit (branch cap, site cap, dimension cap) would be exceeded.
class ResourceCapError : public Error {
  public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap before meeting its tolerance.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

}  // namespace pepsmqc
