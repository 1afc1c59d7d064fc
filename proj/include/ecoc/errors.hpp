#pragma once

#include <stdexcept>
#include <string>

namespace ecoc {

/** Base class for all library errors. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** Filesystem-level failure (open, read, write, rename). */
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/** Malformed file content; message carries row/column context. */
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

/** Violated precondition: bad dimensions, empty side, invalid k, ... */
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/** Numerical failure: non-finite input, exhausted resampling budget, ... */
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace ecoc
