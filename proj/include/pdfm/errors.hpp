#pragma once

#include <stdexcept>
#include <string>

namespace pdfm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a domain invariant (e.g. death <= birth).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// A quantity is undefined at the given arguments (e.g. a zero denominator).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Wrong number of arguments in a collection (e.g. |Q| != L).
class ArityError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle refused an input above its enumeration cap.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& what, std::size_t cap)
      : Error(what), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

}  // namespace pdfm
