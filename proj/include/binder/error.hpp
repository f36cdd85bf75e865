#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace binder {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Ill-formed signature: duplicate label, unknown label, bad arity.
class SignatureError : public Error {
public:
  using Error::Error;
};

/// A term, renaming or substitution that violates scoping.
class ScopeError : public Error {
public:
  using Error::Error;
};

/// Typing failure. `path()` lists argument positions from the root, e.g. "0.1".
class TypeError : public Error {
public:
  TypeError(const std::string& what, std::string path)
      : Error(path.empty() ? what : "at " + path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// A model or transport rejected because a sampled law failed.
class LawViolation : public Error {
public:
  LawViolation(const std::string& what, std::string witness)
      : Error(what + ": " + witness), witness_(std::move(witness)) {}

  const std::string& witness() const noexcept { return witness_; }

private:
  std::string witness_;
};

}  // namespace binder
