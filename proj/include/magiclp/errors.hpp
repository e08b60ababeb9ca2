#pragma once

// Error types shared across the library. Parse-time diagnostics carry a
// source location; engine errors are plain runtime errors.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace magiclp {

// 1-based line/column of a token in the input text.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, SourceSpan s) : Error(msg), span(s) {}
  SourceSpan span;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A predicate used at two different arities.
class ArityMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

// User predicate names may not start with "pre_"; that prefix is how magic
// predicates are rendered, and keeping it out of user programs makes
// render/parse unambiguous.
class ReservedPrefixError : public ParseError {
 public:
  using ParseError::ParseError;
};

class EmptyQueryError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Engine-level arity inconsistency (for example a query using a program
// predicate at the wrong arity).
class ArityError : public Error {
 public:
  using Error::Error;
};

class NonDatalogError : public Error {
 public:
  using Error::Error;
};

class NonAtomicQueryError : public Error {
 public:
  using Error::Error;
};

class UnknownPredicateError : public Error {
 public:
  using Error::Error;
};

class NotEntailedError : public Error {
 public:
  using Error::Error;
};

class InvalidTreeError : public Error {
 public:
  using Error::Error;
};

class IllegalVariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace magiclp
