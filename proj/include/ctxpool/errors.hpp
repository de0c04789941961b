#pragma once

#include <stdexcept>
#include <string>

namespace ctxpool {

// Error taxonomy. The CLI maps each class to a distinct exit code:
//   UsageError        -> 2  (bad flags, unresolvable names, missing files)
//   DataError         -> 3  (malformed or contract-violating input data)
//   CapacityError     -> 4  (a configured resource guard tripped)
//   VerificationError -> 5  (a verification suite found a violated property)
// Anything else escaping to main exits 1.

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input; message carries file and 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what) {}
};

// Name or id not present in the vocabulary / graph.
class LookupError : public DataError {
 public:
  using DataError::DataError;
};

// A testing graph introduced a relation unseen at training time.
class InductiveContractError : public DataError {
 public:
  using DataError::DataError;
};

// Serialized artifact (CNF file, context-graph file) cannot be decoded.
class FormatError : public DataError {
 public:
  using DataError::DataError;
  FormatError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what) {}
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctxpool
