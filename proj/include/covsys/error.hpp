#pragma once

#include <stdexcept>
#include <string>

namespace covsys {

enum class ErrorKind {
  SyntaxError,
  ResidueOutOfRange,
  NonPrimeFactor,
  ModulusOne,
  NonCoprimeParts,
  ChildCountMismatch,
  UnknownPathPrime,
  WedgeTakeTooLarge,
  QCollision,
  QTooSmall,
  QNotGreater,
  QDividesLcm,
  NoValidQ,
  NonPrime,
  PreconditionViolated,
  StructureMismatch,
  LcmExceedsLimit,
  ResourceBudgetExceeded,
  Unsupported,
  InvalidArgument,
  IoError,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg, int line = 0, int column = 0);

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

}  // namespace covsys
