#pragma once

#include <stdexcept>
#include <string>

namespace coco {

// Base for every error raised by the toolkit. Command-line entry points map
// these onto exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument outside the domain of the operation.
class InputDomainError : public Error {
 public:
  using Error::Error;
};

// The labeling protocol was violated (point counts, overlapping picks, ...).
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input files and tables.
class ContractError : public Error {
 public:
  using Error::Error;
};

// A metric that cannot be evaluated on the given data, e.g. AUC on a
// single-class subgroup.
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace coco
