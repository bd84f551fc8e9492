#pragma once

#include <stdexcept>
#include <string>

namespace chainforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed instance, design, or plan document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A well-formed document violates a model invariant. `field()` names the
/// offending field using a dotted path such as `regions[2].average_income`.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A shipment was supplied on a DC-customer pair that is not linked.
class LinkageError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

/// Safety stock floor exceeds DC capacity.
class InfeasibleBounds : public Error {
 public:
  InfeasibleBounds(std::string dc_id, const std::string& message)
      : Error(message), dc_id_(std::move(dc_id)) {}

  const std::string& dc_id() const noexcept { return dc_id_; }

 private:
  std::string dc_id_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A period model had no feasible plan; the message names replication and
/// period.
class InfeasiblePeriod : public Error {
 public:
  using Error::Error;
};

}  // namespace chainforge
