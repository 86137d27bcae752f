#pragma once

#include <stdexcept>
#include <string>

namespace impc {

/// Base of every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The state-input data matrix does not have full row rank.
class RankDeficient : public Error {
 public:
  RankDeficient(long rank, long required)
      : Error("data matrix is rank deficient: rank " + std::to_string(rank) +
              ", required " + std::to_string(required)),
        rank_(rank),
        required_(required) {}
  long rank() const noexcept { return rank_; }
  long required() const noexcept { return required_; }

 private:
  long rank_;
  long required_;
};

/// No parameter matrix is consistent with the data and the disturbance bound.
class InconsistentData : public Error {
 public:
  using Error::Error;
};

/// A parameter entry is not bounded by the data (insufficient excitation).
class UnboundedParameter : public Error {
 public:
  UnboundedParameter(long row, long col)
      : Error("parameter entry (" + std::to_string(row) + ", " + std::to_string(col) +
              ") is unbounded by the data"),
        row_(row),
        col_(col) {}
  long row() const noexcept { return row_; }
  long col() const noexcept { return col_; }

 private:
  long row_;
  long col_;
};

/// A numerical solver failed to reach a verdict (as opposed to a negative verdict).
class SolverFailure : public Error {
 public:
  using Error::Error;
};

class EmptyTightened : public Error {
 public:
  using Error::Error;
};

class AllInfeasible : public Error {
 public:
  using Error::Error;
};

class NotContractive : public Error {
 public:
  using Error::Error;
};

class NoValidTerminalSet : public Error {
 public:
  using Error::Error;
};

class InfeasibleStart : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation error; `field` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace impc
