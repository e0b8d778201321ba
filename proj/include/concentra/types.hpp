#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace concentra {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using IntVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

// Epoch milliseconds, UTC.
using TimestampMs = std::int64_t;
using DurationMs = std::int64_t;

constexpr DurationMs kMillisPerSecond = 1000;
constexpr DurationMs kMillisPerMinute = 60 * kMillisPerSecond;
constexpr DurationMs kMillisPerHour = 60 * kMillisPerMinute;
constexpr DurationMs kMillisPerDay = 24 * kMillisPerHour;

// Error taxonomy: ContractError for violated preconditions/API misuse,
// ParameterError for bad user-supplied parameters, DataError for bad or
// missing input data. The CLI maps DataError to exit 1 and usage to exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

enum class Slot { Morning, Afternoon };

inline const char* to_string(Slot slot) {
  return slot == Slot::Morning ? "morning" : "afternoon";
}

inline bool parse_slot(const std::string& token, Slot& out) {
  if (token == "morning") {
    out = Slot::Morning;
    return true;
  }
  if (token == "afternoon") {
    out = Slot::Afternoon;
    return true;
  }
  return false;
}

}  // namespace concentra
