#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ministra {

// Dense 0-based ids. All internal quantities are ps / fF / kOhm.
using PinId = std::uint32_t;
using CellId = std::uint32_t;
using NetId = std::uint32_t;
using EdgeId = std::uint32_t;
using NameId = std::uint32_t;
using LibCellId = std::uint32_t;
using ClockId = std::uint32_t;

inline constexpr std::uint32_t kInvalidId = 0xFFFFFFFFu;
inline constexpr std::uint32_t kPortOwner = 0xFFFFFFFFu;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RiseFall : std::uint8_t { rise = 0, fall = 1 };
enum class MinMax : std::uint8_t { min = 0, max = 1 };  // early / late

inline constexpr int kEarly = 0;
inline constexpr int kLate = 1;
inline constexpr int kRise = 0;
inline constexpr int kFall = 1;

// [mode][edge] quadruple, mode 0 = early, 1 = late.
template <typename T>
using ModeEdge = std::array<std::array<T, 2>, 2>;

enum class PinDirection : std::uint8_t { input = 0, output = 1, inout = 2, internal = 3 };

const char* to_string(PinDirection d);

/// Base error; `what()` is a one-line message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the source location.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t offset, std::size_t line, std::string message);

  const std::string& file() const { return file_; }
  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  std::string file_;
  std::size_t offset_;
  std::size_t line_;
  std::string message_;
};

/// Well-formed input that does not make sense (unresolved names, multi-driven nets, ...).
class SemanticError : public Error {
 public:
  using Error::Error;
};

}  // namespace ministra
