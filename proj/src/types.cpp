#include "ministra/types.hpp"

#include <fmt/format.h>

namespace ministra {

const char* to_string(PinDirection d) {
  switch (d) {
    case PinDirection::input: return "input";
    case PinDirection::output: return "output";
    case PinDirection::inout: return "inout";
    case PinDirection::internal: return "internal";
  }
  return "?";
}

ParseError::ParseError(std::string file, std::size_t offset, std::size_t line, std::string message)
    : Error(fmt::format("{}:{}: {} (offset {})", file, line, message, offset)),
      file_(std::move(file)),
      offset_(offset),
      line_(line),
      message_(std::move(message)) {}

}  // namespace ministra
