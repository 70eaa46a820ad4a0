#pragma once

#include <stdexcept>
#include <string>

namespace bellbound {

class AngleParseError : public std::invalid_argument {
 public:
  AngleParseError(const std::string& text, std::size_t position, const std::string& message)
      : std::invalid_argument("cannot parse angle '" + text + "' at offset " + std::to_string(position) + ": " +
                              message),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Evaluates angle literals such as "0.1545", "5*pi/12", "-4pi/9" or
/// "(pi+1)/2". Accepted tokens: decimal numbers, "pi", + - * / and
/// parentheses; a number directly followed by "pi" multiplies.
double parse_angle_expression(const std::string& text);

}  // namespace bellbound
