#include "bellbound/angle_expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace bellbound {

namespace {

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := ('+' | '-') unary | factor
// factor := number ['pi'] | 'pi' | '(' expr ')'
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  double parse() {
    const double v = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    if (!std::isfinite(v)) fail("result is not finite");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw AngleParseError(text_, pos_, message); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_pi() {
    skip_ws();
    if (text_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return factor();
  }

  double factor() {
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (accept_pi()) return std::numbers::pi;

    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    // Optional exponent, so that printed doubles round-trip.
    if (pos_ > start && pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    if (pos_ == start) fail("expected a number, 'pi' or '('");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    if (accept_pi()) v *= std::numbers::pi;
    return v;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

double parse_angle_expression(const std::string& text) { return Parser(text).parse(); }

}  // namespace bellbound
