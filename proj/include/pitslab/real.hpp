#pragma once

// Real-valued sequence parameters that must survive parsing at full precision.
// A parameter keeps its source text (a decimal literal, a rational p/q, or one of
// the symbolic constants sqrt2, golden, pi, e) and materialises at whatever
// working precision a computation asks for.

#include <mpfr.h>

#include <string>
#include <string_view>

namespace pitslab {

class Real {
 public:
  Real() : Real(0.0) {}
  /// Exact binary value of `x`.
  explicit Real(double x);
  /// Parses a token; throws ParameterError on malformed input.
  static Real parse(std::string_view text);

  double value() const noexcept { return value_; }
  const std::string& text() const noexcept { return text_; }
  /// Sets `out` to this value correctly rounded at `out`'s precision.
  void assign_to(mpfr_ptr out) const;

  friend bool operator==(const Real& a, const Real& b) { return a.text_ == b.text_; }

 private:
  enum class Form { Decimal, Rational, Sqrt2, Golden, Pi, E };
  Real(std::string text, Form form, bool negative, std::string a, std::string b);

  std::string text_;
  Form form_ = Form::Decimal;
  bool negative_ = false;
  std::string num_;  // decimal digits or rational numerator
  std::string den_;  // rational denominator
  double value_ = 0.0;
};

/// Shortest decimal string that round-trips to `x`.
std::string shortest_repr(double x);

}  // namespace pitslab
