#include "pitslab/real.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "pitslab/errors.hpp"
#include "pitslab/mp.hpp"

namespace pitslab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// [digits][.digits][(e|E)[+-]digits], at least one digit in the mantissa.
bool is_decimal_literal(std::string_view s) {
  std::size_t i = 0, mantissa_digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa_digits;
  }
  if (mantissa_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    return all_digits(s.substr(i));
  }
  return i == s.size();
}

}  // namespace

std::string shortest_repr(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

Real::Real(double x) {
  if (!std::isfinite(x)) throw ParameterError("non-finite parameter value");
  *this = parse(shortest_repr(x));
}

Real::Real(std::string text, Form form, bool negative, std::string a, std::string b)
    : text_(std::move(text)), form_(form), negative_(negative), num_(std::move(a)), den_(std::move(b)) {
  mp::Real v(128);
  assign_to(v.get());
  value_ = v.to_double();
}

Real Real::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const std::string full(text);
  if (body == "sqrt2") return Real(full, Form::Sqrt2, negative, {}, {});
  if (body == "golden") return Real(full, Form::Golden, negative, {}, {});
  if (body == "pi") return Real(full, Form::Pi, negative, {}, {});
  if (body == "e") return Real(full, Form::E, negative, {}, {});
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto p = body.substr(0, slash), q = body.substr(slash + 1);
    if (!all_digits(p) || !all_digits(q) || q.find_first_not_of('0') == std::string_view::npos)
      throw ParameterError("malformed rational parameter '" + full + "'");
    return Real(full, Form::Rational, negative, std::string(p), std::string(q));
  }
  if (!is_decimal_literal(body)) throw ParameterError("malformed real parameter '" + full + "'");
  return Real(full, Form::Decimal, negative, std::string(body), {});
}

void Real::assign_to(mpfr_ptr out) const {
  switch (form_) {
    case Form::Decimal:
      mpfr_set_str(out, num_.c_str(), 10, MPFR_RNDN);
      break;
    case Form::Rational: {
      // wide enough that numerator and denominator are held exactly
      const auto bits = static_cast<mpfr_prec_t>(4 * std::max(num_.size(), den_.size()) + 8);
      mp::Real p(bits), q(bits);
      mpfr_set_str(p.get(), num_.c_str(), 10, MPFR_RNDN);
      mpfr_set_str(q.get(), den_.c_str(), 10, MPFR_RNDN);
      mpfr_div(out, p.get(), q.get(), MPFR_RNDN);
      break;
    }
    case Form::Sqrt2:
      mpfr_sqrt_ui(out, 2, MPFR_RNDN);
      break;
    case Form::Golden: {
      mp::Real s(mpfr_get_prec(out) + 8);
      mpfr_sqrt_ui(s.get(), 5, MPFR_RNDN);
      mpfr_add_ui(s.get(), s.get(), 1, MPFR_RNDN);
      mpfr_div_2ui(out, s.get(), 1, MPFR_RNDN);
      break;
    }
    case Form::Pi:
      mpfr_const_pi(out, MPFR_RNDN);
      break;
    case Form::E: {
      mp::Real one(mpfr_get_prec(out), 1.0);
      mpfr_exp(out, one.get(), MPFR_RNDN);
      break;
    }
  }
  if (negative_) mpfr_neg(out, out, MPFR_RNDN);
}

}  // namespace pitslab
