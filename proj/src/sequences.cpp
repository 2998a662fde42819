#include "pitslab/sequences.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "pitslab/errors.hpp"
#include "pitslab/sieve.hpp"

namespace pitslab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kTwoPow53 = 9007199254740992.0;
constexpr std::uint64_t kMask53 = (std::uint64_t{1} << 53) - 1;
// Working precision for phases feeding double-precision values.
constexpr mpfr_prec_t kDoublePhaseBits = 128;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t bit_length(std::uint64_t n) {
  std::uint64_t b = 0;
  while (n) ++b, n >>= 1;
  return b;
}

void require_unit_interval(const Real& x, const char* what) {
  if (!(x.value() >= 0.0 && x.value() < 1.0))
    throw ParameterError(std::string(what) + " must lie in [0, 1), got " + x.text());
}

std::complex<double> gaussian_value(std::uint64_t seed, std::uint64_t n) {
  const double u1 = static_cast<double>(streams::phase53(seed, streams::kIidIndex, 2 * n) + 1) / kTwoPow53;
  const double u2 = static_cast<double>(streams::phase53(seed, streams::kIidIndex, 2 * n + 1)) / kTwoPow53;
  return std::sqrt(-std::log(u1)) * unit_from_turns(u2);
}

// Phases of the unimodular families with real parameters, reduced mod 1 at a
// fixed working precision. One engine per call; not shared between threads.
class PhaseEngine {
 public:
  PhaseEngine(const SequenceKind& kind, mpfr_prec_t bits) : kind_(kind), bits_(bits) {
    if (const auto* g = std::get_if<GeometricPhase>(&kind_)) {
      // digits of the parameter itself: 64 bits worth in base a
      head_digits_ = static_cast<std::uint64_t>(64.0 / std::log2(static_cast<double>(g->base)));
      mp::Real x(192);
      g->x.assign_to(x.get());
      for (std::uint64_t j = 0; j < head_digits_; ++j) {
        mpfr_mul_ui(x.get(), x.get(), g->base, MPFR_RNDN);
        mp::Real d(192);
        mpfr_floor(d.get(), x.get());
        head_.push_back(mpfr_get_ui(d.get(), MPFR_RNDN));
        mpfr_sub(x.get(), x.get(), d.get(), MPFR_RNDN);
      }
    }
  }

  /// phase(n) in turns, reduced to [0, 1).
  void phase(std::uint64_t n, mp::Real& out) const {
    std::visit(overloaded{
                   [&](const PureExponential& s) { scaled_index(s.lambda, n, 1, out); },
                   [&](const PolynomialPhase& s) {
                     mp::Real term(bits_);
                     mpfr_set_zero(out.get(), 1);
                     for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
                       scaled_index(s.coefficients[j], n, static_cast<unsigned>(j + 2), term);
                       mpfr_add(out.get(), out.get(), term.get(), MPFR_RNDN);
                     }
                   },
                   [&](const FractionalPowerPhase& s) {
                     const mpfr_prec_t wide = bits_ + 96;
                     mp::Real beta(wide), power(wide), alpha(wide);
                     s.beta.assign_to(beta.get());
                     s.alpha.assign_to(alpha.get());
                     mpfr_ui_pow(power.get(), n, beta.get(), MPFR_RNDN);
                     mpfr_mul(power.get(), power.get(), alpha.get(), MPFR_RNDN);
                     mp::reduce_mod1(power);
                     mpfr_set(out.get(), power.get(), MPFR_RNDN);
                   },
                   [&](const GeometricPhase& s) { geometric(s, n, out); },
                   [&](const auto&) { mpfr_set_zero(out.get(), 1); },
               },
               kind_);
    mp::reduce_mod1(out);
  }

  /// frac(x * n^power), exact up to the working precision.
  void scaled_index(const Real& x, std::uint64_t n, unsigned power, mp::Real& out) const {
    const mpfr_prec_t wide = bits_ + static_cast<mpfr_prec_t>(power * bit_length(n)) + 8;
    mp::Real value(wide), index(wide);
    x.assign_to(value.get());
    mpfr_set_ui(index.get(), n, MPFR_RNDN);
    mpfr_pow_ui(index.get(), index.get(), power, MPFR_RNDN);
    mpfr_mul(value.get(), value.get(), index.get(), MPFR_RNDN);
    mp::reduce_mod1(value);
    mpfr_set(out.get(), value.get(), MPFR_RNDN);
  }

  bool sign_is_positive(const Real& alpha, std::uint64_t n) const {
    // floor(alpha n) is even iff frac(alpha n / 2) < 1/2
    const mpfr_prec_t wide = bits_ + static_cast<mpfr_prec_t>(bit_length(n)) + 8;
    mp::Real value(wide);
    alpha.assign_to(value.get());
    mpfr_mul_ui(value.get(), value.get(), n, MPFR_RNDN);
    mpfr_div_2ui(value.get(), value.get(), 1, MPFR_RNDN);
    mp::reduce_mod1(value);
    return mpfr_cmp_d(value.get(), 0.5) < 0;
  }

 private:
  std::uint64_t digit(const GeometricPhase& g, std::uint64_t j) const {
    if (j >= 1 && j <= head_digits_) return head_[j - 1];
    return streams::draw(g.seed, streams::kGeometricDigit, j) % g.base;
  }

  void geometric(const GeometricPhase& g, std::uint64_t n, mp::Real& out) const {
    const auto digits =
        static_cast<std::uint64_t>(std::ceil((bits_ + 8) / std::log2(static_cast<double>(g.base))));
    mpfr_set_zero(out.get(), 1);
    for (std::uint64_t j = digits; j >= 1; --j) {
      mpfr_add_ui(out.get(), out.get(), digit(g, n + j), MPFR_RNDN);
      mpfr_div_ui(out.get(), out.get(), g.base, MPFR_RNDN);
    }
  }

  const SequenceKind& kind_;
  mpfr_prec_t bits_;
  std::uint64_t head_digits_ = 0;
  std::vector<std::uint64_t> head_;
};

void check_window(const SequenceSpec& spec, std::uint64_t start, std::uint64_t len) {
  validate(spec);
  if (start + len > spec.length_hint)
    throw ParameterError("window end " + std::to_string(start + len) + " exceeds length_hint " +
                         std::to_string(spec.length_hint));
}

// Values of the multiplicative families on a window, as exact small data:
// for Steinhaus a 53-bit phase numerator, otherwise an integer in {-1, 0, 1}.
struct MultiplicativeWindow {
  std::vector<std::uint64_t> phase;
  std::vector<std::int8_t> value;
};

MultiplicativeWindow multiplicative_window(const SequenceKind& kind, std::uint64_t start,
                                           std::uint64_t len) {
  MultiplicativeWindow w;
  w.value.assign(len, 1);
  if (std::holds_alternative<SteinhausMultiplicative>(kind)) {
    const auto seed = std::get<SteinhausMultiplicative>(kind).seed;
    w.phase.assign(len, 0);
    factorize_window(start, len, [&](std::uint64_t i, std::uint64_t p, int a) {
      const std::uint64_t u = streams::phase53(seed, streams::kSteinhausPrime, p);
      w.phase[i] = (w.phase[i] + static_cast<std::uint64_t>(a) * u) & kMask53;
    });
  } else if (std::holds_alternative<RademacherMultiplicative>(kind)) {
    const auto seed = std::get<RademacherMultiplicative>(kind).seed;
    factorize_window(start, len, [&](std::uint64_t i, std::uint64_t p, int a) {
      w.value[i] = a >= 2 ? 0 : static_cast<std::int8_t>(w.value[i] * streams::sign(seed, streams::kRademacherPrime, p));
    });
  } else {
    factorize_window(start, len, [&](std::uint64_t i, std::uint64_t, int a) {
      w.value[i] = a >= 2 ? 0 : static_cast<std::int8_t>(-w.value[i]);
    });
  }
  if (start == 0 && len > 0) w.value[0] = 0;
  return w;
}

bool is_multiplicative(const SequenceKind& kind) {
  return std::holds_alternative<SteinhausMultiplicative>(kind) ||
         std::holds_alternative<RademacherMultiplicative>(kind) || std::holds_alternative<Moebius>(kind);
}

}  // namespace

namespace streams {
std::uint64_t draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(splitmix(seed) ^ stream) ^ index);
}
}  // namespace streams

std::complex<double> unit_from_turns(double turns) {
  double t = turns - std::floor(turns);
  const double q = 4.0 * t;
  if (q == std::floor(q)) {
    switch (static_cast<int>(q) & 3) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  if (t > 0.5) t -= 1.0;
  const double angle = 2.0 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

void validate(const SequenceSpec& spec) {
  if (spec.length_hint < 1) throw ParameterError("length_hint must be positive");
  std::visit(overloaded{
                 [](const PureExponential& s) { require_unit_interval(s.lambda, "lambda"); },
                 [](const TrigPolynomial& s) {
                   if (s.terms.empty()) throw ParameterError("trig-poly needs at least one term");
                   for (const auto& t : s.terms) require_unit_interval(t.lambda, "lambda_j");
                 },
                 [](const PolynomialPhase& s) {
                   if (s.coefficients.empty())
                     throw ParameterError("poly-phase needs degree >= 2 (give q2)");
                 },
                 [](const FractionalPowerPhase& s) {
                   if (!(s.beta.value() > 0.0)) throw ParameterError("beta must be > 0, got " + s.beta.text());
                 },
                 [](const GeometricPhase& s) {
                   if (s.base < 2) throw ParameterError("geometric base must be an integer >= 2");
                   require_unit_interval(s.x, "x");
                 },
                 [](const auto&) {},
             },
             spec.kind);
}

std::string kind_name(const SequenceSpec& spec) {
  return std::visit(overloaded{
                        [](const Constant&) { return "constant"; },
                        [](const PureExponential&) { return "pure-exp"; },
                        [](const TrigPolynomial&) { return "trig-poly"; },
                        [](const SignBesicovitch&) { return "sign-besicovitch"; },
                        [](const PolynomialPhase&) { return "poly-phase"; },
                        [](const FractionalPowerPhase&) { return "frac-power"; },
                        [](const GeometricPhase&) { return "geometric-phase"; },
                        [](const IidRandom&) { return "iid"; },
                        [](const SteinhausMultiplicative&) { return "steinhaus"; },
                        [](const RademacherMultiplicative&) { return "rademacher"; },
                        [](const Moebius&) { return "moebius"; },
                        [](const TaylorData&) { return "taylor"; },
                    },
                    spec.kind);
}

SequenceWindow generate(const SequenceSpec& spec, std::uint64_t start, std::uint64_t len) {
  check_window(spec, start, len);
  SequenceWindow w{start, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(len))};
  auto& v = w.values;
  const auto& kind = spec.kind;

  if (is_multiplicative(kind)) {
    const auto m = multiplicative_window(kind, start, len);
    for (std::uint64_t i = 0; i < len; ++i) {
      if (!m.phase.empty())
        v[i] = (start + i == 0) ? 0.0 : unit_from_turns(static_cast<double>(m.phase[i]) / kTwoPow53);
      else
        v[i] = static_cast<double>(m.value[i]);
    }
    return w;
  }

  std::visit(overloaded{
                 [&](const Constant&) { v.setOnes(); },
                 [&](const TrigPolynomial& s) {
                   PhaseEngine engine(kind, kDoublePhaseBits);
                   mp::Real t(kDoublePhaseBits);
                   for (std::uint64_t i = 0; i < len; ++i) {
                     std::complex<double> acc = 0.0;
                     for (const auto& term : s.terms) {
                       engine.scaled_index(term.lambda, start + i, 1, t);
                       acc += term.coefficient * unit_from_turns(t.to_double());
                     }
                     v[i] = acc;
                   }
                 },
                 [&](const SignBesicovitch& s) {
                   PhaseEngine engine(kind, kDoublePhaseBits);
                   for (std::uint64_t i = 0; i < len; ++i)
                     v[i] = engine.sign_is_positive(s.alpha, start + i) ? 1.0 : -1.0;
                 },
                 [&](const IidRandom& s) {
                   for (std::uint64_t i = 0; i < len; ++i) {
                     const std::uint64_t n = start + i;
                     switch (s.distribution) {
                       case IidDistribution::Steinhaus:
                         v[i] = unit_from_turns(static_cast<double>(streams::phase53(s.seed, streams::kIidIndex, n)) / kTwoPow53);
                         break;
                       case IidDistribution::Rademacher:
                         v[i] = static_cast<double>(streams::sign(s.seed, streams::kIidIndex, n));
                         break;
                       case IidDistribution::Gaussian:
                         v[i] = gaussian_value(s.seed, n);
                         break;
                     }
                   }
                 },
                 [&](const TaylorData& s) {
                   for (std::uint64_t i = 0; i < len; ++i)
                     if (start + i < s.coefficients.size()) v[i] = s.coefficients[start + i];
                 },
                 [&](const auto&) {
                   // unimodular phase families
                   PhaseEngine engine(kind, kDoublePhaseBits);
                   mp::Real t(kDoublePhaseBits);
                   for (std::uint64_t i = 0; i < len; ++i) {
                     engine.phase(start + i, t);
                     v[i] = unit_from_turns(t.to_double());
                   }
                 },
             },
             kind);
  return w;
}

std::vector<mp::Complex> generate_mp(const SequenceSpec& spec, std::uint64_t start,
                                     std::uint64_t len, mpfr_prec_t bits) {
  check_window(spec, start, len);
  std::vector<mp::Complex> out;
  out.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) out.emplace_back(bits);
  const auto& kind = spec.kind;
  const mpfr_prec_t guard = bits + 32;

  auto set_phase53 = [&](mp::Complex& z, std::uint64_t numerator) {
    mp::Real t(guard);
    mpfr_set_ui(t.get(), numerator, MPFR_RNDN);
    mpfr_div_2ui(t.get(), t.get(), 53, MPFR_RNDN);
    mp::unit_from_turns(z, t);
  };

  if (is_multiplicative(kind)) {
    const auto m = multiplicative_window(kind, start, len);
    for (std::uint64_t i = 0; i < len; ++i) {
      if (!m.phase.empty()) {
        if (start + i != 0) set_phase53(out[i], m.phase[i]);
      } else {
        mpfr_set_si(out[i].re.get(), m.value[i], MPFR_RNDN);
      }
    }
    return out;
  }

  std::visit(overloaded{
                 [&](const Constant&) {
                   for (auto& z : out) mpfr_set_ui(z.re.get(), 1, MPFR_RNDN);
                 },
                 [&](const TrigPolynomial& s) {
                   PhaseEngine engine(kind, guard);
                   mp::Real t(guard);
                   mp::Complex unit(bits), coeff(bits);
                   mp::Workspace ws(bits);
                   for (std::uint64_t i = 0; i < len; ++i) {
                     for (const auto& term : s.terms) {
                       engine.scaled_index(term.lambda, start + i, 1, t);
                       mp::unit_from_turns(unit, t);
                       mpfr_set_d(coeff.re.get(), term.coefficient.real(), MPFR_RNDN);
                       mpfr_set_d(coeff.im.get(), term.coefficient.imag(), MPFR_RNDN);
                       ws.fma(out[i], coeff, unit);
                     }
                   }
                 },
                 [&](const SignBesicovitch& s) {
                   PhaseEngine engine(kind, guard);
                   for (std::uint64_t i = 0; i < len; ++i)
                     mpfr_set_si(out[i].re.get(), engine.sign_is_positive(s.alpha, start + i) ? 1 : -1, MPFR_RNDN);
                 },
                 [&](const IidRandom& s) {
                   for (std::uint64_t i = 0; i < len; ++i) {
                     const std::uint64_t n = start + i;
                     switch (s.distribution) {
                       case IidDistribution::Steinhaus:
                         set_phase53(out[i], streams::phase53(s.seed, streams::kIidIndex, n));
                         break;
                       case IidDistribution::Rademacher:
                         mpfr_set_si(out[i].re.get(), streams::sign(s.seed, streams::kIidIndex, n), MPFR_RNDN);
                         break;
                       case IidDistribution::Gaussian: {
                         const auto g = gaussian_value(s.seed, n);
                         mpfr_set_d(out[i].re.get(), g.real(), MPFR_RNDN);
                         mpfr_set_d(out[i].im.get(), g.imag(), MPFR_RNDN);
                         break;
                       }
                     }
                   }
                 },
                 [&](const TaylorData& s) {
                   for (std::uint64_t i = 0; i < len; ++i)
                     if (start + i < s.coefficients.size()) {
                       mpfr_set_d(out[i].re.get(), s.coefficients[start + i].real(), MPFR_RNDN);
                       mpfr_set_d(out[i].im.get(), s.coefficients[start + i].imag(), MPFR_RNDN);
                     }
                 },
                 [&](const auto&) {
                   PhaseEngine engine(kind, guard);
                   mp::Real t(guard);
                   for (std::uint64_t i = 0; i < len; ++i) {
                     engine.phase(start + i, t);
                     mp::unit_from_turns(out[i], t);
                   }
                 },
             },
             kind);
  return out;
}

double envelope(const SequenceSpec& spec, std::uint64_t k) {
  return std::visit(overloaded{
                        [](const TrigPolynomial& s) {
                          double total = 0.0;
                          for (const auto& t : s.terms) total += std::abs(t.coefficient);
                          return total;
                        },
                        [](const IidRandom& s) {
                          // |g| = sqrt(-log u) with u >= 2^-53
                          return s.distribution == IidDistribution::Gaussian ? 6.07 : 1.0;
                        },
                        [k](const TaylorData& s) {
                          if (k >= s.coefficients.size()) return 0.0;
                          double m = 0.0;
                          for (std::size_t i = k; i < s.coefficients.size(); ++i)
                            m = std::max(m, std::abs(s.coefficients[i]));
                          return m;
                        },
                        [](const auto&) { return 1.0; },
                    },
                    spec.kind);
}

bool is_bounded(const SequenceSpec& spec) {
  if (const auto* s = std::get_if<IidRandom>(&spec.kind)) return s->distribution != IidDistribution::Gaussian;
  return true;
}

bool is_real_valued(const SequenceSpec& spec) {
  auto real_lambda = [](const Real& l) { return l.value() == 0.0 || l.value() == 0.5; };
  return std::visit(overloaded{
                        [](const Constant&) { return true; },
                        [&](const PureExponential& s) { return real_lambda(s.lambda); },
                        [&](const TrigPolynomial& s) {
                          for (const auto& t : s.terms)
                            if (!real_lambda(t.lambda) || t.coefficient.imag() != 0.0) return false;
                          return true;
                        },
                        [](const SignBesicovitch&) { return true; },
                        [](const IidRandom& s) { return s.distribution == IidDistribution::Rademacher; },
                        [](const RademacherMultiplicative&) { return true; },
                        [](const Moebius&) { return true; },
                        [](const TaylorData& s) {
                          for (const auto& c : s.coefficients)
                            if (c.imag() != 0.0) return false;
                          return true;
                        },
                        [](const auto&) { return false; },
                    },
                    spec.kind);
}

}  // namespace pitslab
