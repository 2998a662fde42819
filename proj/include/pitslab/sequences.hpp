#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pitslab/mp.hpp"
#include "pitslab/real.hpp"

namespace pitslab {

// ---------------------------------------------------------------------------
// Sequence families. Each alternative of SequenceKind describes one family of
// coefficient sequences xi : Z_+ -> C; values are a pure function of the spec.
// ---------------------------------------------------------------------------

struct Constant {};

/// xi(n) = e(lambda n).
struct PureExponential {
  Real lambda;
};

/// xi(n) = sum_j c_j e(lambda_j n).
struct TrigTerm {
  Real lambda;
  std::complex<double> coefficient;
};
struct TrigPolynomial {
  std::vector<TrigTerm> terms;
};

/// xi(n) = (-1)^floor(alpha n).
struct SignBesicovitch {
  Real alpha;
};

/// xi(n) = e(q_2 n^2 + ... + q_d n^d); coefficients holds q_2..q_d.
struct PolynomialPhase {
  std::vector<Real> coefficients;
};

/// xi(n) = e(alpha n^beta).
struct FractionalPowerPhase {
  Real alpha;
  Real beta;
};

/// xi(n) = e(a^n x). The base-a digits of x past the 64 bits carried by the
/// parameter are drawn from the seeded stream, which makes x generic.
struct GeometricPhase {
  std::uint64_t base = 2;
  Real x;
  std::uint64_t seed = 0;
};

enum class IidDistribution { Steinhaus, Rademacher, Gaussian };

/// Independent values per index: uniform on the circle, +-1, or standard complex Gaussian.
struct IidRandom {
  IidDistribution distribution = IidDistribution::Steinhaus;
  std::uint64_t seed = 0;
};

/// Completely multiplicative, xi(p) = X_p uniform on the circle; xi(0) = 0.
struct SteinhausMultiplicative {
  std::uint64_t seed = 0;
};

/// Multiplicative, xi(p) = Y_p = +-1 on square-free n, 0 elsewhere; xi(0) = 0.
struct RademacherMultiplicative {
  std::uint64_t seed = 0;
};

/// The Moebius function; xi(0) = 0.
struct Moebius {};

/// Finitely supported Taylor data: xi(n) = coefficients[n], zero past the end.
struct TaylorData {
  std::vector<std::complex<double>> coefficients;
};

using SequenceKind =
    std::variant<Constant, PureExponential, TrigPolynomial, SignBesicovitch, PolynomialPhase,
                 FractionalPowerPhase, GeometricPhase, IidRandom, SteinhausMultiplicative,
                 RademacherMultiplicative, Moebius, TaylorData>;

inline constexpr std::uint64_t kDefaultLengthHint = 100'000'000;

struct SequenceSpec {
  SequenceKind kind;
  std::uint64_t length_hint = kDefaultLengthHint;
};

struct SequenceWindow {
  std::uint64_t start = 0;
  Eigen::VectorXcd values;
};

/// Throws ParameterError if the spec's parameters are outside their admissible range.
void validate(const SequenceSpec& spec);

/// Kind discriminator used by the JSON form and the command line ("poly-phase", ...).
std::string kind_name(const SequenceSpec& spec);

/// xi(start .. start+len).
SequenceWindow generate(const SequenceSpec& spec, std::uint64_t start, std::uint64_t len);

/// xi(start .. start+len) at `bits` of working precision. Phases are reduced at
/// that precision, so the values are those of the exact parameters.
std::vector<mp::Complex> generate_mp(const SequenceSpec& spec, std::uint64_t start,
                                     std::uint64_t len, mpfr_prec_t bits);

/// Upper bound on |xi(k)| used for series truncation.
double envelope(const SequenceSpec& spec, std::uint64_t k);

/// True when sup |xi| < infinity.
bool is_bounded(const SequenceSpec& spec);

/// True when xi is real-valued.
bool is_real_valued(const SequenceSpec& spec);

// Random streams. Each value is a pure function of (seed, stream, index), so
// windows at different offsets agree without storing earlier draws.
namespace streams {
inline constexpr std::uint64_t kSteinhausPrime = 0x5354454e48415553ULL;
inline constexpr std::uint64_t kRademacherPrime = 0x5241444d41434852ULL;
inline constexpr std::uint64_t kIidIndex = 0x49494449494e4458ULL;
inline constexpr std::uint64_t kGeometricDigit = 0x47454f4d44494749ULL;

std::uint64_t draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
/// 53-bit numerator of a uniform phase in [0, 1).
inline std::uint64_t phase53(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return draw(seed, stream, index) >> 11;
}
inline int sign(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return (draw(seed, stream, index) >> 63) ? 1 : -1;
}
}  // namespace streams

/// e(t) in double precision with exact values at quarter turns.
std::complex<double> unit_from_turns(double turns);

}  // namespace pitslab
