#include "pitslab/evaluator.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "pitslab/errors.hpp"
#include "pitslab/parallel.hpp"
#include "pitslab/summation.hpp"

namespace pitslab {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

// Cancellation beyond this fraction of sum|a_k| is redone in MPFR under Auto.
constexpr double kCancellationLimit = 1e-8;
// Below this fraction a double-precision sum carries no correct digits.
constexpr double kDoubleResolution = 1e-14;
// Guard bits kept below the working precision when deciding a result is resolved.
constexpr mpfr_prec_t kGuardBits = 40;

const std::array<double, 10> kLogFactorialTable = [] {
  std::array<double, 10> t{};
  double f = 1.0;
  for (int k = 0; k < 10; ++k) {
    if (k > 0) f *= k;
    t[k] = std::log(f);
  }
  return t;
}();

// lgamma(x) - [(x - 1/2) log x - x + log(2 pi)/2] for x >= 11.
double stirling_series(double x) {
  const double y = 1.0 / x;
  const double y2 = y * y;
  return y * (1.0 / 12 +
              y2 * (-1.0 / 360 +
                    y2 * (1.0 / 1260 + y2 * (-1.0 / 1680 + y2 * (1.0 / 1188 + y2 * (-691.0 / 360360 + y2 / 156.0))))));
}

// frac(k * theta) with the rounding error of the product recovered.
double turns_product(std::uint64_t k, double theta) {
  const double kd = static_cast<double>(k);
  const double p = kd * theta;
  const double err = std::fma(kd, theta, -p);
  const double f = (p - std::floor(p)) + err;
  return f - std::floor(f);
}

double reduce_turns(double theta) { return theta - std::floor(theta); }

mpfr_prec_t bits_for(double r, double abs_sum) {
  const double scale_bits = std::ceil(std::log2(std::max(abs_sum, 1.0)));
  return static_cast<mpfr_prec_t>(64.0 + scale_bits + std::ceil(2.0 * r / kLn2));
}

void require_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("radius must be positive and finite");
}

bool is_taylor(const TaylorCoefficients& c) { return std::holds_alternative<TaylorData>(c.spec().kind); }

std::uint64_t taylor_degree(const TaylorCoefficients& c) {
  const auto& t = std::get<TaylorData>(c.spec().kind);
  return t.coefficients.empty() ? 0 : t.coefficients.size() - 1;
}

// Indices whose log-term log env(k) + log_term(k) is at least `floor`, scanned
// outwards from the mode. log_term must be unimodal with its peak near `mode`.
template <class LogTerm>
std::pair<std::uint64_t, std::uint64_t> scan_range(const TaylorCoefficients& coeffs, std::uint64_t mode,
                                                   double floor, LogTerm log_term) {
  auto log_size = [&](std::uint64_t k) {
    const double e = coeffs.envelope(k);
    return e > 0.0 ? std::log(e) + log_term(k) : -std::numeric_limits<double>::infinity();
  };
  std::uint64_t last = mode;
  while (log_size(last + 1) >= floor) ++last;
  std::uint64_t first = mode;
  while (first > 0 && log_size(first - 1) >= floor) --first;
  return {first, last};
}

struct DoubleTerms {
  std::uint64_t first = 0;
  std::vector<std::complex<double>> a;  // xi(k) r^k / (k! U(r))
  double abs_sum = 0.0;
};

DoubleTerms scaled_terms(const TaylorCoefficients& coeffs, double r, std::uint64_t first, std::uint64_t last) {
  DoubleTerms t;
  t.first = first;
  t.a.resize(last - first + 1);
  const auto xi = coeffs.values(last);
  CompensatedSum abs_sum;
  for (std::uint64_t k = first; k <= last; ++k) {
    const std::complex<double> x = (*xi)[static_cast<Eigen::Index>(k)];
    const std::complex<double> a = x == 0.0 ? 0.0 : x * std::exp(log_scaled_weight(k, r));
    t.a[k - first] = a;
    abs_sum.add(std::abs(a));
  }
  t.abs_sum = abs_sum.value();
  return t;
}

// Calls visit(k, a_k) with a_k = xi(k) r^k / (k! U(r)) at `bits` of precision.
template <class Visit>
void mp_scaled_terms(const TaylorCoefficients& coeffs, double r, std::uint64_t first, std::uint64_t last,
                     mpfr_prec_t bits, Visit visit) {
  const auto table = coeffs.high_precision(last, bits);
  mp::Real rr(bits, r), w(bits), t(bits);
  mpfr_log(w.get(), rr.get(), MPFR_RNDN);
  mpfr_mul_ui(w.get(), w.get(), first, MPFR_RNDN);
  mpfr_set_ui(t.get(), first + 1, MPFR_RNDN);
  mpfr_lngamma(t.get(), t.get(), MPFR_RNDN);
  mpfr_sub(w.get(), w.get(), t.get(), MPFR_RNDN);
  mpfr_sub(w.get(), w.get(), rr.get(), MPFR_RNDN);
  mpfr_const_pi(t.get(), MPFR_RNDN);
  mpfr_mul(t.get(), t.get(), rr.get(), MPFR_RNDN);
  mpfr_mul_2ui(t.get(), t.get(), 1, MPFR_RNDN);
  mpfr_log(t.get(), t.get(), MPFR_RNDN);
  mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDN);
  mpfr_add(w.get(), w.get(), t.get(), MPFR_RNDN);
  mpfr_exp(w.get(), w.get(), MPFR_RNDN);

  mp::Workspace ws(bits);
  mp::Complex a(bits);
  for (std::uint64_t k = first; k <= last; ++k) {
    const mp::Complex& x = table->values[k];
    if (!x.is_zero()) {
      ws.scale(a, x, w);
      visit(k, a);
    }
    mpfr_mul(w.get(), w.get(), rr.get(), MPFR_RNDN);
    mpfr_div_ui(w.get(), w.get(), static_cast<unsigned long>(k + 1), MPFR_RNDN);
  }
}

std::pair<std::uint64_t, std::uint64_t> mp_range(const TaylorCoefficients& coeffs, double r, double abs_sum,
                                                 mpfr_prec_t bits) {
  if (is_taylor(coeffs)) return {0, taylor_degree(coeffs)};
  const double floor = std::log(std::max(abs_sum, 1e-300)) - static_cast<double>(bits) * kLn2;
  const auto mode = static_cast<std::uint64_t>(std::floor(r));
  return scan_range(coeffs, mode, floor, [r](std::uint64_t k) { return log_scaled_weight(k, r); });
}

ScaledValue finish_double(std::complex<double> s, double abs_sum) {
  ScaledValue v;
  v.value = s;
  v.abs_sum = abs_sum;
  const double floor = kDoubleResolution * abs_sum;
  if (!(std::abs(s) > floor)) {
    v.clipped = true;
    v.log_abs = std::log(std::max(floor, std::numeric_limits<double>::min()));
  } else {
    v.log_abs = std::log(std::abs(s));
  }
  v.arg = std::arg(s);
  return v;
}

ScaledValue finish_mp(const mp::Complex& s, double abs_sum, mpfr_prec_t bits) {
  ScaledValue v;
  v.high_precision = true;
  v.abs_sum = abs_sum;
  v.value = s.to_double();
  const double floor = std::log(std::max(abs_sum, 1e-300)) - static_cast<double>(bits - kGuardBits) * kLn2;
  if (s.is_zero()) {
    v.clipped = true;
    v.log_abs = floor;
    return v;
  }
  const auto [log_abs, arg] = mp::log_abs_arg(s);
  v.arg = arg;
  if (log_abs < floor) {
    v.clipped = true;
    v.log_abs = floor;
  } else {
    v.log_abs = log_abs;
  }
  return v;
}

ScaledValue mp_point(const TaylorCoefficients& coeffs, double r, double theta, double abs_sum) {
  const mpfr_prec_t bits = bits_for(r, abs_sum);
  const auto [first, last] = mp_range(coeffs, r, abs_sum, bits);
  mp::Real tt(bits + 64, theta);
  mp::Complex u(bits), p(bits), acc(bits);
  mp::unit_from_turns(u, tt);
  mpfr_mul_ui(tt.get(), tt.get(), first, MPFR_RNDN);
  mp::unit_from_turns(p, tt);
  mp::Workspace ws(bits);
  std::uint64_t at = first;
  mp_scaled_terms(coeffs, r, first, last, bits, [&](std::uint64_t k, const mp::Complex& a) {
    for (; at < k; ++at) ws.mul(p, p, u);
    ws.fma(acc, a, p);
  });
  return finish_mp(acc, abs_sum, bits);
}

std::uint64_t window_lower(double r, std::uint64_t n) {
  const double lo = std::ceil(r - static_cast<double>(n));
  if (lo < 1.0) throw ParameterError("window extends below k = 1; r is too small for c_N");
  return static_cast<std::uint64_t>(lo);
}

void check_window(double r, double c_N) {
  if (!(r >= 16.0) || !std::isfinite(r)) throw ParameterError("window sums require r >= 16");
  if (!(c_N > 0.0)) throw ParameterError("c_N must be positive");
}

// Weighted window terms: xi(k) e^{-weight(k)} for |k - r| <= N.
template <class Weight>
DoubleTerms window_terms(const TaylorCoefficients& coeffs, double r, double c_N, Weight weight) {
  check_window(r, c_N);
  const std::uint64_t n = window_half_width(r, c_N);
  const std::uint64_t first = window_lower(r, n);
  const auto last = static_cast<std::uint64_t>(std::floor(r + static_cast<double>(n)));
  const auto xi = coeffs.values(last);
  DoubleTerms t;
  t.first = first;
  t.a.resize(last - first + 1);
  for (std::uint64_t k = first; k <= last; ++k) {
    const std::complex<double> x = (*xi)[static_cast<Eigen::Index>(k)];
    t.a[k - first] = x == 0.0 ? 0.0 : x * std::exp(-weight(k));
  }
  return t;
}

std::complex<double> sum_at(const DoubleTerms& t, double theta) {
  CompensatedComplexSum s;
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    if (t.a[i] == 0.0) continue;
    s.add(t.a[i] * unit_from_turns(turns_product(t.first + i, theta)));
  }
  return s.value();
}

// S_j = sum_k a_k e(k j / A) for j < A.
std::vector<std::complex<double>> grid_row(const DoubleTerms& t, int angle_count) {
  const auto A = static_cast<std::uint64_t>(angle_count);
  std::vector<CompensatedComplexSum> bins(A);
  for (std::size_t i = 0; i < t.a.size(); ++i) bins[(t.first + i) % A].add(t.a[i]);
  std::vector<std::complex<double>> folded(A), out;
  for (std::uint64_t m = 0; m < A; ++m) folded[m] = bins[m].value();
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.inv(out, folded);
  return out;
}

std::vector<ScaledValue> mp_grid_row(const TaylorCoefficients& coeffs, double r, int angle_count, double abs_sum) {
  const mpfr_prec_t bits = bits_for(r, abs_sum);
  const auto [first, last] = mp_range(coeffs, r, abs_sum, bits);
  const auto A = static_cast<std::uint64_t>(angle_count);
  std::vector<mp::Complex> bins;
  bins.reserve(A);
  for (std::uint64_t m = 0; m < A; ++m) bins.emplace_back(bits);
  mp_scaled_terms(coeffs, r, first, last, bits, [&](std::uint64_t k, const mp::Complex& a) {
    mp::Complex& b = bins[k % A];
    mpfr_add(b.re.get(), b.re.get(), a.re.get(), MPFR_RNDN);
    mpfr_add(b.im.get(), b.im.get(), a.im.get(), MPFR_RNDN);
  });
  std::vector<mp::Complex> twiddle;
  twiddle.reserve(A);
  mp::Real turns(bits);
  for (std::uint64_t m = 0; m < A; ++m) {
    twiddle.emplace_back(bits);
    mpfr_set_ui(turns.get(), static_cast<unsigned long>(m), MPFR_RNDN);
    mpfr_div_ui(turns.get(), turns.get(), static_cast<unsigned long>(A), MPFR_RNDN);
    mp::unit_from_turns(twiddle.back(), turns);
  }
  mp::Workspace ws(bits);
  mp::Complex acc(bits);
  std::vector<ScaledValue> row(A);
  for (std::uint64_t j = 0; j < A; ++j) {
    mpfr_set_zero(acc.re.get(), 1);
    mpfr_set_zero(acc.im.get(), 1);
    for (std::uint64_t m = 0; m < A; ++m) {
      if (bins[m].is_zero()) continue;
      ws.fma(acc, bins[m], twiddle[(m * j) % A]);
    }
    row[j] = finish_mp(acc, abs_sum, bits);
  }
  return row;
}

}  // namespace

double log_normalization(double r) { return r - 0.5 * (kLog2Pi + std::log(r)); }

double log_factorial(std::uint64_t k) {
  if (k < kLogFactorialTable.size()) return kLogFactorialTable[k];
  const double x = static_cast<double>(k) + 1.0;
  return (x - 0.5) * std::log(x) - x + 0.5 * kLog2Pi + stirling_series(x);
}

double log_scaled_weight(std::uint64_t k, double r) {
  require_radius(r);
  if (k < kLogFactorialTable.size())
    return static_cast<double>(k) * std::log(r) - kLogFactorialTable[k] - log_normalization(r);
  // (k + 1/2) log(r / (k + 1)) + (k + 1 - r) - series, arranged to avoid cancellation near k ~ r.
  const double x = static_cast<double>(k) + 1.0;
  const double d = x - r;
  return d - (static_cast<double>(k) + 0.5) * std::log1p(d / r) - stirling_series(x);
}

double window_exponent(std::uint64_t k, double r) {
  if (k == 0) throw ParameterError("window exponent is undefined at k = 0");
  require_radius(r);
  const double kd = static_cast<double>(k);
  const double d = kd - r;
  return d / (2.0 * kd) + d * d / (2.0 * kd) + d * d * d / (3.0 * kd * kd);
}

std::uint64_t window_half_width(double r, double c_N) {
  if (!(r > 1.0)) throw ParameterError("window width needs r > 1");
  if (!(c_N > 0.0)) throw ParameterError("c_N must be positive");
  return static_cast<std::uint64_t>(std::ceil(c_N * std::sqrt(r) * std::log(r)));
}

TaylorCoefficients::TaylorCoefficients(SequenceSpec spec) : spec_(std::move(spec)) { validate(spec_); }

std::shared_ptr<const Eigen::VectorXcd> TaylorCoefficients::values(std::uint64_t count) const {
  std::lock_guard lock(mutex_);
  const auto need = static_cast<Eigen::Index>(count + 1);
  if (values_ && values_->size() >= need) return values_;
  const Eigen::Index have = values_ ? values_->size() : 0;
  const auto len = static_cast<std::uint64_t>(std::max<Eigen::Index>(need, have + have / 4));
  values_ = std::make_shared<const Eigen::VectorXcd>(generate(spec_, 0, len).values);
  return values_;
}

std::shared_ptr<const TaylorCoefficients::HighPrecisionTable> TaylorCoefficients::high_precision(
    std::uint64_t count, mpfr_prec_t bits) const {
  std::lock_guard lock(mutex_);
  bits = (bits + 255) / 256 * 256;
  if (high_ && high_->bits >= bits && high_->values.size() >= count + 1) return high_;
  const std::size_t have = high_ ? high_->values.size() : 0;
  const std::size_t len = std::max<std::size_t>(count + 1, have + have / 4);
  auto table = std::make_shared<HighPrecisionTable>();
  table->bits = std::max(bits, high_ ? high_->bits : mpfr_prec_t{0});
  table->values = generate_mp(spec_, 0, len, table->bits);
  high_ = std::move(table);
  return high_;
}

TruncationCertificate direct_term_range(const TaylorCoefficients& coeffs, double r, double tol) {
  require_radius(r);
  if (!(tol > 0.0 && tol <= 1e-6)) throw ParameterError("tol must lie in (0, 1e-6]");
  TruncationCertificate cert;
  if (is_taylor(coeffs)) {
    cert.last = taylor_degree(coeffs);
    const auto xi = coeffs.values(cert.last);
    for (std::uint64_t k = 0; k <= cert.last; ++k)
      if (std::abs((*xi)[static_cast<Eigen::Index>(k)]) > 10.0 * (1.0 + std::sqrt(static_cast<double>(k))))
        throw ContractError("coefficient envelope grows faster than sqrt(n)");
    return cert;
  }
  const auto mode = static_cast<std::uint64_t>(std::floor(r));
  const auto [first, last] =
      scan_range(coeffs, mode, std::log(tol * 1e-2), [r](std::uint64_t k) { return log_scaled_weight(k, r); });
  cert.first = first;
  cert.last = last;
  // Geometric tails: successive weights shrink by r/(k+1) upwards and k/r downwards.
  const double kl = static_cast<double>(last);
  cert.tail_bound = coeffs.envelope(last + 1) * std::exp(log_scaled_weight(last + 1, r)) / (1.0 - r / (kl + 2.0));
  if (first > 0) {
    const double kf = static_cast<double>(first);
    cert.tail_bound += coeffs.envelope(0) * std::exp(log_scaled_weight(first - 1, r)) / (1.0 - (kf - 1.0) / r);
  }
  // Wiener-type data only: |xi(n)| <= C sqrt(n).
  if (coeffs.envelope(last) > 10.0 * (1.0 + std::sqrt(kl)))
    throw ContractError("coefficient envelope grows faster than sqrt(n)");
  return cert;
}

DirectEvaluation eval_direct(const TaylorCoefficients& coeffs, double r, double theta, double tol,
                             Precision precision) {
  DirectEvaluation out;
  out.truncation = direct_term_range(coeffs, r, tol);
  theta = reduce_turns(theta);
  const DoubleTerms t = scaled_terms(coeffs, r, out.truncation.first, out.truncation.last);
  if (precision != Precision::Multi) {
    const std::complex<double> s = sum_at(t, theta);
    if (precision == Precision::Double || std::abs(s) >= kCancellationLimit * t.abs_sum) {
      out.value = finish_double(s, t.abs_sum);
      return out;
    }
  }
  out.value = mp_point(coeffs, r, theta, t.abs_sum);
  out.bits = bits_for(r, t.abs_sum);
  return out;
}

std::complex<double> eval_direct(const SequenceSpec& spec, double r, double theta, double tol) {
  return eval_direct(TaylorCoefficients(spec), r, theta, tol).value.value;
}

std::complex<double> eval_window(const TaylorCoefficients& coeffs, double r, double theta, double c_N) {
  const DoubleTerms t = window_terms(coeffs, r, c_N, [r](std::uint64_t k) { return window_exponent(k, r); });
  return sum_at(t, reduce_turns(theta));
}

std::complex<double> eval_window(const SequenceSpec& spec, double r, double theta, double c_N) {
  return eval_window(TaylorCoefficients(spec), r, theta, c_N);
}

std::complex<double> eval_gaussian_window(const TaylorCoefficients& coeffs, double r, double theta, double c_N) {
  if (!is_bounded(coeffs.spec())) throw ContractError("Gaussian window requires a bounded sequence");
  const DoubleTerms t = window_terms(coeffs, r, c_N, [r](std::uint64_t k) {
    const double d = static_cast<double>(k) - r;
    return d * d / (2.0 * r);
  });
  return sum_at(t, reduce_turns(theta));
}

std::complex<double> eval_gaussian_window(const SequenceSpec& spec, double r, double theta, double c_N) {
  return eval_gaussian_window(TaylorCoefficients(spec), r, theta, c_N);
}

ScaledJet eval_jet(const TaylorCoefficients& coeffs, std::complex<double> z, double tol) {
  const double r = std::abs(z);
  const double scale = std::max(r, 1.0);
  ScaledJet jet;
  const auto xi0 = coeffs.values(1);
  if (r == 0.0) {
    const double u = std::exp(-log_normalization(1.0));
    jet.value = (*xi0)[0] * u;
    jet.derivative = (*xi0)[1] * u;
    jet.abs_sum = std::abs(jet.value);
    return jet;
  }
  const double log_r = std::log(r);
  const double log_u = log_normalization(scale);
  auto log_term = [&](std::uint64_t k) {
    return r >= 1.0 ? log_scaled_weight(k, r) : static_cast<double>(k) * log_r - log_factorial(k) - log_u;
  };
  std::uint64_t first = 0, last = 0;
  if (is_taylor(coeffs)) {
    last = taylor_degree(coeffs);
  } else {
    const auto mode = static_cast<std::uint64_t>(std::floor(r));
    // k * term for the derivative decays a little slower; the extra margin covers it.
    std::tie(first, last) = scan_range(coeffs, mode, std::log(tol) - 2.0 * std::log(2.0 + r), log_term);
  }
  const auto xi = coeffs.values(last);
  const double theta = reduce_turns(std::arg(z) / kTwoPi);
  CompensatedComplexSum value, derivative;
  CompensatedSum abs_sum;
  for (std::uint64_t k = first; k <= last; ++k) {
    const std::complex<double> x = (*xi)[static_cast<Eigen::Index>(k)];
    if (x == 0.0) continue;
    const std::complex<double> a = x * std::exp(log_term(k)) * unit_from_turns(turns_product(k, theta));
    value.add(a);
    derivative.add(static_cast<double>(k) * a);
    abs_sum.add(std::abs(a));
  }
  jet.value = value.value();
  jet.derivative = derivative.value() / z;
  jet.abs_sum = abs_sum.value();
  return jet;
}

ScaledValue eval_point(const TaylorCoefficients& coeffs, std::complex<double> z, Precision precision, double tol) {
  const double r = std::abs(z);
  return eval_direct(coeffs, r, std::arg(z) / kTwoPi, tol, precision).value;
}

ScaledValueField value_field(const TaylorCoefficients& coeffs, std::span<const double> radii, int angle_count,
                             const FieldOptions& options) {
  if (angle_count < 1) throw ParameterError("angle_count must be positive");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require_radius(radii[i]);
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ParameterError("radii must be increasing");
  }
  ScaledValueField field;
  field.radii.assign(radii.begin(), radii.end());
  field.angle_count = angle_count;
  field.method = options.method;
  field.method_parameter = options.method == FieldMethod::DirectScaled ? options.tol : options.c_N;
  const auto rows = static_cast<Eigen::Index>(radii.size());
  field.values.resize(rows, angle_count);
  field.log_abs.resize(rows, angle_count);
  field.flags.setZero(rows, angle_count);

  auto store = [&](Eigen::Index i, int j, const ScaledValue& v) {
    field.values(i, j) = v.value;
    field.log_abs(i, j) = v.log_abs;
    field.flags(i, j) = static_cast<std::uint8_t>((v.high_precision ? kHighPrecision : 0) | (v.clipped ? kClipped : 0));
  };

  if (options.method != FieldMethod::DirectScaled) {
    if (options.method == FieldMethod::GaussianWindow && !is_bounded(coeffs.spec()))
      throw ContractError("Gaussian window requires a bounded sequence");
    parallel_for(radii.size(), [&](std::size_t i) {
      const double r = radii[i];
      const DoubleTerms t =
          options.method == FieldMethod::CentralWindow
              ? window_terms(coeffs, r, options.c_N, [r](std::uint64_t k) { return window_exponent(k, r); })
              : window_terms(coeffs, r, options.c_N, [r](std::uint64_t k) {
                  const double d = static_cast<double>(k) - r;
                  return d * d / (2.0 * r);
                });
      const auto row = grid_row(t, angle_count);
      for (int j = 0; j < angle_count; ++j) {
        ScaledValue v;
        v.value = row[j];
        v.clipped = row[j] == 0.0;
        v.log_abs = v.clipped ? std::log(std::numeric_limits<double>::min()) : std::log(std::abs(row[j]));
        store(static_cast<Eigen::Index>(i), j, v);
      }
    });
    return field;
  }

  std::vector<double> abs_sums(radii.size());
  std::vector<char> needs_mp(radii.size(), 0);
  parallel_for(radii.size(), [&](std::size_t i) {
    const double r = radii[i];
    const auto cert = direct_term_range(coeffs, r, options.tol);
    const DoubleTerms t = scaled_terms(coeffs, r, cert.first, cert.last);
    abs_sums[i] = t.abs_sum;
    const auto row = grid_row(t, angle_count);
    bool cancelled = false;
    for (int j = 0; j < angle_count; ++j) {
      store(static_cast<Eigen::Index>(i), j, finish_double(row[j], t.abs_sum));
      cancelled = cancelled || std::abs(row[j]) < kCancellationLimit * t.abs_sum;
    }
    needs_mp[i] = options.precision == Precision::Multi || (options.precision == Precision::Auto && cancelled);
  });

  // One coefficient table large enough for every row that needs it.
  mpfr_prec_t max_bits = 0;
  std::uint64_t max_last = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!needs_mp[i]) continue;
    const mpfr_prec_t bits = bits_for(radii[i], abs_sums[i]);
    max_bits = std::max(max_bits, bits);
    max_last = std::max(max_last, mp_range(coeffs, radii[i], abs_sums[i], bits).second);
  }
  if (max_bits == 0) return field;
  coeffs.high_precision(max_last, max_bits);

  parallel_for(radii.size(), [&](std::size_t i) {
    if (!needs_mp[i]) return;
    const auto row = mp_grid_row(coeffs, radii[i], angle_count, abs_sums[i]);
    for (int j = 0; j < angle_count; ++j) store(static_cast<Eigen::Index>(i), j, row[j]);
  });
  return field;
}

Eigen::Index IndicatorField::clipped_count() const {
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < flags.size(); ++i) n += (flags.data()[i] & kClipped) != 0;
  return n;
}

IndicatorField indicator_field(const ScaledValueField& field) {
  IndicatorField out;
  out.radii = field.radii;
  out.angle_count = field.angle_count;
  out.flags = field.flags;
  out.h.resize(field.log_abs.rows(), field.log_abs.cols());
  for (Eigen::Index i = 0; i < out.h.rows(); ++i) {
    const double r = field.radii[static_cast<std::size_t>(i)];
    const double lu = log_normalization(r);
    for (Eigen::Index j = 0; j < out.h.cols(); ++j) out.h(i, j) = (field.log_abs(i, j) + lu) / r;
  }
  return out;
}

IndicatorField indicator_field(const TaylorCoefficients& coeffs, std::span<const double> radii, int angle_count,
                               const FieldOptions& options) {
  return indicator_field(value_field(coeffs, radii, angle_count, options));
}

L1Discrepancy l1_discrepancy(const TaylorCoefficients& coeffs, double t, double inner, double outer,
                             int radial_cells, int angular_cells, Precision precision) {
  if (!(t > 0.0)) throw ParameterError("t must be positive");
  if (!(inner > 0.0 && inner < outer && outer <= 1.5)) throw ParameterError("annulus must satisfy 0 < inner < outer <= 1.5");
  if (radial_cells < 64 || angular_cells < 256) throw ParameterError("grid must be at least 64 x 256");
  const double dr = (outer - inner) / radial_cells;
  std::vector<double> rho(static_cast<std::size_t>(radial_cells)), radii(rho.size());
  for (int i = 0; i < radial_cells; ++i) {
    rho[i] = inner + (i + 0.5) * dr;
    radii[i] = t * rho[i];
  }
  FieldOptions options;
  options.precision = precision;
  const ScaledValueField field = value_field(coeffs, radii, angular_cells, options);

  L1Discrepancy out;
  out.t = t;
  out.inner = inner;
  out.outer = outer;
  const double cell_angle = kTwoPi / angular_cells;
  CompensatedSum total;
  for (int i = 0; i < radial_cells; ++i) {
    const double lu = log_normalization(radii[i]);
    for (int j = 0; j < angular_cells; ++j) {
      const double g = (field.log_abs(i, j) + lu) / t - rho[i];
      total.add(std::abs(g) * rho[i] * dr * cell_angle);
      if (field.flags(i, j) & kClipped) ++out.clipped_cells;
    }
  }
  out.value = total.value();
  out.normalized = out.value / (kTwoPi * (outer * outer * outer - inner * inner * inner) / 3.0);
  return out;
}

}  // namespace pitslab
