#pragma once

// Evaluation of F(z) = sum xi(k) z^k / k! normalised by U(r) = e^r / sqrt(2 pi r).
//
// Terms are formed in the log domain, so nothing overflows for r up to 1e6.
// Where the terms cancel below what double precision resolves (the left
// half-plane of e^z, deep pits), rows or points are redone in MPFR arithmetic
// with enough bits to resolve |F/U| down to about e^{-2r}.

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "pitslab/mp.hpp"
#include "pitslab/sequences.hpp"

namespace pitslab {

/// log U(r) = r - log sqrt(2 pi r).
double log_normalization(double r);

/// log k!, from an exact table below 10 and a Stirling series above.
double log_factorial(std::uint64_t k);

/// log(r^k / (k! U(r))), the log of the k-th normalised Taylor weight.
double log_scaled_weight(std::uint64_t k, double r);

/// (k-r)/(2k) + (k-r)^2/(2k) + (k-r)^3/(3k^2), the exponent of the central-window weights.
double window_exponent(std::uint64_t k, double r);

/// Half-width ceil(c_N sqrt(r) log r) of the central window.
std::uint64_t window_half_width(double r, double c_N);

enum class Precision {
  Double,  ///< double arithmetic only; unresolvable cancellation is clipped
  Multi,   ///< always MPFR
  Auto,    ///< double, redone in MPFR where cancellation exceeds 8 digits
};

/// Memoised coefficient data of one sequence, shared by many evaluations.
/// Safe to use from several threads.
class TaylorCoefficients {
 public:
  explicit TaylorCoefficients(SequenceSpec spec);

  const SequenceSpec& spec() const noexcept { return spec_; }
  double envelope(std::uint64_t k) const { return pitslab::envelope(spec_, k); }

  /// xi(0 .. count) or more.
  std::shared_ptr<const Eigen::VectorXcd> values(std::uint64_t count) const;

  struct HighPrecisionTable {
    mpfr_prec_t bits = 0;
    std::vector<mp::Complex> values;
  };
  /// xi(0 .. count) or more, at >= bits of precision.
  std::shared_ptr<const HighPrecisionTable> high_precision(std::uint64_t count, mpfr_prec_t bits) const;

 private:
  SequenceSpec spec_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<const Eigen::VectorXcd> values_;
  mutable std::shared_ptr<const HighPrecisionTable> high_;
};

struct ScaledValue {
  std::complex<double> value;  ///< F/U(r); underflows to 0 when |F/U| < 1e-308
  double log_abs = 0.0;        ///< log|F/U(r)|; at the resolution floor when clipped
  double arg = 0.0;            ///< arg F in radians
  double abs_sum = 0.0;        ///< sum of |terms|, the cancellation scale
  bool high_precision = false;
  bool clipped = false;        ///< |F/U| below the resolution of the arithmetic used
};

struct TruncationCertificate {
  std::uint64_t first = 0;  ///< first index summed
  std::uint64_t last = 0;   ///< last index summed
  double tail_bound = 0.0;  ///< bound on the omitted terms, normalised units
};

struct DirectEvaluation {
  ScaledValue value;
  TruncationCertificate truncation;
  mpfr_prec_t bits = 53;
};

/// Terms with envelope(k) r^k/(k! U(r)) >= tol/100 around the mode k ~ r.
TruncationCertificate direct_term_range(const TaylorCoefficients& coeffs, double r, double tol);

/// F(r e(theta)) / U(r), theta in turns.
DirectEvaluation eval_direct(const TaylorCoefficients& coeffs, double r, double theta, double tol = 1e-12,
                             Precision precision = Precision::Double);
std::complex<double> eval_direct(const SequenceSpec& spec, double r, double theta, double tol = 1e-12);

/// sum_{|k-r|<=N} xi(k) e(k theta) e^{-window_exponent(k, r)}, N = window_half_width(r, c_N).
std::complex<double> eval_window(const TaylorCoefficients& coeffs, double r, double theta, double c_N = 1.0);
std::complex<double> eval_window(const SequenceSpec& spec, double r, double theta, double c_N = 1.0);

/// Same window with weights e^{-(k-r)^2/(2r)}; bounded sequences only.
std::complex<double> eval_gaussian_window(const TaylorCoefficients& coeffs, double r, double theta,
                                          double c_N = 1.0);
std::complex<double> eval_gaussian_window(const SequenceSpec& spec, double r, double theta, double c_N = 1.0);

/// F and F' at a complex point, both divided by U(max(|z|, 1)). Double precision.
struct ScaledJet {
  std::complex<double> value;
  std::complex<double> derivative;
  double abs_sum = 0.0;
};
ScaledJet eval_jet(const TaylorCoefficients& coeffs, std::complex<double> z, double tol = 1e-16);

/// F(z) / U(|z|) at a complex point with the given precision policy.
ScaledValue eval_point(const TaylorCoefficients& coeffs, std::complex<double> z,
                       Precision precision = Precision::Auto, double tol = 1e-14);

enum class FieldMethod { DirectScaled, CentralWindow, GaussianWindow };

struct FieldOptions {
  FieldMethod method = FieldMethod::DirectScaled;
  double c_N = 1.0;
  double tol = 1e-12;
  Precision precision = Precision::Auto;
};

enum FieldFlag : std::uint8_t { kHighPrecision = 1, kClipped = 2 };

/// F/U on the polar grid radii x {j / angle_count}.
struct ScaledValueField {
  std::vector<double> radii;
  int angle_count = 0;
  FieldMethod method = FieldMethod::DirectScaled;
  double method_parameter = 0.0;  ///< tol for DirectScaled, c_N for the windows
  Eigen::MatrixXcd values;        ///< (radius, angle)
  Eigen::MatrixXd log_abs;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> flags;

  double angle(int j) const { return static_cast<double>(j) / angle_count; }
};

ScaledValueField value_field(const TaylorCoefficients& coeffs, std::span<const double> radii, int angle_count,
                             const FieldOptions& options = {});

/// h(theta; r) = log|F(r e(theta))| / r on the same grid.
struct IndicatorField {
  std::vector<double> radii;
  int angle_count = 0;
  Eigen::MatrixXd h;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> flags;

  double angle(int j) const { return static_cast<double>(j) / angle_count; }
  Eigen::Index clipped_count() const;
};

IndicatorField indicator_field(const ScaledValueField& field);
IndicatorField indicator_field(const TaylorCoefficients& coeffs, std::span<const double> radii, int angle_count,
                               const FieldOptions& options = {});

struct L1Discrepancy {
  double t = 0.0;
  double inner = 0.0, outer = 0.0;
  double value = 0.0;       ///< midpoint value of the integral of |log|F(tz)|/t - |z|| over the annulus
  double normalized = 0.0;  ///< value divided by the integral of |z| over the annulus
  std::uint64_t clipped_cells = 0;
};

L1Discrepancy l1_discrepancy(const TaylorCoefficients& coeffs, double t, double inner, double outer,
                             int radial_cells = 64, int angular_cells = 256, Precision precision = Precision::Auto);

}  // namespace pitslab
