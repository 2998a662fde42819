#pragma once

// Empirical Wiener spectrum of a coefficient sequence.
//
// Convention: rho(k) = lim (1/n) sum_{s<n} xi(s) conj(xi(s+k)) is the Fourier
// coefficient  int e(-k theta) dmu(theta)  of the spectral measure mu, so that
// xi(n) = e(lambda n) has rho(k) = e(-lambda k) and mu = delta_lambda. Angles are
// in turns; arcs are the half-open [j/J, (j+1)/J).

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "pitslab/sequences.hpp"

namespace pitslab {

struct AutocorrelationProfile {
  std::vector<std::uint64_t> sample_sizes;  ///< increasing
  int max_lag = 0;
  Eigen::MatrixXcd rho_hat;      ///< (size index, lag 0..max_lag)
  Eigen::MatrixXd conv_modulus;  ///< max over larger sizes of |rho_hat_n(k) - rho_hat_N(k)|

  /// rho_hat at a signed lag, extended by rho(-k) = conj(rho(k)).
  std::complex<double> rho(std::size_t size_index, int lag) const;
};

AutocorrelationProfile autocorrelation(const SequenceSpec& spec,
                                       std::vector<std::uint64_t> sample_sizes, int max_lag);

struct HerglotzResult {
  bool positive = false;
  double smallest_eigenvalue = 0.0;
  double tolerance = 0.0;
};

/// Smallest eigenvalue of the Toeplitz matrix [rho(k - j)], 0 <= j, k <= order,
/// built from the largest sample size; passes at >= -1e-6 rho(0).
HerglotzResult herglotz_check(const AutocorrelationProfile& profile, int order);
/// Same check for given rho(0..order).
HerglotzResult herglotz_check(std::span<const std::complex<double>> rho);

struct PeriodogramEstimator {
  std::uint64_t n = 0;
};
struct AbelEstimator {
  double r = 0.0;
  std::uint64_t terms = 0;
};
using SpectralEstimator = std::variant<PeriodogramEstimator, AbelEstimator>;

struct SpectralEstimate {
  int arc_count = 0;
  Eigen::VectorXd masses;
  SpectralEstimator estimator;
  double total_mass = 0.0;
  /// Points of the density grid used for the arc quadrature.
  std::uint64_t grid_size = 0;

  double arc_left(int j) const { return static_cast<double>(j) / arc_count; }
  double arc_right(int j) const { return static_cast<double>(j + 1) / arc_count; }
};

/// Arc masses of dmu_n = (1/n) |sum_{s<n} xi(s) e(-s theta)|^2 dtheta.
SpectralEstimate periodogram(const SequenceSpec& spec, std::uint64_t n, int arc_count);

/// Arc masses of dnu_r = (1 - r^2) |f(r e(-theta))|^2 dtheta, f(z) = sum xi(n) z^n.
SpectralEstimate abel_estimate(const SequenceSpec& spec, double r, int arc_count);

enum class SupportVerdict { FullSupport, GapSuspected };

struct NoGapReport {
  int arc_count = 0;
  double min_normalized_mass = 0.0;  ///< min_j masses[j] J / total; a flat spectrum scores 1
  double threshold = 0.1;
  SupportVerdict verdict = SupportVerdict::GapSuspected;
  int witness = 0;  ///< arc attaining the minimum
};

inline constexpr double kDefaultNoGapThreshold = 0.1;

NoGapReport no_gap_test(const SpectralEstimate& estimate, double threshold = kDefaultNoGapThreshold);

/// Nondecreasing step function n -> psi(n) on the tabulated sample sizes.
struct PsiEstimate {
  std::vector<std::uint64_t> sample_sizes;
  std::vector<int> levels;

  int operator()(std::uint64_t n) const;
};

/// Largest nondecreasing psi <= K with max_{|k|<=psi(n)} |rho_n(k) - rho_N(k)| <= 1/psi(n)
/// at every tabulated n, taking the largest sample N as the stand-in for the limit.
PsiEstimate psi_estimate(const AutocorrelationProfile& profile);

const char* to_string(SupportVerdict v);

}  // namespace pitslab
