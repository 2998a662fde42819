#include "pitslab/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "pitslab/errors.hpp"
#include "pitslab/summation.hpp"

namespace pitslab {

namespace {

// S_m = sum_s a_s e(-s (m + 1/2) / L) for m < L: cell midpoints of an L-point grid.
std::vector<std::complex<double>> midpoint_transform(const Eigen::VectorXcd& a, std::uint64_t grid) {
  std::vector<std::complex<double>> folded(grid, 0.0);
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    const auto u = static_cast<std::uint64_t>(s);
    const double shift = -static_cast<double>(u % (2 * grid)) / static_cast<double>(2 * grid);
    folded[u % grid] += a[s] * unit_from_turns(shift);
  }
  std::vector<std::complex<double>> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, folded);
  return out;
}

SpectralEstimate arc_masses(const std::vector<std::complex<double>>& transform, double density_scale,
                            int arc_count, SpectralEstimator estimator) {
  const std::uint64_t grid = transform.size();
  SpectralEstimate est;
  est.arc_count = arc_count;
  est.masses = Eigen::VectorXd::Zero(arc_count);
  est.estimator = estimator;
  est.grid_size = grid;
  const std::uint64_t per_arc = grid / static_cast<std::uint64_t>(arc_count);
  CompensatedSum total;
  for (int j = 0; j < arc_count; ++j) {
    CompensatedSum mass;
    for (std::uint64_t m = j * per_arc; m < (j + 1) * per_arc; ++m)
      mass.add(std::norm(transform[m]) * density_scale / static_cast<double>(grid));
    est.masses[j] = mass.value();
    total.add(mass.value());
  }
  est.total_mass = total.value();
  return est;
}

void check_arc_count(int arc_count) {
  if (arc_count < 1 || !std::has_single_bit(static_cast<unsigned>(arc_count)))
    throw ParameterError("arc count J must be a power of two, got " + std::to_string(arc_count));
}

}  // namespace

std::complex<double> AutocorrelationProfile::rho(std::size_t size_index, int lag) const {
  const int k = std::abs(lag);
  if (k > max_lag) throw ParameterError("lag exceeds the profile's maximum lag");
  const auto v = rho_hat(static_cast<Eigen::Index>(size_index), k);
  return lag >= 0 ? v : std::conj(v);
}

AutocorrelationProfile autocorrelation(const SequenceSpec& spec, std::vector<std::uint64_t> sample_sizes,
                                       int max_lag) {
  if (sample_sizes.empty()) throw ParameterError("autocorrelation needs at least one sample size");
  if (!std::is_sorted(sample_sizes.begin(), sample_sizes.end()) ||
      std::adjacent_find(sample_sizes.begin(), sample_sizes.end()) != sample_sizes.end() ||
      sample_sizes.front() == 0)
    throw ParameterError("sample sizes must be positive and strictly increasing");
  if (max_lag < 0 || static_cast<std::uint64_t>(max_lag) > sample_sizes.front() / 10)
    throw ParameterError("max lag K must satisfy 0 <= K <= min(sample sizes)/10");

  const std::uint64_t largest = sample_sizes.back();
  const auto xi = generate(spec, 0, largest + static_cast<std::uint64_t>(max_lag)).values;

  AutocorrelationProfile p;
  p.sample_sizes = sample_sizes;
  p.max_lag = max_lag;
  const auto rows = static_cast<Eigen::Index>(sample_sizes.size());
  p.rho_hat.resize(rows, max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    CompensatedComplexSum sum;
    std::size_t next = 0;
    for (std::uint64_t s = 0; s < largest; ++s) {
      sum.add(xi[static_cast<Eigen::Index>(s)] * std::conj(xi[static_cast<Eigen::Index>(s) + k]));
      if (s + 1 == sample_sizes[next]) {
        p.rho_hat(static_cast<Eigen::Index>(next), k) = sum.value() / static_cast<double>(s + 1);
        ++next;
      }
    }
  }
  // rho_n(0) is a mean of |xi|^2; drop the rounding residue in the imaginary part
  for (Eigen::Index i = 0; i < rows; ++i) p.rho_hat(i, 0) = p.rho_hat(i, 0).real();

  p.conv_modulus.resize(rows, max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double running = 0.0;
    for (Eigen::Index i = rows - 1; i >= 0; --i) {
      running = std::max(running, std::abs(p.rho_hat(i, k) - p.rho_hat(rows - 1, k)));
      p.conv_modulus(i, k) = running;
    }
  }
  return p;
}

HerglotzResult herglotz_check(std::span<const std::complex<double>> rho) {
  if (rho.empty()) throw ParameterError("herglotz_check needs rho(0)");
  const auto n = static_cast<Eigen::Index>(rho.size());
  Eigen::MatrixXcd t(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      t(j, k) = k >= j ? rho[static_cast<std::size_t>(k - j)] : std::conj(rho[static_cast<std::size_t>(j - k)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(t, Eigen::EigenvaluesOnly);
  HerglotzResult r;
  r.smallest_eigenvalue = solver.eigenvalues().minCoeff();
  r.tolerance = -1e-6 * rho[0].real();
  r.positive = r.smallest_eigenvalue >= r.tolerance;
  return r;
}

HerglotzResult herglotz_check(const AutocorrelationProfile& profile, int order) {
  if (order < 0 || order > profile.max_lag)
    throw ParameterError("Toeplitz order must lie in [0, K]");
  std::vector<std::complex<double>> rho(static_cast<std::size_t>(order) + 1);
  const std::size_t last = profile.sample_sizes.size() - 1;
  for (int k = 0; k <= order; ++k) rho[static_cast<std::size_t>(k)] = profile.rho(last, k);
  return herglotz_check(rho);
}

SpectralEstimate periodogram(const SequenceSpec& spec, std::uint64_t n, int arc_count) {
  check_arc_count(arc_count);
  if (static_cast<std::uint64_t>(arc_count) > n)
    throw ParameterError("arc count J = " + std::to_string(arc_count) + " exceeds n = " + std::to_string(n));
  const auto xi = generate(spec, 0, n).values;
  // grid >= n makes the quadrature exact for |trig poly of degree < n|^2
  const std::uint64_t grid = std::max<std::uint64_t>(8 * static_cast<std::uint64_t>(arc_count), std::bit_ceil(n));
  return arc_masses(midpoint_transform(xi, grid), 1.0 / static_cast<double>(n), arc_count,
                    PeriodogramEstimator{n});
}

SpectralEstimate abel_estimate(const SequenceSpec& spec, double r, int arc_count) {
  check_arc_count(arc_count);
  if (!(r > 0.0 && r < 1.0)) throw ParameterError("Abel radius must satisfy 0 < r < 1");
  const double bound = std::max(envelope(spec, 0), 1e-300);
  // r^terms * max|xi| <= 1e-12 (1 - r)
  const auto terms = static_cast<std::uint64_t>(std::ceil(std::log(1e-12 * (1.0 - r) / bound) / std::log(r))) + 1;
  Eigen::VectorXcd a = generate(spec, 0, terms).values;
  const double log_r = std::log(r);
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] *= std::exp(static_cast<double>(k) * log_r);
  const std::uint64_t grid = std::max<std::uint64_t>(8 * static_cast<std::uint64_t>(arc_count), std::bit_ceil(terms));
  return arc_masses(midpoint_transform(a, grid), 1.0 - r * r, arc_count, AbelEstimator{r, terms});
}

NoGapReport no_gap_test(const SpectralEstimate& estimate, double threshold) {
  if (estimate.arc_count < 8) throw ParameterError("no-gap test needs at least 8 arcs");
  NoGapReport rep;
  rep.arc_count = estimate.arc_count;
  rep.threshold = threshold;
  Eigen::Index witness = 0;
  const double smallest = estimate.masses.minCoeff(&witness);
  rep.witness = static_cast<int>(witness);
  rep.min_normalized_mass =
      estimate.total_mass > 0.0 ? smallest * estimate.arc_count / estimate.total_mass : 0.0;
  rep.verdict = rep.min_normalized_mass >= threshold ? SupportVerdict::FullSupport : SupportVerdict::GapSuspected;
  return rep;
}

int PsiEstimate::operator()(std::uint64_t n) const {
  int level = 0;
  for (std::size_t i = 0; i < sample_sizes.size() && sample_sizes[i] <= n; ++i) level = levels[i];
  return level;
}

PsiEstimate psi_estimate(const AutocorrelationProfile& profile) {
  const std::size_t rows = profile.sample_sizes.size();
  if (rows < 3) throw ParameterError("psi_estimate needs at least three sample sizes");
  const int k_max = profile.max_lag;
  // per-size admissible level: err(L) * L <= 1 is monotone in L
  std::vector<int> admissible(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    double err = 0.0;
    int level = 0;
    for (int l = 1; l <= k_max; ++l) {
      err = std::max(err, std::abs(profile.rho_hat(static_cast<Eigen::Index>(i), l) -
                                   profile.rho_hat(static_cast<Eigen::Index>(rows - 1), l)));
      err = std::max(err, std::abs(profile.rho_hat(static_cast<Eigen::Index>(i), 0) -
                                   profile.rho_hat(static_cast<Eigen::Index>(rows - 1), 0)));
      if (err * l > 1.0) break;
      level = l;
    }
    admissible[i] = level;
  }
  PsiEstimate psi;
  psi.sample_sizes = profile.sample_sizes;
  psi.levels.assign(rows, 0);
  int running = k_max;
  for (std::size_t i = rows; i-- > 0;) {
    running = std::min(running, admissible[i]);
    psi.levels[i] = running;
  }
  return psi;
}

const char* to_string(SupportVerdict v) {
  return v == SupportVerdict::FullSupport ? "FullSupport" : "GapSuspected";
}

}  // namespace pitslab
