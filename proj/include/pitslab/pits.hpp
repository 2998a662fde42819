#pragma once

// Statistics and verdicts built on the other modules: angular equidistribution
// of zeros, the window lower-bound probe, the pits profile of an indicator
// field, and the end-to-end verification report.

#include <cstdint>
#include <vector>

#include "pitslab/evaluator.hpp"
#include "pitslab/spectrum.hpp"
#include "pitslab/zeros.hpp"

namespace pitslab {

enum class TestVerdict { Pass, Fail, Inconclusive };
const char* to_string(TestVerdict v);

struct EquidistributionThresholds {
  double discrepancy = 0.1;
  double chi2_quantile = 0.99;
  double slope_low = 0.8;
  double slope_high = 1.2;
  std::uint64_t min_zeros = 30;
  int radii = 10;  ///< nested radii for the radial slope
};

/// sup over arcs |empirical - uniform| of angles in turns, each counted `weights[i]` times.
double circular_discrepancy(std::vector<double> angles, const std::vector<int>& weights = {});

struct EquidistributionReport {
  double inner = 0.0, outer = 0.0;
  std::uint64_t zero_count = 0;
  int sectors = 0;
  double star_discrepancy = 0.0;
  double sector_chi2 = 0.0;
  double chi2_critical = 0.0;
  double radial_slope = 0.0;
  std::vector<double> slope_radii;
  std::vector<double> slope_counts;
  EquidistributionThresholds thresholds;
  TestVerdict discrepancy_verdict = TestVerdict::Inconclusive;
  TestVerdict chi2_verdict = TestVerdict::Inconclusive;
  TestVerdict slope_verdict = TestVerdict::Inconclusive;
  TestVerdict verdict = TestVerdict::Inconclusive;
};

EquidistributionReport equidistribution(const ZeroSet& zeros, int J, const EquidistributionThresholds& thresholds = {});

inline constexpr double kDefaultProbeConstant = 0.3;

struct ProbeResult {
  double r = 0.0, theta = 0.0, delta = 0.0;
  double r0 = 0.0, theta0 = 0.0;  ///< grid point attaining the maximum
  double value = 0.0;             ///< max |window sum| over the grid
  double threshold = 0.0;         ///< c_probe r^{1/4}
  bool pass = false;
};

/// Maximises |eval_window| over a 32 x 32 grid in (r, r + delta r) x (theta - delta, theta + delta).
ProbeResult lower_bound_probe(const TaylorCoefficients& coeffs, double r, double delta, double theta,
                              double c_N = 1.0, double c_probe = kDefaultProbeConstant);

struct PitsProfile {
  std::vector<double> levels{0.01, 0.05, 0.25, 0.50, 0.95};
  std::vector<double> quantiles;  ///< area-weighted quantiles of h at `levels`
  double pits_area = 0.0;         ///< area fraction with h < pits_level
  double pits_level = 0.9;
  std::uint64_t cells = 0;
  std::uint64_t clipped_cells = 0;
};

/// Cells are weighted by radius, i.e. by their area in the plane.
PitsProfile pits_profile(const IndicatorField& field, double pits_level = 0.9);

enum class OverallVerdict { ConsistentWithTheorem1, HypothesisFails, ConclusionFails, Inconclusive };
const char* to_string(OverallVerdict v);

struct VerifyOptions {
  std::uint64_t periodogram_n = 1 << 14;
  int arc_count = 64;
  double nogap_threshold = kDefaultNoGapThreshold;
  double zeros_inner = 50.0, zeros_outer = 300.0;
  int sectors = 16;
  EquidistributionThresholds equidistribution;
  std::vector<double> t_values{200.0, 400.0};
  double annulus_inner = 0.5, annulus_outer = 1.0;
  int radial_cells = 64, angular_cells = 256;
  double l1_threshold = 0.1;  ///< on the normalised discrepancy at the largest t
  int probes = 5;
  std::uint64_t probe_seed = 1;
  double probe_r_low = 400.0, probe_r_high = 1600.0;
  double probe_delta = 0.05;
  double c_N = 1.0;
  double c_probe = kDefaultProbeConstant;
};

struct ComponentVerdicts {
  TestVerdict hypothesis = TestVerdict::Inconclusive;       ///< no-gap test
  TestVerdict probes = TestVerdict::Inconclusive;           ///< all lower-bound probes pass
  TestVerdict equidistribution = TestVerdict::Inconclusive;
  TestVerdict l1 = TestVerdict::Inconclusive;
};

/// Conclusion side of the decision table: zero equidistribution and L1 convergence.
TestVerdict conclusion_verdict(const ComponentVerdicts& c);
/// The decision table; total over all component combinations.
OverallVerdict decide(const ComponentVerdicts& c);

struct VerificationReport {
  SequenceSpec spec;
  VerifyOptions options;
  NoGapReport nogap;
  ZeroSet zeros;
  EquidistributionReport equidistribution;
  std::vector<L1Discrepancy> l1;
  std::vector<ProbeResult> probes;
  ComponentVerdicts components;
  TestVerdict conclusion = TestVerdict::Inconclusive;
  OverallVerdict verdict = OverallVerdict::Inconclusive;
};

/// Runs every stage; stage errors are rethrown with the stage name prepended.
VerificationReport verify(const SequenceSpec& spec, const VerifyOptions& options = {});

}  // namespace pitslab
