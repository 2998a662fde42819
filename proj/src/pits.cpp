#include "pitslab/pits.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pitslab/errors.hpp"

namespace pitslab {
namespace {

constexpr std::uint64_t kProbeStream = 0x50524f4245534954ULL;

double uniform(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(streams::phase53(seed, kProbeStream, index)) / 0x1p53;
}

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    rethrow_labelled(e, name);
  }
}

}  // namespace

const char* to_string(TestVerdict v) {
  switch (v) {
    case TestVerdict::Pass: return "Pass";
    case TestVerdict::Fail: return "Fail";
    case TestVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(OverallVerdict v) {
  switch (v) {
    case OverallVerdict::ConsistentWithTheorem1: return "ConsistentWithTheorem1";
    case OverallVerdict::HypothesisFails: return "HypothesisFails";
    case OverallVerdict::ConclusionFails: return "ConclusionFails";
    case OverallVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

double circular_discrepancy(std::vector<double> angles, const std::vector<int>& weights) {
  if (!weights.empty() && weights.size() != angles.size())
    throw ParameterError("weights must match the angles");
  std::vector<std::pair<double, double>> pts(angles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double a = angles[i] - std::floor(angles[i]);
    const double w = weights.empty() ? 1.0 : weights[i];
    pts[i] = {a >= 1.0 ? 0.0 : a, w};
    total += w;
  }
  if (total <= 0.0) return 0.0;
  std::sort(pts.begin(), pts.end());
  // Kuiper's statistic: the largest excess plus the largest deficit of the empirical measure.
  double above = 0.0, below = 0.0, cum = 0.0;
  for (std::size_t i = 0; i < pts.size();) {
    const double x = pts[i].first;
    below = std::max(below, x - cum / total);
    for (; i < pts.size() && pts[i].first == x; ++i) cum += pts[i].second;
    above = std::max(above, cum / total - x);
  }
  return std::min(1.0, above + below);
}

EquidistributionReport equidistribution(const ZeroSet& zeros, int J, const EquidistributionThresholds& thresholds) {
  if (J < 2) throw ParameterError("equidistribution needs at least 2 sectors");
  if (thresholds.radii < 5) throw ParameterError("radial slope needs at least 5 radii");
  EquidistributionReport rep;
  rep.inner = zeros.inner;
  rep.outer = zeros.outer;
  rep.sectors = J;
  rep.thresholds = thresholds;
  rep.zero_count = zeros.count();

  std::vector<double> angles;
  std::vector<int> weights;
  for (const Zero& z : zeros.zeros) {
    angles.push_back(z.angle);
    weights.push_back(z.multiplicity);
  }
  rep.star_discrepancy = circular_discrepancy(angles, weights);

  const auto counts = sector_counts(zeros, J, zeros.outer);
  const double expected = static_cast<double>(rep.zero_count) / J;
  for (const SectorCount& s : counts) {
    const double d = static_cast<double>(s.count) - expected;
    rep.sector_chi2 += expected > 0.0 ? d * d / expected : 0.0;
  }
  rep.chi2_critical = boost::math::quantile(boost::math::chi_squared(J - 1.0), thresholds.chi2_quantile);

  const int n = thresholds.radii;
  double mr = 0.0, mc = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double r = zeros.inner + (zeros.outer - zeros.inner) * i / n;
    double c = 0.0;
    for (const Zero& z : zeros.zeros)
      if (z.modulus <= r) c += z.multiplicity;
    rep.slope_radii.push_back(r);
    rep.slope_counts.push_back(c);
    mr += r / n;
    mc += c / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (rep.slope_radii[i] - mr) * (rep.slope_counts[i] - mc);
    sxx += (rep.slope_radii[i] - mr) * (rep.slope_radii[i] - mr);
  }
  rep.radial_slope = sxy / sxx;

  if (rep.zero_count < thresholds.min_zeros) return rep;
  auto verdict = [](bool ok) { return ok ? TestVerdict::Pass : TestVerdict::Fail; };
  rep.discrepancy_verdict = verdict(rep.star_discrepancy <= thresholds.discrepancy);
  rep.chi2_verdict = verdict(rep.sector_chi2 <= rep.chi2_critical);
  rep.slope_verdict = verdict(rep.radial_slope >= thresholds.slope_low && rep.radial_slope <= thresholds.slope_high);
  const bool all = rep.discrepancy_verdict == TestVerdict::Pass && rep.chi2_verdict == TestVerdict::Pass &&
                   rep.slope_verdict == TestVerdict::Pass;
  rep.verdict = verdict(all);
  return rep;
}

ProbeResult lower_bound_probe(const TaylorCoefficients& coeffs, double r, double delta, double theta, double c_N,
                              double c_probe) {
  if (!(r >= 100.0)) throw ParameterError("probe radius must be at least 100");
  if (!(delta > 0.0 && delta <= 0.5)) throw ParameterError("probe delta must lie in (0, 0.5]");
  constexpr int kGrid = 32;
  ProbeResult res;
  res.r = r;
  res.theta = theta;
  res.delta = delta;
  res.threshold = c_probe * std::pow(r, 0.25);
  res.value = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double r0 = r + delta * r * (i + 0.5) / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      const double t0 = theta - delta + 2.0 * delta * (j + 0.5) / kGrid;
      const double v = std::abs(eval_window(coeffs, r0, t0, c_N));
      if (v > res.value) {
        res.value = v;
        res.r0 = r0;
        res.theta0 = t0 - std::floor(t0);
      }
    }
  }
  res.pass = res.value >= res.threshold;
  return res;
}

PitsProfile pits_profile(const IndicatorField& field, double pits_level) {
  const auto cells = static_cast<std::uint64_t>(field.h.size());
  if (cells < 10000) throw ParameterError("pits profile needs at least 10^4 grid cells");
  PitsProfile p;
  p.pits_level = pits_level;
  p.cells = cells;
  p.clipped_cells = static_cast<std::uint64_t>(field.clipped_count());
  std::vector<std::pair<double, double>> hw;
  hw.reserve(cells);
  double total = 0.0, pits = 0.0;
  for (Eigen::Index i = 0; i < field.h.rows(); ++i) {
    const double w = field.radii[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < field.h.cols(); ++j) {
      const double h = field.h(i, j);
      hw.emplace_back(h, w);
      total += w;
      if (h < pits_level) pits += w;
    }
  }
  std::sort(hw.begin(), hw.end());
  p.pits_area = pits / total;
  for (double level : p.levels) {
    double cum = 0.0;
    double q = hw.back().first;
    for (const auto& [h, w] : hw) {
      cum += w;
      if (cum >= level * total) {
        q = h;
        break;
      }
    }
    p.quantiles.push_back(q);
  }
  return p;
}

TestVerdict conclusion_verdict(const ComponentVerdicts& c) {
  if (c.equidistribution == TestVerdict::Fail || c.l1 == TestVerdict::Fail) return TestVerdict::Fail;
  if (c.equidistribution == TestVerdict::Inconclusive || c.l1 == TestVerdict::Inconclusive)
    return TestVerdict::Inconclusive;
  return TestVerdict::Pass;
}

OverallVerdict decide(const ComponentVerdicts& c) {
  if (c.hypothesis == TestVerdict::Fail) return OverallVerdict::HypothesisFails;
  const TestVerdict conclusion = conclusion_verdict(c);
  if (conclusion == TestVerdict::Fail) return OverallVerdict::ConclusionFails;
  if (c.hypothesis == TestVerdict::Inconclusive || conclusion == TestVerdict::Inconclusive ||
      c.probes != TestVerdict::Pass)
    return OverallVerdict::Inconclusive;
  return OverallVerdict::ConsistentWithTheorem1;
}

VerificationReport verify(const SequenceSpec& spec, const VerifyOptions& options) {
  VerificationReport rep;
  rep.spec = spec;
  rep.options = options;
  const TaylorCoefficients coeffs(spec);

  rep.nogap = stage("no-gap", [&] {
    return no_gap_test(periodogram(spec, options.periodogram_n, options.arc_count), options.nogap_threshold);
  });
  rep.components.hypothesis =
      rep.nogap.verdict == SupportVerdict::FullSupport ? TestVerdict::Pass : TestVerdict::Fail;

  rep.zeros = stage("zeros", [&] { return find_zeros(coeffs, options.zeros_inner, options.zeros_outer); });
  rep.equidistribution = stage("equidistribution", [&] {
    return equidistribution(rep.zeros, options.sectors, options.equidistribution);
  });
  rep.components.equidistribution = rep.equidistribution.verdict;

  if (options.t_values.empty()) throw ParameterError("l1: at least one t is required");
  for (double t : options.t_values) {
    rep.l1.push_back(stage("l1", [&] {
      return l1_discrepancy(coeffs, t, options.annulus_inner, options.annulus_outer, options.radial_cells,
                            options.angular_cells);
    }));
  }
  rep.components.l1 =
      rep.l1.back().normalized <= options.l1_threshold ? TestVerdict::Pass : TestVerdict::Fail;

  bool all = true;
  for (int i = 0; i < options.probes; ++i) {
    const double r = options.probe_r_low + (options.probe_r_high - options.probe_r_low) *
                                               uniform(options.probe_seed, 2 * static_cast<std::uint64_t>(i));
    const double theta = uniform(options.probe_seed, 2 * static_cast<std::uint64_t>(i) + 1);
    rep.probes.push_back(stage("probe", [&] {
      return lower_bound_probe(coeffs, r, options.probe_delta, theta, options.c_N, options.c_probe);
    }));
    all = all && rep.probes.back().pass;
  }
  rep.components.probes = all ? TestVerdict::Pass : TestVerdict::Fail;

  rep.conclusion = conclusion_verdict(rep.components);
  rep.verdict = decide(rep.components);
  return rep;
}

}  // namespace pitslab
