// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance                 run all criteria, exit 1 if any fails
//   acceptance 3 5             run a subset
//   acceptance --known-red 9   a failing criterion in this list exits 77 instead
//                              of 1 (ctest reports it as skipped, never as passed)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "pitslab/evaluator.hpp"
#include "pitslab/io.hpp"
#include "pitslab/pits.hpp"
#include "pitslab/sieve.hpp"
#include "pitslab/spectrum.hpp"
#include "pitslab/squareness.hpp"
#include "pitslab/zeros.hpp"

using namespace pitslab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SequenceSpec poly_sqrt2() { return {PolynomialPhase{{Real::parse("sqrt2")}}}; }
// xi(n) = (1 + (-1)^n) / 2, so F = cosh.
SequenceSpec cosh_series() { return {TrigPolynomial{{{Real(0.0), 0.5}, {Real::parse("1/2"), 0.5}}}}; }

// F = 1 - z^2; the data are the derivatives F^(n)(0).
SequenceSpec one_minus_z2() { return {TaylorData{{1.0, 0.0, -2.0}}}; }

Outcome criterion1() {
  const auto t0 = Clock::now();
  const TaylorCoefficients c({Constant{}});
  double worst = 0.0;
  for (double r : {10.0, 100.0, 1000.0}) {
    const double v = std::abs(eval_direct(c, r, 0.0).value.value);
    worst = std::max(worst, std::abs(v / std::sqrt(2 * std::numbers::pi * r) - 1.0));
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-6 && dt < 1.0, fmt("max relative error %.2e (tol 1e-6), %.3f s (limit 1 s)", worst, dt)};
}

double window_gap(const TaylorCoefficients& c, double r) {
  const std::vector<double> radii{r};
  FieldOptions direct;
  FieldOptions window;
  window.method = FieldMethod::CentralWindow;
  const auto f = value_field(c, radii, 256, direct);
  const auto w = value_field(c, radii, 256, window);
  double d = 0.0;
  for (int j = 0; j < 256; ++j) d = std::max(d, std::abs(std::abs(f.values(0, j)) - std::abs(w.values(0, j))));
  return d;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& [name, spec] : {std::pair{"poly-phase(sqrt2)", poly_sqrt2()}, std::pair{"moebius", SequenceSpec{Moebius{}}}}) {
    const TaylorCoefficients c(spec);
    std::vector<double> d;
    for (double r : {400.0, 900.0, 1600.0}) d.push_back(window_gap(c, r));
    const bool monotone = d[1] <= 1.2 * d[0] && d[2] <= 1.2 * d[1];
    ok = ok && monotone && d[2] <= 0.05;
    detail += fmt("%s D = %.4f, %.4f, %.4f; ", name, d[0], d[1], d[2]);
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 120.0;
  return {ok, detail + fmt("(nonincreasing with 20%% slack, D(1600) <= 0.05), %.1f s", dt)};
}

// Zeros of zs inside the closed sector, with multiplicity.
int count_in_sector(const ZeroSet& zs, const Sector& s) {
  int n = 0;
  for (const Zero& z : zs.zeros) {
    if (z.modulus < s.inner || z.modulus > s.outer) continue;
    double a = z.angle - s.theta1;
    a -= std::floor(a);
    if (a <= s.theta2 - s.theta1) n += z.multiplicity;
  }
  return n;
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    SequenceSpec spec;
    double inner, outer;
  };
  const std::vector<Case> cases = {{"cosh", cosh_series(), 1.0, 10.0},
                                   {"1-z^2", one_minus_z2(), 0.5, 2.0},
                                   {"poly-phase(sqrt2)", poly_sqrt2(), 50.0, 300.0}};
  std::mt19937_64 rng(20240611);
  bool ok = true;
  std::string detail;
  for (const Case& cs : cases) {
    const TaylorCoefficients c(cs.spec);
    const ZeroSet zs = find_zeros(c, cs.inner, cs.outer);
    std::uniform_real_distribution<double> radius(cs.inner, cs.outer), turn(0.0, 1.0), width(0.05, 0.5);
    int agree = 0;
    const int trials = 20;
    for (int i = 0; i < trials; ++i) {
      double a = radius(rng), b = radius(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3 * cs.outer) b = std::min(cs.outer, a + 0.1 * (cs.outer - cs.inner));
      const double t1 = turn(rng);
      const Sector s{a, b, t1, t1 + width(rng)};
      const JitteredWinding w = winding_count_jittered(c, s, {}, static_cast<std::uint64_t>(i));
      if (w.count == count_in_sector(zs, w.sector)) ++agree;
    }
    ok = ok && agree == trials;
    detail += fmt("%s %d/%d; ", cs.name, agree, trials);
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 300.0;
  return {ok, detail + fmt("exact match required, %.1f s", dt)};
}

Outcome criterion4() {
  const ZeroSet zs = find_zeros(TaylorCoefficients(cosh_series()), 1.0, 10.0);
  const auto expected = oracles::cosh_zeros(1.0, 10.0);
  bool ok = zs.zeros.size() == expected.size() && zs.count() == expected.size();
  double worst = 0.0;
  if (ok) {
    std::vector<std::complex<double>> got;
    for (const Zero& z : zs.zeros) got.push_back(z.point());
    for (const auto& e : expected) {
      double best = 1e300;
      for (const auto& g : got) best = std::min(best, std::abs(g - e));
      worst = std::max(worst, best);
    }
    for (const Zero& z : zs.zeros) ok = ok && (z.angle == 0.25 || z.angle == 0.75);
    ok = ok && worst <= 1e-9;
  }
  return {ok, fmt("%zu zeros (expect 6) at angles 1/4, 3/4; max distance to closed form %.2e (tol 1e-9)",
                  zs.zeros.size(), worst)};
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  const ZeroSet zs = find_zeros(TaylorCoefficients(poly_sqrt2()), 50.0, 300.0);
  const EquidistributionReport rep = equidistribution(zs, 16);
  const ZeroSet ch = find_zeros(TaylorCoefficients(cosh_series()), 1.0, 10.0);
  const EquidistributionReport neg = equidistribution(ch, 16);
  const double dt = seconds_since(t0);
  const bool ok = rep.star_discrepancy <= 0.1 && rep.radial_slope >= 0.85 && rep.radial_slope <= 1.15 &&
                  neg.star_discrepancy >= 0.4 && dt < 600.0;
  return {ok, fmt("poly-phase(sqrt2): %llu zeros, discrepancy %.4f (<= 0.1), slope %.4f (in [0.85, 1.15]); "
                  "cosh discrepancy %.3f (>= 0.4); %.1f s",
                  static_cast<unsigned long long>(zs.count()), rep.star_discrepancy, rep.radial_slope,
                  neg.star_discrepancy, dt)};
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  const std::uint64_t n = 1 << 14;
  bool ok = true;
  std::string detail;
  for (const auto& [name, spec] : {std::pair{"poly-phase(sqrt2)", poly_sqrt2()},
                                   std::pair{"steinhaus", SequenceSpec{IidRandom{IidDistribution::Steinhaus, 0}}}}) {
    const NoGapReport r = no_gap_test(periodogram(spec, n, 64));
    ok = ok && r.min_normalized_mass >= 0.5;
    detail += fmt("%s %.3f; ", name, r.min_normalized_mass);
  }
  const std::vector<std::pair<const char*, SequenceSpec>> gaps = {
      {"constant", {Constant{}}},
      {"pure-exp(1/3)", {PureExponential{Real::parse("1/3")}}},
      {"(1,0,1,0,...)", cosh_series()},
      {"frac-power(1/2)", {FractionalPowerPhase{Real(1.0), Real::parse("1/2")}}}};
  for (const auto& [name, spec] : gaps) {
    const NoGapReport r = no_gap_test(periodogram(spec, n, 64));
    ok = ok && r.verdict == SupportVerdict::GapSuspected;
    detail += fmt("%s %s; ", name, to_string(r.verdict));
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 30.0;
  return {ok, detail + fmt("%.2f s", dt)};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const auto p = autocorrelation({Moebius{}}, {1'000'000}, 20);
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) worst = std::max(worst, std::abs(p.rho_hat(0, k)));
  const double rho0 = p.rho_hat(0, 0).real();
  const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
  const double dt = seconds_since(t0);
  const bool ok = worst <= 0.01 && std::abs(rho0 - target) <= 0.002 && dt < 30.0;
  return {ok, fmt("max_{1<=k<=20} |rho(k)| = %.5f (<= 0.01), rho(0) = %.5f vs 6/pi^2 = %.5f (tol 0.002), %.2f s",
                  worst, rho0, target, dt)};
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  bool ok = true;
  int checked = 0;
  for (std::uint64_t m : {50, 100, 300})
    for (Ratio lambda : {Ratio{3, 2}, Ratio{2, 1}})
      for (std::uint64_t k : {1, 2, 3}) {
        const auto got = card_b(m, lambda, k);
        const auto want = oracles::card_b_brute(m, lambda.num, lambda.den, k);
        ok = ok && got.card_b == want.all && got.card_b_squarefree == want.squarefree;
        ++checked;
      }
  std::string detail = fmt("card_B exact on %d cases; ", checked);
  for (auto [lambda, k] : {std::pair{Ratio{3, 2}, std::uint64_t{2}}, std::pair{Ratio{2, 1}, std::uint64_t{1}}}) {
    const auto mc = rademacher_pair_moment({7}, 50, lambda, k, 100'000);
    const double exact = oracles::rademacher_second_moment(50, lambda.num, lambda.den, k);
    const double z = std::abs(mc.mean - exact) / mc.standard_error;
    ok = ok && mc.exact == exact && z <= 3.0;
    detail += fmt("MC m=50 lambda=%g k=%llu: %.2f vs exact %.0f (%.2f SE); ", lambda.value(),
                  static_cast<unsigned long long>(k), mc.mean, exact, z);
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 300.0;
  return {ok, detail + fmt("%.1f s", dt)};
}

Outcome criterion9() {
  const std::vector<double> radii{800.0};
  const IndicatorField h =
      indicator_field(TaylorCoefficients({FractionalPowerPhase{Real(1.0), Real::parse("1/2")}}), radii, 256);
  double worst = 0.0;
  for (int j = 0; j < h.angle_count; ++j) {
    if (h.flags(0, j) & kClipped) continue;
    worst = std::max(worst, std::abs(h.h(0, j) - std::max(0.0, std::cos(2 * std::numbers::pi * h.angle(j)))));
  }
  return {worst <= 0.05, fmt("r=800: max |h - cos+| = %.4f (tol 0.05), %lld clipped cells", worst,
                             static_cast<long long>(h.clipped_count()))};
}

Outcome criterion10() {
  const Json config = {{"kind", "poly-phase"}, {"coefficients", Json::array({"sqrt2"})}};
  std::string first, second;
  for (std::string* out : {&first, &second}) {
    const SequenceSpec spec = spec_from_json(config);
    *out = to_json(verify(spec)).dump(2);
  }
  return {first == second, fmt("report.json %zu bytes, hash %s vs %s", first.size(), content_hash(first).c_str(),
                               content_hash(second).c_str())};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<const char*, std::function<Outcome()>>> all = {
      {"closed-form evaluator, xi = 1", criterion1},
      {"window sum tracks |F|/U", criterion2},
      {"winding count equals zero count", criterion3},
      {"cosh zeros", criterion4},
      {"zero angles equidistribute", criterion5},
      {"periodogram no-gap verdicts", criterion6},
      {"Moebius autocorrelations", criterion7},
      {"pair-square counts and Rademacher moment", criterion8},
      {"indicator of e(sqrt n) is cos+", criterion9},
      {"byte-identical verify reports", criterion10},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected, known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-red" && i + 1 < argc)
      known_red.insert(std::atoi(argv[++i]));
    else
      selected.insert(std::atoi(a.c_str()));
  }
  int failures = 0, expected_failures = 0;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria()[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria()[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) (known_red.count(id) ? expected_failures : failures)++;
  }
  if (failures) return 1;
  return expected_failures ? 77 : 0;
}
