#include "pitslab/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pitslab/parallel.hpp"

namespace pitslab {
namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGoldenTurn = 0.38196601125010515;  // 2 - golden ratio
constexpr double kAberthTolerance = 1e-12;
constexpr double kNoiseLevel = 4.0 * std::numeric_limits<double>::epsilon();
constexpr double kClusterRadius = 1e-8;
// Ill-conditioned roots this close to a certified one are taken as part of a multiple zero.
constexpr double kMergeRadius = 1e-5;
constexpr double kAnnulusSlack = 1e-9;
constexpr double kResidualLimit = 1e-6;
// A root is only certified where double evaluation resolves it to this accuracy.
constexpr double kConditionLimit = 1e-6;
constexpr double kAngleQuantum = 1099511627776.0;  // 2^40

double principal(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

struct Horner {
  cd log_derivative;  // P'(w)/P(w)
  double noise_ratio; // |P(w)| / sum |c_k w^k|
};

// Reversed Horner outside the unit disk keeps every partial value bounded.
Horner horner(const std::vector<cd>& c, cd w) {
  const std::size_t d = c.size() - 1;
  if (std::abs(w) <= 1.0) {
    const double aw = std::abs(w);
    cd p = c[d], dp = 0.0;
    double pa = std::abs(c[d]);
    for (std::size_t k = d; k-- > 0;) {
      dp = dp * w + p;
      p = p * w + c[k];
      pa = pa * aw + std::abs(c[k]);
    }
    return {dp / p, std::abs(p) / pa};
  }
  const cd y = 1.0 / w;
  const double ay = std::abs(y);
  cd q = c[0], dq = 0.0;
  double qa = std::abs(c[0]);
  for (std::size_t k = 1; k <= d; ++k) {
    dq = dq * y + q;
    q = q * y + c[k];
    qa = qa * ay + std::abs(c[k]);
  }
  return {y * (static_cast<double>(d) - y * dq / q), std::abs(q) / qa};
}

struct AberthResult {
  std::vector<cd> roots;
  int sweeps = 0;
};

AberthResult aberth(const std::vector<cd>& c, int max_sweeps) {
  const std::size_t d = c.size() - 1;
  AberthResult res;
  res.roots.resize(d);
  constexpr double radii[] = {0.5, 0.85, 1.0};
  for (std::size_t i = 0; i < d; ++i)
    res.roots[i] = radii[i % 3] * unit_from_turns(static_cast<double>(i) * kGoldenTurn + 0.05);
  std::vector<char> done(d, 0);
  std::vector<cd> next(d);
  for (res.sweeps = 1; res.sweeps <= max_sweeps; ++res.sweeps) {
    parallel_for(d, [&](std::size_t i) {
      next[i] = res.roots[i];
      if (done[i]) return;
      const cd w = res.roots[i];
      const Horner h = horner(c, w);
      const cd n = 1.0 / h.log_derivative;
      if (!std::isfinite(n.real()) || !std::isfinite(n.imag()) || n == 0.0) {
        done[i] = std::isfinite(n.real()) && std::isfinite(n.imag());
        return;
      }
      cd s = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) s += 1.0 / (w - res.roots[j]);
      const cd delta = n / (1.0 - n * s);
      next[i] = w - delta;
      // Converged, or P(w) already at the rounding level of its terms.
      done[i] = std::abs(delta) <= kAberthTolerance * std::abs(w) ||
                h.noise_ratio <= kNoiseLevel * static_cast<double>(d);
    });
    res.roots.swap(next);
    if (std::all_of(done.begin(), done.end(), [](char x) { return x != 0; })) return res;
  }
  std::ostringstream msg;
  msg << "root iteration did not converge after " << max_sweeps << " sweeps; unconverged roots:";
  int shown = 0;
  for (std::size_t i = 0; i < d && shown < 20; ++i)
    if (!done[i]) {
      msg << ' ' << i;
      ++shown;
    }
  throw DiagnosticError(msg.str());
}

// Total phase change of F along z(s), s in [0, 1], with adaptive steps.
template <class Path>
double trace_phase(const TaylorCoefficients& coeffs, Path path, double length, const WindingOptions& opt) {
  auto arg_at = [&](double s) {
    const ScaledValue v = eval_point(coeffs, path(s), opt.precision);
    return v.clipped ? std::numeric_limits<double>::quiet_NaN() : v.arg;
  };
  const double h_max = std::min(1.0, opt.max_step / length);
  const double h_min = opt.min_step / length;
  double s = 0.0, h = h_max, total = 0.0;
  double a0 = arg_at(0.0);
  if (std::isnan(a0)) throw ContourTooCloseError("F vanishes to working precision on the contour");
  while (s < 1.0) {
    const bool last = h >= 1.0 - s;
    const double step = last ? 1.0 - s : h;
    const double a_mid = arg_at(s + 0.5 * step);
    const double a1 = arg_at(last ? 1.0 : s + step);
    const double d1 = principal(a_mid - a0), d2 = principal(a1 - a_mid), d = principal(a1 - a0);
    const bool ok = std::isfinite(d1) && std::isfinite(d2) && std::abs(d1) < std::numbers::pi / 4 &&
                    std::abs(d2) < std::numbers::pi / 4 && std::abs(d1 + d2 - d) < 1e-9;
    if (ok) {
      total += d1 + d2;
      s = last ? 1.0 : s + step;
      a0 = a1;
      h = std::min(2.0 * h, h_max);
    } else {
      h = 0.5 * step;
      if (h < h_min) throw ContourTooCloseError("a zero lies on or next to the contour");
    }
  }
  return total;
}

int winding_from_total(double total) { return static_cast<int>(std::lround(total / kTwoPi)); }

double snap_angle(double turns) {
  double t = std::round(turns * kAngleQuantum) / kAngleQuantum;
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

}  // namespace

std::complex<double> Zero::point() const { return modulus * unit_from_turns(angle); }

std::uint64_t ZeroSet::count() const {
  std::uint64_t n = 0;
  for (const Zero& z : zeros) n += static_cast<std::uint64_t>(z.multiplicity);
  return n;
}

std::uint64_t truncation_degree(const TaylorCoefficients& coeffs, double R, double tol) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ParameterError("truncation radius must be positive");
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const auto start = static_cast<std::uint64_t>(std::ceil(R)) + 8;
  auto log_term = [&](std::uint64_t k) {
    const double e = coeffs.envelope(k);
    return e > 0.0 ? std::log(e) + log_scaled_weight(k, R) : -std::numeric_limits<double>::infinity();
  };
  // Past `end` the remaining tail is far below tol.
  const double floor = std::log(tol) - 40.0;
  std::uint64_t end = start + 1;
  while (log_term(end) >= floor) ++end;
  std::vector<double> suffix(end - start + 1, 0.0);
  for (std::uint64_t k = end; k-- > start + 1;) {
    const double t = std::exp(log_term(k));
    suffix[k - start - 1] = suffix[k - start] + t;
  }
  // suffix[i] = sum_{k > start + i} term(k)
  for (std::uint64_t m = start; m < end; ++m)
    if (suffix[m - start] <= tol) return m;
  return end;
}

ZeroSet find_zeros(const TaylorCoefficients& coeffs, double inner, double outer, const ZeroOptions& options) {
  if (!(inner >= 0.0 && inner < outer)) throw ParameterError("annulus must satisfy 0 <= inner < outer");
  if (outer > kMaxZeroRadius) throw CapacityError("outer radius exceeds the supported limit of 600");
  if (!(options.degree_scale >= 1.0)) throw ParameterError("degree_scale must be at least 1");

  ZeroSet zs;
  zs.inner = inner;
  zs.outer = outer;
  zs.truncation_degree = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(truncation_degree(coeffs, outer, options.tol)) * options.degree_scale));

  const auto xi = coeffs.values(zs.truncation_degree);
  std::vector<cd> c(zs.truncation_degree + 1);
  for (std::uint64_t k = 0; k <= zs.truncation_degree; ++k) {
    const cd x = (*xi)[static_cast<Eigen::Index>(k)];
    c[k] = x == 0.0 ? 0.0 : x * std::exp(log_scaled_weight(k, outer));
  }
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::size_t zero_roots = 0;
  while (zero_roots < c.size() && c[zero_roots] == 0.0) ++zero_roots;
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zero_roots));

  std::vector<cd> roots;
  if (c.size() > 1) {
    AberthResult ar = aberth(c, options.max_sweeps);
    zs.sweeps = ar.sweeps;
    roots = std::move(ar.roots);
  }

  struct Candidate {
    cd z;
    double residual;
  };
  std::vector<Candidate> accepted;
  std::vector<cd> unresolved;
  const double w_lo = inner / outer;
  for (const cd& w : roots) {
    const double aw = std::abs(w);
    if (aw < w_lo - 1e-3 || aw > 1.0 + 1e-3) continue;
    cd z = outer * w;
    for (int step = 0; step < 2; ++step) {
      const ScaledJet jet = eval_jet(coeffs, z);
      if (jet.derivative == 0.0) break;
      z -= jet.value / jet.derivative;
    }
    const ScaledJet jet = eval_jet(coeffs, z);
    const double az = std::abs(z);
    const double condition = 1e-15 * jet.abs_sum / std::abs(jet.derivative);
    const bool in_annulus = az >= inner - kAnnulusSlack && az <= outer + kAnnulusSlack;
    if (!std::isfinite(condition) || condition > kConditionLimit * std::max(1.0, az)) {
      if (in_annulus) unresolved.push_back(z);
      continue;
    }
    if (!in_annulus) continue;
    const double residual = std::abs(jet.value);
    if (!(residual <= kResidualLimit)) {
      std::ostringstream msg;
      msg << "zero near " << z << " has residual " << residual;
      throw CertificationError(msg.str());
    }
    accepted.push_back({z, residual});
  }
  if (inner == 0.0 && zero_roots > 0) accepted.push_back({0.0, 0.0});

  // Cluster in the rescaled plane; cluster multiplicities are recounted by winding.
  std::vector<int> cluster(accepted.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = clusters;
    for (std::size_t j = i + 1; j < accepted.size(); ++j)
      if (cluster[j] < 0 && std::abs(accepted[i].z - accepted[j].z) / outer < kClusterRadius) cluster[j] = clusters;
    ++clusters;
  }
  std::vector<int> absorbed(static_cast<std::size_t>(clusters), 0);
  for (const cd& u : unresolved) {
    bool merged = false;
    for (std::size_t i = 0; i < accepted.size() && !merged; ++i)
      if (std::abs(u - accepted[i].z) / outer < kMergeRadius) {
        ++absorbed[static_cast<std::size_t>(cluster[i])];
        merged = true;
      }
    if (!merged) ++zs.rejected;
  }
  for (int q = 0; q < clusters; ++q) {
    cd center = 0.0;
    double residual = 0.0;
    int size = 0;
    for (std::size_t i = 0; i < accepted.size(); ++i)
      if (cluster[i] == q) {
        center += accepted[i].z;
        residual = std::max(residual, accepted[i].residual);
        ++size;
      }
    center /= static_cast<double>(size);
    Zero zero;
    zero.modulus = std::abs(center);
    zero.angle = center == 0.0 ? 0.0 : snap_angle(std::arg(center) / kTwoPi);
    zero.residual = residual;
    zero.multiplicity = size;
    if (center == 0.0) {
      zero.multiplicity = static_cast<int>(zero_roots);
    } else if (size + absorbed[static_cast<std::size_t>(q)] > 1) {
      zero.multiplicity = size + absorbed[static_cast<std::size_t>(q)];
      try {
        zero.multiplicity = std::max(1, winding_count_disk(coeffs, center, 1e-4 * std::max(1.0, outer)));
      } catch (const ContourTooCloseError&) {
      }
    }
    zs.max_residual = std::max(zs.max_residual, residual);
    zs.zeros.push_back(zero);
  }
  std::sort(zs.zeros.begin(), zs.zeros.end(), [](const Zero& a, const Zero& b) {
    return a.modulus != b.modulus ? a.modulus < b.modulus : a.angle < b.angle;
  });
  return zs;
}

int winding_count(const TaylorCoefficients& coeffs, const Sector& sector, const WindingOptions& options) {
  const double ri = sector.inner, ro = sector.outer;
  if (!(ri > 0.0 && ri < ro)) throw ParameterError("sector radii must satisfy 0 < inner < outer");
  const double span = sector.theta2 - sector.theta1;
  if (!(span > 0.0 && span <= 1.0)) throw ParameterError("sector angles must satisfy 0 < theta2 - theta1 <= 1");
  const double t1 = sector.theta1, t2 = sector.theta2;
  std::vector<double> totals(span >= 1.0 ? 2 : 4, 0.0);
  parallel_for(totals.size(), [&](std::size_t piece) {
    switch (piece) {
      case 0:
        totals[0] = trace_phase(coeffs, [&](double s) { return ro * unit_from_turns(t1 + s * span); },
                                kTwoPi * ro * span, options);
        break;
      case 1:
        if (span >= 1.0) {
          totals[1] = trace_phase(coeffs, [&](double s) { return ri * unit_from_turns(t2 - s * span); },
                                  kTwoPi * ri * span, options);
        } else {
          totals[1] = trace_phase(coeffs, [&](double s) { return (ro + s * (ri - ro)) * unit_from_turns(t2); },
                                  ro - ri, options);
        }
        break;
      case 2:
        totals[2] = trace_phase(coeffs, [&](double s) { return ri * unit_from_turns(t2 - s * span); },
                                kTwoPi * ri * span, options);
        break;
      default:
        totals[3] = trace_phase(coeffs, [&](double s) { return (ri + s * (ro - ri)) * unit_from_turns(t1); },
                                ro - ri, options);
    }
  });
  double total = 0.0;
  for (double t : totals) total += t;
  return winding_from_total(total);
}

int winding_count_disk(const TaylorCoefficients& coeffs, std::complex<double> center, double radius,
                       const WindingOptions& options) {
  if (!(radius > 0.0)) throw ParameterError("radius must be positive");
  WindingOptions opt = options;
  const double length = kTwoPi * radius;
  opt.max_step = std::min(opt.max_step, length / 16.0);
  opt.min_step = std::min(opt.min_step, length * 1e-6);
  return winding_from_total(
      trace_phase(coeffs, [&](double s) { return center + radius * unit_from_turns(s); }, length, opt));
}

JitteredWinding winding_count_jittered(const TaylorCoefficients& coeffs, const Sector& sector,
                                       const WindingOptions& options, std::uint64_t seed, int max_attempts) {
  constexpr std::uint64_t kJitterStream = 0x4a49545445525321ULL;
  JitteredWinding out;
  out.sector = sector;
  for (out.attempts = 1;; ++out.attempts) {
    try {
      out.count = winding_count(coeffs, out.sector, options);
      return out;
    } catch (const ContourTooCloseError&) {
      if (out.attempts >= max_attempts) throw;
    }
    auto offset = [&](int i) {
      const double u = static_cast<double>(streams::phase53(seed, kJitterStream, out.attempts * 4ULL + i)) / 0x1p53;
      return (2.0 * u - 1.0) * 1e-3;
    };
    out.sector = sector;
    out.sector.inner = std::max(0.5 * sector.inner, sector.inner + offset(0));
    out.sector.outer = sector.outer + offset(1);
    if (sector.theta2 - sector.theta1 < 1.0) {
      out.sector.theta1 = sector.theta1 + offset(2);
      out.sector.theta2 = sector.theta2 + offset(3);
    }
  }
}

std::vector<SectorCount> sector_counts(const ZeroSet& zeros, int J, double r) {
  if (J < 1) throw ParameterError("sector count must be positive");
  if (r > zeros.outer) throw ParameterError("r exceeds the outer radius of the zero set");
  std::vector<SectorCount> out(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    out[j].r = r;
    out[j].theta1 = static_cast<double>(j) / J;
    out[j].theta2 = static_cast<double>(j + 1) / J;
    // Angle unit conversion: (theta2 - theta1) r / (2 pi) with radians is (theta2 - theta1) r in turns.
    out[j].expected = (out[j].theta2 - out[j].theta1) * r;
  }
  for (const Zero& z : zeros.zeros) {
    if (z.modulus > r) continue;
    const auto j = std::min(J - 1, static_cast<int>(std::floor(z.angle * J)));
    out[j].count += static_cast<std::uint64_t>(z.multiplicity);
  }
  return out;
}

}  // namespace pitslab
