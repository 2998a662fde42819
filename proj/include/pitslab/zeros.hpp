#pragma once

// Zeros of F in annuli: Aberth-Ehrlich iteration on the truncated, rescaled
// Taylor polynomial, Newton-polished on the full series, and an independent
// argument-principle winding counter to cross-check counts.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pitslab/errors.hpp"
#include "pitslab/evaluator.hpp"

namespace pitslab {

inline constexpr double kMaxZeroRadius = 600.0;

/// Smallest M >= ceil(R) + 8 whose scaled tail sum_{k>M} envelope(k) R^k/(k! U(R)) is <= tol.
std::uint64_t truncation_degree(const TaylorCoefficients& coeffs, double R, double tol);

struct Zero {
  double modulus = 0.0;
  double angle = 0.0;  ///< turns in [0, 1)
  int multiplicity = 1;
  double residual = 0.0;  ///< |F / U(max(|z|, 1))| at the polished zero

  std::complex<double> point() const;
};

struct ZeroSet {
  double inner = 0.0, outer = 0.0;
  std::vector<Zero> zeros;  ///< sorted by modulus, then angle
  std::uint64_t truncation_degree = 0;
  double max_residual = 0.0;
  std::string method = "aberth-ehrlich+newton";
  std::uint64_t rejected = 0;  ///< polynomial roots in the annulus that F does not certify
  int sweeps = 0;

  /// Number of zeros counted with multiplicity.
  std::uint64_t count() const;
};

struct ZeroOptions {
  double tol = 1e-16;          ///< truncation tolerance for the polynomial degree
  double degree_scale = 1.0;   ///< multiplies the truncation degree (stability checks)
  int max_sweeps = 500;
};

/// Zeros of F with inner <= |z| <= outer.
ZeroSet find_zeros(const TaylorCoefficients& coeffs, double inner, double outer, const ZeroOptions& options = {});

/// inner <= |z| <= outer, theta1 <= arg z <= theta2 (turns). theta2 - theta1 = 1 is the full annulus.
struct Sector {
  double inner = 0.0, outer = 0.0;
  double theta1 = 0.0, theta2 = 1.0;
};

struct WindingOptions {
  double max_step = 0.5;   ///< longest contour step, in units of z
  double min_step = 1e-9;  ///< steps below this mean a zero sits on the contour
  Precision precision = Precision::Auto;
};

struct ContourTooCloseError : CertificationError {
  explicit ContourTooCloseError(const std::string& what) : CertificationError(what) {}
};

/// Zeros inside the sector by the argument principle.
int winding_count(const TaylorCoefficients& coeffs, const Sector& sector, const WindingOptions& options = {});

/// Zeros inside |z - center| < radius by the argument principle.
int winding_count_disk(const TaylorCoefficients& coeffs, std::complex<double> center, double radius,
                       const WindingOptions& options = {});

struct JitteredWinding {
  int count = 0;
  Sector sector;  ///< the contour actually used
  int attempts = 0;
};

/// winding_count, moving the sector edges by at most 1e-3 when a zero lies on the contour.
JitteredWinding winding_count_jittered(const TaylorCoefficients& coeffs, const Sector& sector,
                                       const WindingOptions& options = {}, std::uint64_t seed = 0,
                                       int max_attempts = 8);

struct SectorCount {
  double r = 0.0;
  double theta1 = 0.0, theta2 = 0.0;  ///< turns, half-open [theta1, theta2)
  std::uint64_t count = 0;
  double expected = 0.0;  ///< (theta2 - theta1) r
};

/// Zeros of modulus <= r in each of the J sectors [j/J, (j+1)/J).
std::vector<SectorCount> sector_counts(const ZeroSet& zeros, int J, double r);

}  // namespace pitslab
