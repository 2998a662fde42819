#pragma once

// Pair counts behind the second moment of short sums of a random multiplicative
// function: how many (s1, s2) in [m, lambda m]^2 make s1(s1+k)s2(s2+k) a square.

#include <cstdint>

#include "pitslab/sequences.hpp"

namespace pitslab {

/// Largest m accepted by the pair-count routines.
inline constexpr std::uint64_t kPairCountMaxM = 5000;

struct Ratio {
  std::uint64_t num = 1;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct PairSquareCount {
  std::uint64_t m = 0;
  Ratio lambda;
  std::uint64_t k = 0;
  /// All pairs with s1(s1+k)s2(s2+k) a perfect square.
  std::uint64_t card_b = 0;
  /// The subset where s1, s1+k, s2, s2+k are all square-free.
  std::uint64_t card_b_squarefree = 0;
};

/// Upper end of the summation range, floor(lambda m).
std::uint64_t range_end(std::uint64_t m, Ratio lambda);

/// Counts by grouping s(s+k) on its square-free kernel: the product of two such
/// numbers is a square iff their kernels coincide.
PairSquareCount card_b(std::uint64_t m, Ratio lambda, std::uint64_t k);

struct PairMomentEstimate {
  double mean = 0.0;            ///< Monte Carlo mean of (sum xi(s) xi(s+k))^2
  double standard_error = 0.0;
  std::uint64_t trials = 0;
  double exact = 0.0;           ///< exact expectation, card_b_squarefree
  PairSquareCount counts;
};

/// Monte Carlo estimate of E[(sum_{m<=s<=lambda m} xi(s) xi(s+k))^2] for the
/// Rademacher multiplicative function; trial t uses the stream of seed
/// derive_trial_seed(spec.seed, t).
PairMomentEstimate rademacher_pair_moment(const RademacherMultiplicative& spec, std::uint64_t m,
                                          Ratio lambda, std::uint64_t k, std::uint64_t trials);

std::uint64_t derive_trial_seed(std::uint64_t seed, std::uint64_t trial);

}  // namespace pitslab
