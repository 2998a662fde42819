#include "pitslab/squareness.hpp"

#include <cmath>
#include <map>
#include <string>

#include "pitslab/errors.hpp"
#include "pitslab/sieve.hpp"

namespace pitslab {

namespace {

void check_range(std::uint64_t m, Ratio lambda, std::uint64_t k) {
  if (m < 2 || m > kPairCountMaxM)
    throw ParameterError("pair counts need 2 <= m <= " + std::to_string(kPairCountMaxM));
  if (lambda.den == 0 || lambda.num < lambda.den || lambda.num > 2 * lambda.den)
    throw ParameterError("lambda must be a rational in [1, 2]");
  if (k < 1) throw ParameterError("shift k must be >= 1");
}

}  // namespace

std::uint64_t range_end(std::uint64_t m, Ratio lambda) { return m * lambda.num / lambda.den; }

PairSquareCount card_b(std::uint64_t m, Ratio lambda, std::uint64_t k) {
  check_range(m, lambda, k);
  const std::uint64_t hi = range_end(m, lambda);
  std::map<SquarefreeKernel, std::uint64_t> all, squarefree;
  for (std::uint64_t s = m; s <= hi; ++s) {
    const auto a = squarefree_kernel(s), b = squarefree_kernel(s + k);
    auto kernel = kernel_product(a, b);
    if (is_squarefree(s) && is_squarefree(s + k)) ++squarefree[kernel];
    ++all[std::move(kernel)];
  }
  PairSquareCount out{m, lambda, k, 0, 0};
  for (const auto& [kernel, c] : all) out.card_b += c * c;
  for (const auto& [kernel, c] : squarefree) out.card_b_squarefree += c * c;
  return out;
}

std::uint64_t derive_trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return streams::draw(seed, 0x545249414c534544ULL, trial);
}

PairMomentEstimate rademacher_pair_moment(const RademacherMultiplicative& spec, std::uint64_t m,
                                          Ratio lambda, std::uint64_t k, std::uint64_t trials) {
  if (trials < 1000) throw ParameterError("rademacher_pair_moment needs at least 1000 trials");
  PairMomentEstimate est;
  est.counts = card_b(m, lambda, k);
  est.exact = static_cast<double>(est.counts.card_b_squarefree);
  est.trials = trials;

  const std::uint64_t hi = range_end(m, lambda);
  const std::uint64_t len = hi + k + 1 - m;
  // prime support of each square-free index; empty marker for the rest
  std::vector<std::vector<std::uint64_t>> support(len);
  std::vector<bool> squarefree(len, true);
  factorize_window(m, len, [&](std::uint64_t i, std::uint64_t p, int a) {
    if (a >= 2) squarefree[i] = false;
    support[i].push_back(p);
  });

  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_trial_seed(spec.seed, t);
    auto value = [&](std::uint64_t i) {
      if (!squarefree[i]) return 0;
      int v = 1;
      for (auto p : support[i]) v *= streams::sign(seed, streams::kRademacherPrime, p);
      return v;
    };
    long long sum = 0;
    for (std::uint64_t s = m; s <= hi; ++s) sum += value(s - m) * value(s + k - m);
    const double x = static_cast<double>(sum * sum);
    const double delta = x - mean;  // Welford
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (x - mean);
  }
  est.mean = mean;
  est.standard_error = std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials));
  return est;
}

}  // namespace pitslab
