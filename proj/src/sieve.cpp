#include "pitslab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

namespace pitslab {

std::span<const std::uint32_t> base_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    const auto limit = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(kSieveCapacity))) + 2;
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t p = 2; p <= limit; ++p) {
      if (composite[p]) continue;
      out.push_back(p);
      for (std::uint64_t m = std::uint64_t{p} * p; m <= limit; m += p) composite[m] = true;
    }
    return out;
  }();
  return primes;
}

void check_sieve_capacity(std::uint64_t end) {
  if (end > kSieveCapacity + 1)
    throw CapacityError("index " + std::to_string(end - 1) + " exceeds sieve capacity " +
                        std::to_string(kSieveCapacity));
}

std::vector<std::int8_t> moebius_sieve(std::uint64_t limit) {
  if (limit < 1) throw ParameterError("moebius_sieve: limit must be >= 1");
  check_sieve_capacity(limit + 1);
  std::vector<std::int8_t> mu(limit + 1, 1);
  mu[0] = 0;
  // Segments keep the working set of the cofactor array small.
  constexpr std::uint64_t kSegment = 1u << 20;
  for (std::uint64_t lo = 1; lo <= limit; lo += kSegment) {
    const std::uint64_t len = std::min(kSegment, limit + 1 - lo);
    factorize_window(lo, len, [&](std::uint64_t i, std::uint64_t, int a) {
      auto& m = mu[lo + i];
      m = a >= 2 ? 0 : static_cast<std::int8_t>(-m);
    });
  }
  return mu;
}

std::uint64_t SquarefreeKernel::value() const {
  std::uint64_t v = 1;
  for (auto p : primes) v *= p;
  return v;
}

SquarefreeKernel squarefree_kernel(std::uint64_t n) {
  if (n < 1) throw ParameterError("squarefree_kernel: n must be >= 1");
  SquarefreeKernel k;
  factorize_window(n, 1, [&](std::uint64_t, std::uint64_t p, int a) {
    if (a % 2 == 1) k.primes.push_back(p);
  });
  return k;
}

SquarefreeKernel kernel_product(const SquarefreeKernel& a, const SquarefreeKernel& b) {
  SquarefreeKernel out;
  std::set_symmetric_difference(a.primes.begin(), a.primes.end(), b.primes.begin(), b.primes.end(),
                                std::back_inserter(out.primes));
  return out;
}

bool is_squarefree(std::uint64_t n) {
  bool ok = n >= 1;
  factorize_window(n, 1, [&](std::uint64_t, std::uint64_t, int a) { ok = ok && a < 2; });
  return ok;
}

}  // namespace pitslab
