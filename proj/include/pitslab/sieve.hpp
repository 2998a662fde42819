#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pitslab/errors.hpp"

namespace pitslab {

/// Largest index any sieve-backed operation will accept.
inline constexpr std::uint64_t kSieveCapacity = 100'000'000;

/// Primes up to sqrt(kSieveCapacity), built once and shared.
std::span<const std::uint32_t> base_primes();

/// Throws CapacityError when [0, end) exceeds the sieve capacity.
void check_sieve_capacity(std::uint64_t end);

/// Segmented factorisation of the window [lo, lo + len).
///
/// Calls on_factor(offset, p, a) once for each prime power p^a exactly dividing
/// lo + offset. Primes are reported in increasing order per index. Index 0 has no
/// factorisation and is skipped.
template <typename OnFactor>
void factorize_window(std::uint64_t lo, std::uint64_t len, OnFactor&& on_factor) {
  check_sieve_capacity(lo + len);
  std::vector<std::uint64_t> rest(len);
  for (std::uint64_t i = 0; i < len; ++i) rest[i] = lo + i;
  const std::uint64_t hi = lo + len;
  for (std::uint64_t p : base_primes()) {
    if (p * p >= hi) break;
    std::uint64_t first = ((lo + p - 1) / p) * p;
    if (first == 0) first = p;
    for (std::uint64_t n = first; n < hi; n += p) {
      auto& r = rest[n - lo];
      int a = 0;
      while (r % p == 0) r /= p, ++a;
      on_factor(n - lo, p, a);
    }
  }
  for (std::uint64_t i = 0; i < len; ++i)
    if (rest[i] > 1) on_factor(i, rest[i], 1);
}

/// mu(n) for 0 <= n <= limit; entry 0 is set to 0.
std::vector<std::int8_t> moebius_sieve(std::uint64_t limit);

/// Primes dividing n to an odd power, ascending. Identifies n up to square factors.
struct SquarefreeKernel {
  std::vector<std::uint64_t> primes;

  std::uint64_t value() const;  // product of the primes
  friend bool operator==(const SquarefreeKernel&, const SquarefreeKernel&) = default;
  friend auto operator<=>(const SquarefreeKernel&, const SquarefreeKernel&) = default;
};

SquarefreeKernel squarefree_kernel(std::uint64_t n);

/// Kernel of a*b computed from the kernels of a and b (symmetric difference).
SquarefreeKernel kernel_product(const SquarefreeKernel& a, const SquarefreeKernel& b);

bool is_squarefree(std::uint64_t n);

}  // namespace pitslab
