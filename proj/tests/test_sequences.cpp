#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles/oracles.hpp"
#include "pitslab/errors.hpp"
#include "pitslab/sequences.hpp"
#include "pitslab/sieve.hpp"
#include "pitslab/squareness.hpp"

using namespace pitslab;

namespace {

std::complex<double> e(double turns) { return std::polar(1.0, 2 * std::numbers::pi * turns); }

std::vector<SequenceSpec> all_kinds() {
  return {{Constant{}},
          {PureExponential{Real::parse("0.6180339887498948482045868343656")}},
          {TrigPolynomial{{{Real::parse("1/3"), {1.0, 0.5}}, {Real::parse("0.41421356237309504880168872420969807856967"), -0.25}}}},
          {SignBesicovitch{Real::parse("sqrt2")}},
          {PolynomialPhase{{Real::parse("sqrt2"), Real::parse("pi")}}},
          {FractionalPowerPhase{Real(1.0), Real::parse("3/2")}},
          {GeometricPhase{3, Real::parse("0.1"), 5}},
          {IidRandom{IidDistribution::Steinhaus, 1}},
          {IidRandom{IidDistribution::Rademacher, 2}},
          {IidRandom{IidDistribution::Gaussian, 3}},
          {SteinhausMultiplicative{4}},
          {RademacherMultiplicative{5}},
          {Moebius{}},
          {TaylorData{{1.0, 2.0, {0.0, 3.0}}}}};
}

}  // namespace

TEST_SUITE("sequences") {
  TEST_CASE("constant window") {
    const auto w = generate({Constant{}}, 0, 3);
    CHECK(w.values.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(w.values[i] == std::complex<double>(1.0, 0.0));
  }

  TEST_CASE("moebius matches factorisation") {
    const auto w = generate({Moebius{}}, 1, 6);
    const double want[] = {1, -1, -1, 0, -1, 1};
    for (int i = 0; i < 6; ++i) CHECK(w.values[i].real() == want[i]);
    for (std::uint64_t start : {0ULL, 9'990ULL, 1'000'003ULL, 99'999'000ULL}) {
      const auto v = generate({Moebius{}}, start, 1000);
      for (std::uint64_t i = 0; i < 1000; ++i) {
        REQUIRE(v.values[i].real() == oracles::moebius(start + i));
        REQUIRE(v.values[i].imag() == 0.0);
      }
    }
  }

  TEST_CASE("moebius sieve") {
    CHECK(moebius_sieve(1)[1] == 1);
    CHECK(moebius_sieve(10)[10] == 1);
    CHECK(moebius_sieve(9)[9] == 0);
    const auto mu = moebius_sieve(1'000'000);
    std::uint64_t nonzero = 0;
    for (std::uint64_t n = 1; n <= 1'000'000; ++n) nonzero += mu[n] != 0;
    CHECK(std::abs(nonzero / 1e6 - 6.0 / (std::numbers::pi * std::numbers::pi)) <= 0.002);
    for (std::uint64_t n = 1; n <= 3000; ++n) REQUIRE(mu[n] == oracles::moebius(n));
    CHECK_THROWS_AS(moebius_sieve(kSieveCapacity + 1), CapacityError);
  }

  TEST_CASE("polynomial phase reduces n^2 sqrt2 exactly") {
    const auto w = generate({PolynomialPhase{{Real::parse("sqrt2")}}}, 0, 3);
    CHECK(w.values[0] == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(w.values[1] - e(std::sqrt(2.0) - 1.0)) < 1e-15);
    CHECK(std::abs(w.values[2] - e(oracles::sqrt2_square_turns(2))) < 1e-15);
    // at n ~ 1e7 the phase n^2 sqrt2 ~ 1.4e14 has no fractional bits left in double
    const std::uint64_t start = 9'999'000;
    const auto far = generate({PolynomialPhase{{Real::parse("sqrt2")}}}, start, 1000);
    for (std::uint64_t i = 0; i < 1000; ++i)
      REQUIRE(std::abs(far.values[i] - e(oracles::sqrt2_square_turns(start + i))) < 1e-12);
  }

  TEST_CASE("rademacher multiplicative support and values") {
    const SequenceSpec spec{RademacherMultiplicative{11}};
    CHECK(generate(spec, 4, 1).values[0] == 0.0);
    const auto w = generate(spec, 0, 5000);
    CHECK(w.values[0] == 0.0);
    for (std::uint64_t n = 1; n < 5000; ++n) {
      const double v = w.values[n].real();
      REQUIRE(w.values[n].imag() == 0.0);
      if (!oracles::squarefree(n)) {
        REQUIRE(v == 0.0);
        continue;
      }
      int want = 1;
      for (auto p : oracles::factor(n)) want *= streams::sign(11, streams::kRademacherPrime, p);
      REQUIRE(v == want);
    }
  }

  TEST_CASE("steinhaus multiplicative is completely multiplicative") {
    const auto w = generate({SteinhausMultiplicative{3}}, 0, 20'001);
    CHECK(w.values[0] == 0.0);
    for (std::uint64_t a = 1; a <= 141; ++a)
      for (std::uint64_t b = 1; a * b <= 20'000; b += 7)
        REQUIRE(std::abs(w.values[a * b] - w.values[a] * w.values[b]) <= 8 * 2.3e-16);
  }

  TEST_CASE("unimodular kinds") {
    for (const SequenceSpec& spec : {SequenceSpec{PureExponential{Real::parse("0.6180339887498948482045868343656")}},
                                     SequenceSpec{PolynomialPhase{{Real::parse("sqrt2"), Real::parse("e")}}},
                                     SequenceSpec{FractionalPowerPhase{Real::parse("pi"), Real::parse("3/2")}},
                                     SequenceSpec{GeometricPhase{2, Real::parse("0.3"), 1}},
                                     SequenceSpec{IidRandom{IidDistribution::Steinhaus, 9}}}) {
      const auto w = generate(spec, 123, 4000);
      for (Eigen::Index i = 0; i < w.values.size(); ++i) REQUIRE(std::abs(std::abs(w.values[i]) - 1.0) <= 4 * 2.3e-16);
    }
  }

  TEST_CASE("sign besicovitch") {
    const auto w = generate({SignBesicovitch{Real::parse("sqrt2")}}, 0, 2000);
    for (int n = 0; n < 2000; ++n) {
      // floor(sqrt2 n) is exact here: sqrt2 n is never within 1e-12 of an integer for n < 2000
      const int f = static_cast<int>(std::floor(std::sqrt(2.0) * n));
      REQUIRE(w.values[n].real() == (f % 2 ? -1.0 : 1.0));
    }
  }

  TEST_CASE("overlapping windows agree exactly") {
    for (const SequenceSpec& spec : all_kinds()) {
      const auto a = generate(spec, 0, 3000);
      const auto b = generate(spec, 1234, 1000);
      for (int i = 0; i < 1000; ++i) REQUIRE(a.values[1234 + i] == b.values[i]);
      const auto again = generate(spec, 0, 3000);
      REQUIRE(a.values == again.values);
    }
  }

  TEST_CASE("parameter gates") {
    CHECK_THROWS_AS(validate({FractionalPowerPhase{Real(1.0), Real::parse("-1")}}), ParameterError);
    CHECK_THROWS_AS(validate({FractionalPowerPhase{Real(1.0), Real(0.0)}}), ParameterError);
    CHECK_THROWS_AS(validate({GeometricPhase{1, Real::parse("0.5"), 0}}), ParameterError);
    CHECK_THROWS_AS(validate({PolynomialPhase{{}}}), ParameterError);
    CHECK_THROWS_AS(validate({PureExponential{Real(1.5)}}), ParameterError);
    CHECK_THROWS_AS(generate({Constant{}, 10}, 5, 10), ParameterError);
    CHECK_THROWS_AS(generate({Moebius{}, kSieveCapacity * 2}, kSieveCapacity, 10), CapacityError);
    CHECK_THROWS_AS(Real::parse("sqrt3"), ParameterError);
  }

  TEST_CASE("symbolic constants carry full precision") {
    mpfr_t x, y;
    mpfr_inits2(200, x, y, static_cast<mpfr_ptr>(nullptr));
    Real::parse("sqrt2").assign_to(x);
    mpfr_sqrt_ui(y, 2, MPFR_RNDN);
    mpfr_sub(x, x, y, MPFR_RNDN);
    CHECK((mpfr_zero_p(x) || mpfr_get_exp(x) < -190));
    Real::parse("pi").assign_to(x);
    mpfr_const_pi(y, MPFR_RNDN);
    mpfr_sub(x, x, y, MPFR_RNDN);
    CHECK((mpfr_zero_p(x) || mpfr_get_exp(x) < -190));
    mpfr_clears(x, y, static_cast<mpfr_ptr>(nullptr));
    CHECK(Real::parse("1/3").value() == 1.0 / 3.0);
    CHECK(Real::parse("golden").value() == (1 + std::sqrt(5.0)) / 2);
  }

  TEST_CASE("squarefree kernel") {
    CHECK(squarefree_kernel(12).primes == std::vector<std::uint64_t>{3});
    CHECK(squarefree_kernel(36).primes.empty());
    CHECK(squarefree_kernel(90).primes == std::vector<std::uint64_t>{2, 5});
    for (std::uint64_t n = 1; n <= 5000; ++n) REQUIRE(squarefree_kernel(n).primes == oracles::odd_primes(n));
    for (std::uint64_t a = 1; a <= 60; ++a)
      for (std::uint64_t b = 1; b <= 60; ++b)
        REQUIRE(kernel_product(squarefree_kernel(a), squarefree_kernel(b)).primes == oracles::odd_primes(a * b));
  }

  TEST_CASE("card_B agrees with the brute-force square test") {
    const auto small = card_b(10, {2, 1}, 1);
    CHECK(small.card_b >= 11);
    CHECK(small.card_b == oracles::card_b_brute(10, 2, 1, 1).all);
    const auto mid = card_b(100, {3, 2}, 3);
    CHECK(mid.card_b == oracles::card_b_brute(100, 3, 2, 3).all);
    for (std::uint64_t m = 2; m <= 300; m += (m < 40 ? 1 : 13))
      for (Ratio lambda : {Ratio{1, 1}, Ratio{3, 2}, Ratio{2, 1}})
        for (std::uint64_t k : {1, 2, 3}) {
          const auto got = card_b(m, lambda, k);
          const auto want = oracles::card_b_brute(m, lambda.num, lambda.den, k);
          REQUIRE(got.card_b == want.all);
          REQUIRE(got.card_b_squarefree == want.squarefree);
          const std::uint64_t width = range_end(m, lambda) - m + 1;
          REQUIRE(got.card_b >= width);
          REQUIRE(got.card_b <= width * width);
        }
    CHECK_THROWS_AS(card_b(1, {2, 1}, 1), ParameterError);
    CHECK_THROWS_AS(card_b(kPairCountMaxM + 1, {2, 1}, 1), ParameterError);
  }

  TEST_CASE("rademacher pair moment") {
    // s = 4 is the only index and is not square-free
    const auto zero = rademacher_pair_moment({1}, 4, {1, 1}, 1, 1000);
    CHECK(zero.mean == 0.0);
    CHECK(zero.exact == 0.0);
    for (auto [m, lambda, k] : {std::tuple{20ULL, Ratio{2, 1}, 1ULL}, std::tuple{50ULL, Ratio{3, 2}, 2ULL}}) {
      const auto est = rademacher_pair_moment({3}, m, lambda, k, 100'000);
      const double exact = oracles::rademacher_second_moment(m, lambda.num, lambda.den, k);
      CHECK(est.exact == exact);
      CHECK(std::abs(est.mean - exact) <= 3 * est.standard_error);
    }
    CHECK_THROWS_AS(rademacher_pair_moment({1}, 20, {2, 1}, 1, 999), ParameterError);
  }

  TEST_CASE("shortest round-trip formatting") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0})
      CHECK(std::stod(shortest_repr(x)) == x);
    CHECK(shortest_repr(0.1) == "0.1");
  }
}
