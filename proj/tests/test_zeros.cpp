#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/oracles.hpp"
#include "pitslab/errors.hpp"
#include "pitslab/zeros.hpp"

using namespace pitslab;

namespace {

SequenceSpec poly_sqrt2() { return {PolynomialPhase{{Real::parse("sqrt2")}}}; }
SequenceSpec cosh_data() { return {TrigPolynomial{{{Real(0.0), 0.5}, {Real::parse("1/2"), 0.5}}}}; }
SequenceSpec one_minus_z2() { return {TaylorData{{1.0, 0.0, -2.0}}}; }

// Scaled tail sum_{k>M} R^k / (k! U(R)) for unimodular data, summed in long double.
long double unimodular_tail(std::uint64_t M, double R) {
  long double sum = 0.0L;
  for (std::uint64_t k = M + 1; k < M + 4000; ++k) {
    const long double lw = k * std::log(static_cast<long double>(R)) - std::lgamma(static_cast<long double>(k) + 1) -
                           R + 0.5L * std::log(2 * std::numbers::pi_v<long double> * R);
    sum += std::exp(lw);
  }
  return sum;
}

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

}  // namespace

TEST_SUITE("zeros") {
  TEST_CASE("truncation degree") {
    const TaylorCoefficients one({Constant{}});
    CHECK(truncation_degree(one, 10.0, 1e-14) <= 60);
    CHECK(truncation_degree(one, 100.0, 1e-14) <= 220);
    // Brute force: smallest M >= ceil(R) + 8 with sum_{k>M} R^k/(k! U(R)) <= tol.
    auto brute = [](double R, long double tol) {
      const long double log_u = R - 0.5L * std::log(2 * std::numbers::pi_v<long double> * R);
      auto term = [&](long k) { return std::exp(k * std::log(static_cast<long double>(R)) - std::lgamma(k + 1.0L) - log_u); };
      for (auto M = static_cast<long>(std::ceil(R)) + 8;; ++M) {
        long double tail = 0;
        for (long k = M + 1; k < M + 2000; ++k) tail += term(k);
        if (tail <= tol) return static_cast<std::uint64_t>(M);
      }
    };
    CHECK(truncation_degree(one, 100.0, 1.0) == brute(100.0, 1.0L));
    CHECK(truncation_degree(one, 100.0, 1.0) == 118);  // the tail past ceil(R) + 8 is still about 5
    CHECK(truncation_degree(one, 9.5, 1.0) == brute(9.5, 1.0L));
    CHECK(truncation_degree(one, 300.0, 1e-14) == brute(300.0, 1e-14L));
    for (double R : {10.0, 57.3, 100.0, 300.0}) {
      const auto M = truncation_degree(one, R, 1e-14);
      CHECK(unimodular_tail(M, R) <= 1e-14L * (1 + 1e-9L));
      if (M > static_cast<std::uint64_t>(std::ceil(R)) + 8) CHECK(unimodular_tail(M - 1, R) > 1e-14L * (1 - 1e-9L));
    }
  }

  TEST_CASE("cosh zeros") {
    const ZeroSet zs = find_zeros(TaylorCoefficients(cosh_data()), 1.0, 10.0);
    REQUIRE(zs.zeros.size() == 6);
    CHECK(zs.count() == 6);
    for (const auto& want : oracles::cosh_zeros(1.0, 10.0)) {
      double best = 1e300;
      for (const Zero& z : zs.zeros) best = std::min(best, std::abs(z.point() - want));
      CHECK(best <= 1e-9);
    }
    for (const Zero& z : zs.zeros) CHECK((z.angle == 0.25 || z.angle == 0.75));
    CHECK(zs.max_residual <= 1e-6);
  }

  TEST_CASE("exponential has no zeros") {
    const ZeroSet zs = find_zeros(TaylorCoefficients({Constant{}}), 1.0, 100.0);
    CHECK(zs.zeros.empty());
    CHECK(zs.count() == 0);
  }

  TEST_CASE("quadratic") {
    const ZeroSet zs = find_zeros(TaylorCoefficients(one_minus_z2()), 0.5, 2.0);
    REQUIRE(zs.zeros.size() == 2);
    CHECK(std::abs(zs.zeros[0].point() - 1.0) <= 1e-12);
    CHECK(std::abs(zs.zeros[1].point() + 1.0) <= 1e-12);
  }

  TEST_CASE("double zero") {
    // (1 - z)^2 = 1 - 2z + z^2: derivatives (1, -2, 2)
    const ZeroSet zs = find_zeros(TaylorCoefficients({TaylorData{{1.0, -2.0, 2.0}}}), 0.5, 2.0);
    REQUIRE(zs.zeros.size() == 1);
    CHECK(zs.zeros[0].multiplicity == 2);
    CHECK(zs.count() == 2);
    CHECK(winding_count(TaylorCoefficients({TaylorData{{1.0, -2.0, 2.0}}}), {0.5, 2.0, -0.1, 0.1}) == 2);
  }

  TEST_CASE("annulus gates") {
    const TaylorCoefficients c(poly_sqrt2());
    CHECK_THROWS_AS(find_zeros(c, 10.0, 601.0), CapacityError);
    CHECK_THROWS_AS(find_zeros(c, 10.0, 5.0), ParameterError);
  }

  TEST_CASE("zero sets respect their annulus and certificate") {
    for (const SequenceSpec& spec : {poly_sqrt2(), SequenceSpec{Moebius{}}, SequenceSpec{SteinhausMultiplicative{3}}}) {
      const ZeroSet zs = find_zeros(TaylorCoefficients(spec), 20.0, 120.0);
      CHECK(zs.max_residual <= 1e-6);
      for (const Zero& z : zs.zeros) {
        CHECK(z.modulus >= 20.0 - 1e-9);
        CHECK(z.modulus <= 120.0 + 1e-9);
        CHECK(z.angle >= 0.0);
        CHECK(z.angle < 1.0);
      }
    }
  }

  TEST_CASE("winding examples") {
    CHECK(winding_count(TaylorCoefficients({Constant{}}), {1.0, 50.0, 0.1, 0.7}) == 0);
    CHECK(winding_count(TaylorCoefficients({Constant{}}), {1.0, 50.0, 0.0, 1.0}) == 0);
    CHECK(winding_count(TaylorCoefficients(cosh_data()), {1.0, 10.0, 0.2, 0.3}) == 3);
    CHECK(winding_count(TaylorCoefficients(one_minus_z2()), {0.5, 2.0, -0.1, 0.1}) == 1);
    CHECK(winding_count_disk(TaylorCoefficients(one_minus_z2()), 0.0, 3.0) == 2);
  }

  TEST_CASE("zero on the contour") {
    const TaylorCoefficients c(cosh_data());
    const Sector edge{1.0, 10.0, 0.25, 0.3};  // three zeros on the ray theta = 1/4
    CHECK_THROWS_AS(winding_count(c, edge), ContourTooCloseError);
    const JitteredWinding w = winding_count_jittered(c, edge);
    CHECK(w.attempts > 1);
    CHECK(std::abs(w.sector.theta1 - 0.25) <= 1e-3);
    const ZeroSet zs = find_zeros(c, 1.0, 10.0);
    CHECK(w.count == count_in_sector(zs, w.sector));
  }

  TEST_CASE("winding counts equal zero counts on random sectors") {
    struct Case {
      SequenceSpec spec;
      double inner, outer;
    };
    std::mt19937_64 rng(77);
    for (const Case& cs : {Case{SequenceSpec{Moebius{}}, 10.0, 60.0}, Case{SequenceSpec{SteinhausMultiplicative{9}}, 10.0, 60.0},
                           Case{SequenceSpec{IidRandom{IidDistribution::Rademacher, 4}}, 5.0, 40.0}}) {
      const TaylorCoefficients c(cs.spec);
      const ZeroSet zs = find_zeros(c, cs.inner, cs.outer);
      std::uniform_real_distribution<double> radius(cs.inner, cs.outer), turn(0.0, 1.0), width(0.05, 0.6);
      for (int i = 0; i < 20; ++i) {
        double a = radius(rng), b = radius(rng);
        if (a > b) std::swap(a, b);
        const double t1 = turn(rng);
        const auto w = winding_count_jittered(c, {a, b, t1, t1 + width(rng)}, {}, static_cast<std::uint64_t>(i));
        REQUIRE(w.count == count_in_sector(zs, w.sector));
      }
      CHECK(winding_count(c, {cs.inner, cs.outer, 0.0, 1.0}) == static_cast<int>(zs.count()));
    }
  }

  TEST_CASE("real sequences have conjugate-symmetric zeros") {
    for (const SequenceSpec& spec : {SequenceSpec{Moebius{}}, SequenceSpec{RademacherMultiplicative{2}}}) {
      const ZeroSet zs = find_zeros(TaylorCoefficients(spec), 5.0, 80.0);
      REQUIRE(zs.zeros.size() > 10);
      for (const Zero& z : zs.zeros) {
        double best = 1e300;
        for (const Zero& w : zs.zeros) best = std::min(best, std::abs(w.point() - std::conj(z.point())));
        CHECK(best <= 1e-8);
      }
    }
  }

  TEST_CASE("zeros are stable under a longer truncation") {
    const TaylorCoefficients c(poly_sqrt2());
    const ZeroSet a = find_zeros(c, 20.0, 150.0);
    ZeroOptions longer;
    longer.degree_scale = 1.25;
    const ZeroSet b = find_zeros(c, 20.0, 150.0, longer);
    CHECK(b.truncation_degree > a.truncation_degree);
    for (const Zero& z : a.zeros) {
      if (z.modulus > 0.8 * 150.0) continue;
      double best = 1e300;
      for (const Zero& w : b.zeros) best = std::min(best, std::abs(w.point() - z.point()));
      CHECK(best <= 1e-8);
    }
  }

  TEST_CASE("zero count grows linearly") {
    const ZeroSet zs = find_zeros(TaylorCoefficients(poly_sqrt2()), 1.0, 600.0);
    for (double r : {150.0, 300.0, 600.0}) {
      std::uint64_t n = 0;
      for (const Zero& z : zs.zeros)
        if (z.modulus <= r) n += static_cast<std::uint64_t>(z.multiplicity);
      CHECK(static_cast<double>(n) / r >= 0.8);
      CHECK(static_cast<double>(n) / r <= 1.2);
    }
  }

  TEST_CASE("sector counts") {
    const ZeroSet ch = find_zeros(TaylorCoefficients(cosh_data()), 1.0, 10.0);
    const auto counts = sector_counts(ch, 4, 10.0);
    REQUIRE(counts.size() == 4);
    const std::uint64_t want[] = {0, 3, 0, 3};
    for (int j = 0; j < 4; ++j) {
      CHECK(counts[j].count == want[j]);
      CHECK(counts[j].expected == doctest::Approx(2.5));
    }
    CHECK_THROWS_AS(sector_counts(ch, 4, 11.0), ParameterError);

    ZeroSet empty;
    empty.inner = 1.0;
    empty.outer = 50.0;
    for (const auto& s : sector_counts(empty, 8, 50.0)) CHECK(s.count == 0);

    const ZeroSet zs = find_zeros(TaylorCoefficients(poly_sqrt2()), 50.0, 300.0);
    std::uint64_t total = 0;
    std::vector<std::uint64_t> previous(16, 0);
    for (double r : {100.0, 200.0, 300.0}) {
      const auto sc = sector_counts(zs, 16, r);
      total = 0;
      for (int j = 0; j < 16; ++j) {
        CHECK(sc[j].count >= previous[j]);
        previous[j] = sc[j].count;
        total += sc[j].count;
      }
    }
    CHECK(total == zs.count());
    for (const auto& s : sector_counts(zs, 16, 300.0)) {
      CHECK(s.expected == doctest::Approx(18.75));
      CHECK(std::abs(static_cast<double>(s.count) - s.expected) <= 3 * std::sqrt(s.expected));
    }
  }
}
