#pragma once

// Thin RAII layer over MPFR. Only the handful of operations the high-precision
// evaluation paths need are wrapped; everything else calls the C API on get().

#include <mpfr.h>

#include <complex>
#include <utility>
#include <vector>

namespace pitslab::mp {

class Real {
 public:
  explicit Real(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Real(mpfr_prec_t bits, double x) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

 private:
  mpfr_t v_;
};

struct Complex {
  Real re;
  Real im;

  explicit Complex(mpfr_prec_t bits) : re(bits), im(bits) {}
  Complex(mpfr_prec_t bits, std::complex<double> z) : re(bits, z.real()), im(bits, z.imag()) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  std::complex<double> to_double() const { return {re.to_double(), im.to_double()}; }
};

/// Scratch registers for complex arithmetic; one per thread of work.
class Workspace {
 public:
  explicit Workspace(mpfr_prec_t bits) : t0_(bits), t1_(bits), t2_(bits), t3_(bits) {}

  /// out = a * b (out may alias a or b).
  void mul(Complex& out, const Complex& a, const Complex& b);
  /// acc += a * b.
  void fma(Complex& acc, const Complex& a, const Complex& b);
  /// out = a * x for real x.
  void scale(Complex& out, const Complex& a, const Real& x);

 private:
  Real t0_, t1_, t2_, t3_;
};

/// out = e(turns) = exp(2 pi i turns). Exact at multiples of a quarter turn.
void unit_from_turns(Complex& out, const Real& turns);

/// Reduces x to its fractional part in [0, 1).
void reduce_mod1(Real& x);

/// log|z| and arg z of a nonzero high-precision complex number, as doubles.
std::pair<double, double> log_abs_arg(const Complex& z);

}  // namespace pitslab::mp
