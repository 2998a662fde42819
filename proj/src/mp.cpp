#include "pitslab/mp.hpp"

namespace pitslab::mp {

void Workspace::mul(Complex& out, const Complex& a, const Complex& b) {
  mpfr_mul(t0_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t1_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t2_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_sub(out.re.get(), t0_.get(), t1_.get(), MPFR_RNDN);
  mpfr_add(out.im.get(), t2_.get(), t3_.get(), MPFR_RNDN);
}

void Workspace::fma(Complex& acc, const Complex& a, const Complex& b) {
  mpfr_mul(t0_.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t1_.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(t0_.get(), t0_.get(), t1_.get(), MPFR_RNDN);
  mpfr_add(acc.re.get(), acc.re.get(), t0_.get(), MPFR_RNDN);
  mpfr_mul(t2_.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t3_.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(t2_.get(), t2_.get(), t3_.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), acc.im.get(), t2_.get(), MPFR_RNDN);
}

void Workspace::scale(Complex& out, const Complex& a, const Real& x) {
  mpfr_mul(out.re.get(), a.re.get(), x.get(), MPFR_RNDN);
  mpfr_mul(out.im.get(), a.im.get(), x.get(), MPFR_RNDN);
}

void reduce_mod1(Real& x) {
  mpfr_frac(x.get(), x.get(), MPFR_RNDN);
  if (mpfr_sgn(x.get()) < 0) mpfr_add_ui(x.get(), x.get(), 1, MPFR_RNDN);
  if (mpfr_cmp_ui(x.get(), 1) >= 0) mpfr_set_zero(x.get(), 1);
}

void unit_from_turns(Complex& out, const Real& turns) {
  const mpfr_prec_t bits = out.re.precision();
  Real t(bits);
  mpfr_set(t.get(), turns.get(), MPFR_RNDN);
  reduce_mod1(t);
  // Exact quarter turns keep structurally zero coefficients exactly zero.
  Real scaled(bits);
  mpfr_mul_ui(scaled.get(), t.get(), 4, MPFR_RNDN);
  if (mpfr_integer_p(scaled.get())) {
    switch (mpfr_get_ui(scaled.get(), MPFR_RNDN)) {
      case 0: mpfr_set_ui(out.re.get(), 1, MPFR_RNDN); mpfr_set_zero(out.im.get(), 1); return;
      case 1: mpfr_set_zero(out.re.get(), 1); mpfr_set_ui(out.im.get(), 1, MPFR_RNDN); return;
      case 2: mpfr_set_si(out.re.get(), -1, MPFR_RNDN); mpfr_set_zero(out.im.get(), 1); return;
      default: mpfr_set_zero(out.re.get(), 1); mpfr_set_si(out.im.get(), -1, MPFR_RNDN); return;
    }
  }
  Real angle(bits);
  mpfr_const_pi(angle.get(), MPFR_RNDN);
  mpfr_mul_2ui(angle.get(), angle.get(), 1, MPFR_RNDN);
  mpfr_mul(angle.get(), angle.get(), t.get(), MPFR_RNDN);
  mpfr_sin_cos(out.im.get(), out.re.get(), angle.get(), MPFR_RNDN);
}

std::pair<double, double> log_abs_arg(const Complex& z) {
  Real modulus(64);
  mpfr_hypot(modulus.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  mpfr_log(modulus.get(), modulus.get(), MPFR_RNDN);
  Real angle(64);
  mpfr_atan2(angle.get(), z.im.get(), z.re.get(), MPFR_RNDN);
  return {modulus.to_double(), angle.to_double()};
}

}  // namespace pitslab::mp
