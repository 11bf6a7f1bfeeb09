#include "tricorr/bigfloat.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <stdexcept>

namespace tricorr {

namespace {

long max_prec(mpfr_srcptr a, mpfr_srcptr b) {
  return static_cast<long>(std::max(mpfr_get_prec(a), mpfr_get_prec(b)));
}

void widen(mpfr_ptr v, long prec) {
  if (mpfr_get_prec(v) < prec) mpfr_prec_round(v, prec, MPFR_RNDN);
}

}  // namespace

BigFloat::BigFloat(long precision_bits) {
  mpfr_init2(v_, precision_bits);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(double v, long precision_bits) {
  mpfr_init2(v_, precision_bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const mpz_class& v, long precision_bits) {
  mpfr_init2(v_, precision_bits);
  mpfr_set_z(v_, v.get_mpz_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::rounded(long precision_bits) const {
  BigFloat r(precision_bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

std::string BigFloat::to_string(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits <= 0 && mpfr_integer_p(v_) && mpfr_get_exp(v_) <= static_cast<mpfr_exp_t>(mpfr_get_prec(v_))) {
    // Exactly representable integers print without an exponent.
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
    return z.get_str();
  }
  if (digits <= 0) {
    // ceil(prec * log10(2)) + 1 significant digits round-trip.
    digits = static_cast<int>(static_cast<double>(mpfr_get_prec(v_)) * 0.30102999566398120) + 2;
  }
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

BigFloat BigFloat::from_string(const std::string& s, long precision_bits) {
  BigFloat r(precision_bits);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0 && !mpfr_number_p(r.v_)) {
    throw std::invalid_argument("BigFloat: cannot parse '" + s + "'");
  }
  return r;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
  widen(v_, max_prec(v_, o.v_));
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& o) {
  widen(v_, max_prec(v_, o.v_));
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& o) {
  widen(v_, max_prec(v_, o.v_));
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& o) {
  widen(v_, max_prec(v_, o.v_));
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat BigFloat::operator-() const {
  BigFloat r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

BigFloat abs(const BigFloat& x) {
  BigFloat r(x);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}

BigFloat exp(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat log(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat sin(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_sin(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat cos(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_cos(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat pow(const BigFloat& x, const BigFloat& y) {
  BigFloat r(std::max(x.precision(), y.precision()));
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}

BigFloat pi(long precision_bits) {
  BigFloat r(precision_bits);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

BigComplex& BigComplex::operator*=(const BigComplex& o) {
  BigFloat rr = re * o.re - im * o.im;
  BigFloat ii = re * o.im + im * o.re;
  re = std::move(rr);
  im = std::move(ii);
  return *this;
}

BigComplex pow_neg(unsigned long n, const BigComplex& z) {
  const long prec = std::max(z.re.precision(), z.im.precision());
  BigFloat logn(prec);
  mpfr_set_ui(logn.get(), n, MPFR_RNDN);
  mpfr_log(logn.get(), logn.get(), MPFR_RNDN);
  // exp(-(a+ib) L) = e^{-aL} (cos(bL) - i sin(bL))
  BigFloat mag = exp(-(z.re * logn));
  BigFloat ang = z.im * logn;
  BigFloat c(prec), s(prec);
  mpfr_sin_cos(s.get(), c.get(), ang.get(), MPFR_RNDN);
  return BigComplex(mag * c, -(mag * s));
}

BigFloat abs(const BigComplex& z) {
  BigFloat r(std::max(z.re.precision(), z.im.precision()));
  mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return r;
}

}  // namespace tricorr
