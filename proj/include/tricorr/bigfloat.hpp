#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace tricorr {

// Owning MPFR value with an explicit precision. Binary operators produce a
// result at the larger operand precision, rounded to nearest.
class BigFloat {
 public:
  explicit BigFloat(long precision_bits = 256);
  BigFloat(double v, long precision_bits);
  BigFloat(const mpz_class& v, long precision_bits);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  // Value rounded to the new precision.
  BigFloat rounded(long precision_bits) const;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Scientific notation with the given number of significant digits. With
  // digits == 0: exact integers print as plain integers, anything else with
  // enough digits to round-trip the full precision.
  std::string to_string(int digits = 0) const;
  static BigFloat from_string(const std::string& s, long precision_bits);

  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);
  BigFloat& operator*=(const BigFloat& o);
  BigFloat& operator/=(const BigFloat& o);
  BigFloat operator-() const;

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return b < a; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return b <= a; }

 private:
  mpfr_t v_;
};

BigFloat abs(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat pow(const BigFloat& x, const BigFloat& y);
BigFloat pi(long precision_bits);

struct BigComplex {
  BigFloat re;
  BigFloat im;

  explicit BigComplex(long precision_bits = 256) : re(precision_bits), im(precision_bits) {}
  BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

  BigComplex& operator+=(const BigComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  BigComplex& operator*=(const BigComplex& o);
  // Multiplication by a real scalar.
  BigComplex& operator*=(const BigFloat& s) {
    re *= s;
    im *= s;
    return *this;
  }
  BigComplex conj() const { return BigComplex(re, -im); }
};

inline BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
inline BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }

// n^{-z} = exp(-z log n) on the principal branch, n > 0.
BigComplex pow_neg(unsigned long n, const BigComplex& z);
BigFloat abs(const BigComplex& z);

}  // namespace tricorr
