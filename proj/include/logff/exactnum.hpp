#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <gmpxx.h>

#include "logff/errors.hpp"

namespace logff {

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  explicit ExactRational(const mpz_class& numerator, const mpz_class& denominator = 1);
  explicit ExactRational(const mpq_class& q);

  const mpq_class& value() const { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  ExactRational& operator+=(const ExactRational& o);
  ExactRational& operator-=(const ExactRational& o);
  ExactRational& operator*=(const ExactRational& o);
  ExactRational& operator/=(const ExactRational& o);

  friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
  friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
  friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
  friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }
  friend ExactRational operator-(const ExactRational& a) { return ExactRational(mpq_class(-a.q_)); }
  friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.q_ == b.q_; }
  friend bool operator<(const ExactRational& a, const ExactRational& b) { return a.q_ < b.q_; }

  std::string str() const { return q_.get_str(); }
  friend std::ostream& operator<<(std::ostream& os, const ExactRational& q) { return os << q.str(); }

 private:
  mpq_class q_;
};

bool is_prime(std::int64_t n);

/// The ring Z/p^n for an odd prime p. Residues are plain int64 in [0, p^n).
class Modulus {
 public:
  Modulus() = default;
  /// Throws PreconditionViolation unless p is an odd prime, n >= 1 and
  /// p^n < 2^62.
  Modulus(std::int64_t p, int n);

  std::int64_t p() const { return p_; }
  int n() const { return n_; }
  std::int64_t value() const { return pn_; }

  std::int64_t reduce(std::int64_t v) const {
    v %= pn_;
    return v < 0 ? v + pn_ : v;
  }
  std::int64_t reduce(const mpz_class& v) const;
  std::int64_t add(std::int64_t a, std::int64_t b) const {
    std::int64_t r = a + b;
    return r >= pn_ ? r - pn_ : r;
  }
  std::int64_t sub(std::int64_t a, std::int64_t b) const {
    std::int64_t r = a - b;
    return r < 0 ? r + pn_ : r;
  }
  std::int64_t neg(std::int64_t a) const { return a == 0 ? 0 : pn_ - a; }
  std::int64_t mul(std::int64_t a, std::int64_t b) const {
    return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % pn_);
  }
  std::int64_t pow(std::int64_t a, std::uint64_t e) const;
  /// Inverse of a unit; throws NonIntegral when p divides a.
  std::int64_t inverse(std::int64_t a) const;
  /// p-adic valuation of a residue, capped at n (n means zero).
  int valuation(std::int64_t a) const;
  bool is_unit(std::int64_t a) const { return a % p_ != 0; }
  /// p^k mod p^n for k >= 0.
  std::int64_t p_power(int k) const;

  friend bool operator==(const Modulus& a, const Modulus& b) { return a.p_ == b.p_ && a.n_ == b.n_; }

 private:
  std::int64_t p_ = 3;
  int n_ = 1;
  std::int64_t pn_ = 3;
};

struct ResidueInt {
  std::int64_t value = 0;
  Modulus modulus;

  friend bool operator==(const ResidueInt& a, const ResidueInt& b) {
    return a.value == b.value && a.modulus == b.modulus;
  }
};

/// v_p(q); empty for q = 0 (valuation +infinity).
std::optional<long> valp(const ExactRational& q, std::int64_t p);
std::optional<long> valp(const mpz_class& z, std::int64_t p);

/// v_p(m!) by Legendre's formula.
long factorial_valp(long m, std::int64_t p);

/// Image of q in Z/p^n. Throws NonIntegral when v_p(q) < 0.
ResidueInt reduce_mod(const ExactRational& q, std::int64_t p, int n);
std::int64_t reduce_mod(const ExactRational& q, const Modulus& mod);

mpz_class factorial(long m);

}  // namespace logff
