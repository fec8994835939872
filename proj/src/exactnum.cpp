#include "logff/exactnum.hpp"

#include <limits>

namespace logff {

ExactRational::ExactRational(const mpz_class& numerator, const mpz_class& denominator)
    : q_(numerator, denominator) {
  if (denominator == 0) throw PreconditionViolation("ExactRational: zero denominator");
  q_.canonicalize();
}

ExactRational::ExactRational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

ExactRational& ExactRational::operator+=(const ExactRational& o) {
  q_ += o.q_;
  return *this;
}
ExactRational& ExactRational::operator-=(const ExactRational& o) {
  q_ -= o.q_;
  return *this;
}
ExactRational& ExactRational::operator*=(const ExactRational& o) {
  q_ *= o.q_;
  return *this;
}
ExactRational& ExactRational::operator/=(const ExactRational& o) {
  if (o.is_zero()) throw PreconditionViolation("ExactRational: division by zero");
  q_ /= o.q_;
  return *this;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Modulus::Modulus(std::int64_t p, int n) : p_(p), n_(n) {
  if (p <= 2 || !is_prime(p)) throw PreconditionViolation("modulus: p must be an odd prime, got " + std::to_string(p));
  if (n < 1) throw PreconditionViolation("modulus: precision must be >= 1");
  constexpr std::int64_t kLimit = std::int64_t{1} << 62;
  std::int64_t pn = 1;
  for (int i = 0; i < n; ++i) {
    if (pn > kLimit / p) throw PreconditionViolation("modulus: p^n does not fit in 62 bits");
    pn *= p;
  }
  pn_ = pn;
}

std::int64_t Modulus::reduce(const mpz_class& v) const {
  mpz_class r = v % pn_;
  if (r < 0) r += pn_;
  return r.get_si();
}

std::int64_t Modulus::pow(std::int64_t a, std::uint64_t e) const {
  std::int64_t result = reduce(std::int64_t{1});
  std::int64_t base = reduce(a);
  while (e != 0) {
    if (e & 1U) result = mul(result, base);
    base = mul(base, base);
    e >>= 1U;
  }
  return result;
}

std::int64_t Modulus::inverse(std::int64_t a) const {
  a = reduce(a);
  if (a % p_ == 0) throw NonIntegral("inverse of a non-unit " + std::to_string(a) + " mod " + std::to_string(pn_));
  // Euler: the unit group of Z/p^n has order p^(n-1)(p-1).
  std::uint64_t order = static_cast<std::uint64_t>(pn_ / p_) * static_cast<std::uint64_t>(p_ - 1);
  return pow(a, order - 1);
}

int Modulus::valuation(std::int64_t a) const {
  a = reduce(a);
  if (a == 0) return n_;
  int v = 0;
  while (a % p_ == 0) {
    a /= p_;
    ++v;
  }
  return v;
}

std::int64_t Modulus::p_power(int k) const {
  if (k >= n_) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r *= p_;
  return r % pn_;
}

std::optional<long> valp(const mpz_class& z, std::int64_t p) {
  if (z == 0) return std::nullopt;
  mpz_class rest;
  mpz_class prime(static_cast<long>(p));
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), z.get_mpz_t(), prime.get_mpz_t()));
}

std::optional<long> valp(const ExactRational& q, std::int64_t p) {
  if (q.is_zero()) return std::nullopt;
  return *valp(q.numerator(), p) - *valp(q.denominator(), p);
}

long factorial_valp(long m, std::int64_t p) {
  long digits = 0;
  for (long r = m; r > 0; r /= p) digits += r % p;
  return (m - digits) / (p - 1);
}

std::int64_t reduce_mod(const ExactRational& q, const Modulus& mod) {
  if (q.is_zero()) return 0;
  auto v = valp(q, mod.p());
  if (*v < 0)
    throw NonIntegral("coefficient " + q.str() + " has valuation " + std::to_string(*v) + " at p=" +
                      std::to_string(mod.p()));
  std::int64_t num = mod.reduce(q.numerator());
  std::int64_t den = mod.reduce(q.denominator());
  return mod.mul(num, mod.inverse(den));
}

ResidueInt reduce_mod(const ExactRational& q, std::int64_t p, int n) {
  Modulus mod(p, n);
  return ResidueInt{reduce_mod(q, mod), mod};
}

mpz_class factorial(long m) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(m));
  return r;
}

}  // namespace logff
