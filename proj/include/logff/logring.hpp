#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "logff/exactnum.hpp"

namespace logff {

inline constexpr int kMaxSlots = 6;

/// Exponent vector; slots at index >= d are always zero.
using Exponent = std::array<std::int32_t, kMaxSlots>;

Exponent unit_exponent(int slot, std::int32_t power = 1);
Exponent operator+(const Exponent& a, const Exponent& b);
Exponent operator-(const Exponent& a, const Exponent& b);
Exponent operator*(std::int32_t k, const Exponent& a);

/// Shape and precision of R = (Z/p^n)[T_1..T_s][T_{s+1}^{+-1}..T_d^{+-1}].
/// Slots 1..s are divisor slots (polynomial), s+1..d are Laurent.
class RingSpec {
 public:
  RingSpec() : RingSpec(3, 1, 0, 0) {}
  RingSpec(std::int64_t p, int n, int d, int s);

  std::int64_t p() const { return mod_.p(); }
  int n() const { return mod_.n(); }
  int d() const { return d_; }
  int s() const { return s_; }
  const Modulus& modulus() const { return mod_; }

  RingSpec at_precision(int m) const { return RingSpec(p(), m, d_, s_); }
  /// Same ring up to precision.
  bool same_shape(const RingSpec& o) const { return p() == o.p() && d_ == o.d_ && s_ == o.s_; }
  bool is_divisor_slot(int j) const { return j < s_; }
  /// Divisor slots nonnegative, unused slots zero.
  bool legal(const Exponent& e) const;
  /// T^e is a unit: supported on Laurent slots.
  bool is_unit_monomial(const Exponent& e) const;

  std::string str() const;
  friend bool operator==(const RingSpec& a, const RingSpec& b) {
    return a.mod_ == b.mod_ && a.d_ == b.d_ && a.s_ == b.s_;
  }

 private:
  Modulus mod_;
  int d_;
  int s_;
};

struct MultiIndex {
  std::vector<int> entries;

  int order() const;
  mpz_class factorial() const;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices of length d and order c, lexicographically descending.
std::vector<MultiIndex> shell(int d, int c);

/// Sparse element of a RingSpec ring. Terms sorted by exponent, no zero
/// coefficients, every exponent legal for the ring.
class RingElem {
 public:
  using Term = std::pair<Exponent, std::int64_t>;

  RingElem() = default;
  explicit RingElem(RingSpec spec) : spec_(std::move(spec)) {}

  static RingElem constant(const RingSpec& spec, std::int64_t c);
  static RingElem monomial(const RingSpec& spec, const Exponent& e, std::int64_t c = 1);
  /// T_{slot+1}.
  static RingElem variable(const RingSpec& spec, int slot);
  /// Builds from unsorted, possibly repeated terms. Throws IllegalMap on an
  /// exponent that is not legal for the ring.
  static RingElem from_terms(const RingSpec& spec, std::vector<Term> terms);

  const RingSpec& spec() const { return spec_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::int64_t coefficient(const Exponent& e) const;

  RingElem& operator+=(const RingElem& o);
  RingElem& operator-=(const RingElem& o);
  RingElem& operator*=(const RingElem& o);
  friend RingElem operator+(RingElem a, const RingElem& b) { return a += b; }
  friend RingElem operator-(RingElem a, const RingElem& b) { return a -= b; }
  friend RingElem operator*(const RingElem& a, const RingElem& b);
  friend RingElem operator-(const RingElem& a) { return a.scaled(-1); }
  friend bool operator==(const RingElem& a, const RingElem& b) {
    return a.spec_ == b.spec_ && a.terms_ == b.terms_;
  }

  RingElem scaled(std::int64_t c) const;
  /// Multiplication by T^e; throws IllegalMap if the result leaves the ring.
  RingElem shifted(const Exponent& e) const;
  RingElem pow(unsigned k) const;
  /// Reduction (m <= n) or canonical lift of representatives (m > n).
  RingElem at_precision(int m) const;
  /// Exact division by p, dropping one digit of precision. Throws
  /// NonIntegral when some coefficient is not divisible by p.
  RingElem divided_by_p() const;
  /// Same terms reinterpreted over another spec of the same p and n.
  RingElem recast(const RingSpec& target) const;

  std::string str() const;

 private:
  RingSpec spec_;
  std::vector<Term> terms_;
};

RingElem ring_mul(const RingElem& x, const RingElem& y);

/// Inverse of 1 + p*t in precision m (t is given in any precision >= m-1).
RingElem one_plus_p_inverse(const RingElem& t, int m);

/// delta_j = T_j d/dT_j (0-based slot).
RingElem log_derive(const RingElem& r, int slot);

/// prod_j prod_{k<i_j} (delta_j - k) applied to r.
RingElem falling_op(const RingElem& r, const MultiIndex& index);

/// Falling factorial x(x-1)...(x-m+1) over the integers.
mpz_class falling_factorial(long x, int m);

/// T_j |-> unit * T^exponent * (1 + p*tail). The unit is kept modulo p^(n+1)
/// and the tail modulo p^n, which determines the image modulo p^(n+1).
struct UnitMonomial {
  std::int64_t unit = 1;
  Exponent exponent{};
  RingElem tail;

  friend bool operator==(const UnitMonomial&, const UnitMonomial&) = default;
};

/// Ring homomorphism between two charts (of the same p and precision) whose
/// slot images are unit-monomial. Images are known modulo p^(n+1), which is
/// what the divided-power ratios need.
class RingMap {
 public:
  RingMap() = default;
  RingMap(RingSpec source, RingSpec target, std::vector<UnitMonomial> images);

  /// Decomposes images given at precision n or n+1. Throws IllegalMap.
  static RingMap from_images(const RingSpec& source, const RingSpec& target, const std::vector<RingElem>& images);
  static RingMap identity(const RingSpec& spec);
  /// T_j |-> c_j T_j.
  static RingMap rescaling(const RingSpec& spec, const std::vector<std::int64_t>& units);
  /// T_j |-> T_j^(p^depth) on divisor slots, identity elsewhere.
  static RingMap root_cover(const RingSpec& spec, int depth);

  const RingSpec& source() const { return source_; }
  const RingSpec& target() const { return target_; }
  const UnitMonomial& slot(int j) const { return images_.at(static_cast<std::size_t>(j)); }
  const std::vector<UnitMonomial>& images() const { return images_; }

  /// Image of T_{j+1} in target precision m, 1 <= m <= n+1.
  RingElem image(int j, int m) const;
  /// Substitution; the precision of r (at most n+1) is preserved.
  RingElem apply(const RingElem& r) const;
  /// The composite T |-> next(this(T)).
  RingMap then(const RingMap& next) const;
  RingMap at_precision(int m) const;

  friend bool operator==(const RingMap&, const RingMap&) = default;

 private:
  RingElem inverse_image(int j, int m) const;

  RingSpec source_;
  RingSpec target_;
  std::vector<UnitMonomial> images_;
};

RingElem apply_ring_map(const RingElem& r, const RingMap& f);

/// Frobenius lift Phi(T_j) = (1 + p*u_j) T_j^p.
class FrobLift {
 public:
  FrobLift() = default;
  FrobLift(RingSpec spec, std::vector<RingElem> u);
  static FrobLift standard(const RingSpec& spec);

  const RingSpec& spec() const { return spec_; }
  const std::vector<RingElem>& u() const { return u_; }
  /// w_j = 1 + p*u_j at the lift's precision.
  RingElem w(int j) const;
  const RingMap& as_map() const { return map_; }
  FrobLift at_precision(int m) const;

  friend bool operator==(const FrobLift& a, const FrobLift& b) { return a.spec_ == b.spec_ && a.u_ == b.u_; }

 private:
  RingSpec spec_;
  std::vector<RingElem> u_;
  RingMap map_;
};

RingElem apply_frobenius(const RingElem& r, const FrobLift& lift);

/// x_j = (g1(T_j)/g2(T_j) - 1)/p in target precision n. Throws LiftMismatch
/// unless g1(T_j) = g2(T_j) mod p.
std::vector<RingElem> divided_ratio(const RingMap& g1, const RingMap& g2);

/// Number of shells |I| = 0..N summed in Taylor/gluing series:
/// N = width + ceil(n(p-1)/(p-2)). Past N the divided coefficient of shell c
/// has valuation at least c - width - v_p(c!) >= n.
int truncation_bound(std::int64_t p, int n, int width);

/// Memoized products x^I = prod_j x_j^{i_j}.
class MultiIndexPowers {
 public:
  MultiIndexPowers(std::vector<RingElem> base, const RingSpec& spec);
  const RingElem& get(const MultiIndex& index);

 private:
  std::vector<RingElem> base_;
  std::map<MultiIndex, RingElem> cache_;
};

/// p^k / I! as an exact rational (k may be negative).
ExactRational divided_scalar(std::int64_t p, long power_of_p, const MultiIndex& index);

/// Sum over |I| <= N of g2(d^{I} r) * (g1(T)/g2(T) - 1)^I / I!.
RingElem taylor_sum(const RingElem& r, const RingMap& g1, const RingMap& g2);
RingElem taylor_residual(const RingElem& r, const RingMap& g1, const RingMap& g2);
RingElem taylor_residual(const RingElem& r, const FrobLift& l1, const FrobLift& l2);

/// Same terms over the all-Laurent chart (s = 0).
RingElem localize(const RingElem& r);

}  // namespace logff
