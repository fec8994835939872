#pragma once

#include <map>
#include <vector>

#include "logff/exactnum.hpp"
#include "logff/logring.hpp"

namespace logff {

/// Dense univariate polynomial over Q, coefficient i multiplies X^i.
using RationalPoly = std::vector<ExactRational>;

RationalPoly poly_mul(const RationalPoly& a, const RationalPoly& b);
RationalPoly poly_trim(RationalPoly a);

/// f_m(X) = X(X-1)...(X-m+1) in the monomial basis, f_0 = 1.
struct FallingPoly {
  int degree = 0;
  std::vector<mpz_class> coefficients;

  RationalPoly as_rational() const;
};

FallingPoly falling_poly(int m);

/// The unique c_k with poly = sum_k c_k f_k.
std::vector<ExactRational> to_falling_basis(const RationalPoly& poly);

/// a_{mn}^k with f_m f_n = sum_k a_{mn}^k f_k.
struct CoeffTable {
  int m = 0;
  int n = 0;
  std::map<int, ExactRational> entries;  // zero entries omitted

  ExactRational at(int k) const;
};

/// Memoized behind a mutex; the returned reference stays valid.
const CoeffTable& structure_constants(int m, int n);

/// a_{IJ}^K = prod_l a_{i_l j_l}^{k_l}; zero entries omitted.
std::map<MultiIndex, mpz_class> multi_structure_constants(const MultiIndex& i, const MultiIndex& j);

/// Checks sum_{m,n} a_{mn}^k (X-1)^m/m! (Y-1)^n/n! = (XY-1)^k/k! through
/// total degree N in (X-1), (Y-1).
bool verify_coeff_identity(int k, int degree_bound);

}  // namespace logff
