#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "logff/logring.hpp"

namespace logff {

using Vector = std::vector<RingElem>;

/// Dense matrix over a RingSpec ring. Column k is the image of basis vector k.
class Matrix {
 public:
  Matrix() = default;
  Matrix(RingSpec spec, int rows, int cols);
  static Matrix identity(const RingSpec& spec, int size);
  static Matrix diagonal(const RingSpec& spec, const std::vector<std::int64_t>& entries);
  /// Constant matrix from row-major integer entries.
  static Matrix constant(const RingSpec& spec, const std::vector<std::vector<std::int64_t>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const RingSpec& spec() const { return spec_; }

  RingElem& at(int r, int c) { return data_[index(r, c)]; }
  const RingElem& at(int r, int c) const { return data_[index(r, c)]; }

  Vector column(int c) const;
  void set_column(int c, const Vector& v);
  bool is_zero() const;
  bool is_constant() const;

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scaled(std::int64_t c) const;
  Matrix map(const std::function<RingElem(const RingElem&)>& f, const RingSpec& target) const;
  Matrix map(const std::function<RingElem(const RingElem&)>& f) const { return map(f, spec_); }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.spec_ == b.spec_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string str() const;

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c); }

  RingSpec spec_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<RingElem> data_;
};

Vector mat_vec(const Matrix& m, const Vector& v);
Matrix log_derive(const Matrix& m, int slot);
RingElem determinant(const Matrix& m);

struct BasisVector {
  std::string name;
  int level = 0;
  int torsion = 1;

  friend bool operator==(const BasisVector&, const BasisVector&) = default;
};

/// Whether the Hodge width b - a may reach p - 1 (instead of p - 2).
enum class RangePolicy { Strict, Wide };

/// Filtered de Rham data (V, nabla, Fil) in a basis adapted to the filtration:
/// V = sum R/p^{e_k} e_k, Fil^i = span{e_k : level_k >= i}, and
/// connection[j](i, k) = coefficient of e_i in nabla(delta_j)(e_k).
struct FilteredModule {
  RingSpec spec;
  int a = 0;
  int b = 0;
  std::vector<BasisVector> basis;
  std::vector<Matrix> connection;

  int rank() const { return static_cast<int>(basis.size()); }
  int level(int k) const { return basis[static_cast<std::size_t>(k)].level; }
  int torsion(int k) const { return basis[static_cast<std::size_t>(k)].torsion; }

  friend bool operator==(const FilteredModule&, const FilteredModule&) = default;
};

/// The quadruple (V, nabla, Fil, phi); frobenius column k is phi(e~_k (x) 1).
struct LogFFModule {
  FilteredModule filtered;
  FrobLift lift;
  Matrix frobenius;

  const RingSpec& spec() const { return filtered.spec; }
  int rank() const { return filtered.rank(); }

  friend bool operator==(const LogFFModule&, const LogFFModule&) = default;
};

/// Throws InvariantViolation naming the broken invariant.
void validate(const FilteredModule& m, RangePolicy policy = RangePolicy::Strict);
void validate(const LogFFModule& m, RangePolicy policy = RangePolicy::Strict);
/// Entry (i, k) must be divisible by p^max(0, e_i - e_k).
void validate_torsion_divisibility(const Matrix& m, const std::vector<BasisVector>& rows,
                                   const std::vector<BasisVector>& cols, const std::string& what);

/// Row i reduced modulo p^{e_i}.
Matrix reduce_rows(const Matrix& m, const std::vector<BasisVector>& rows);

enum class Verdict { Pass, Fail, Undetermined };

struct FailureLocation {
  int slot = -1;
  int row = -1;
  int column = -1;
  int shell = -1;
};

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::optional<FailureLocation> where;
  std::string detail;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// First entry where a and b differ modulo the row torsion, if any.
std::optional<FailureLocation> first_difference(const Matrix& a, const Matrix& b, const std::vector<BasisVector>& rows);

/// nabla(delta_j) applied to a coordinate vector.
Vector apply_connection(const FilteredModule& m, int slot, const Vector& v);
/// prod_j prod_{k < i_j} (nabla(delta_j) - k) applied to v.
Vector apply_falling_operator(const FilteredModule& m, const MultiIndex& index, Vector v);

CheckResult check_flat(const FilteredModule& m);
CheckResult check_griffiths(const FilteredModule& m);

/// V~ in the basis e~_k = [e_k]_{level_k}.
class TildeModule {
 public:
  explicit TildeModule(const FilteredModule& m) : module_(&m) {}
  /// Coordinates of [x]_i. Below level a, [x]_i = p^(a-i) [x]_a.
  /// Throws ElementNotInFil if x has a component of level < i.
  Vector embed(int level, const Vector& x) const;

 private:
  const FilteredModule* module_;
};

TildeModule build_tilde(const FilteredModule& m);

/// Matrices of the connection on V~ (x)_g R' induced by nabla, for a ring map
/// g: R -> R' lifting Frobenius modulo p, in the dlog frame of R'.
std::vector<Matrix> divided_connection(const FilteredModule& m, const RingMap& g);
std::vector<Matrix> divided_connection(const LogFFModule& m);

CheckResult check_horizontal(const LogFFModule& m);
CheckResult check_strong_div(const LogFFModule& m);

LogFFModule reduce_mod_pm(const LogFFModule& m, int precision);
FilteredModule reduce_mod_pm(const FilteredModule& m, int precision);

/// Base change along T_j |-> T_j^(p^depth) on divisor slots. The target lift
/// defaults to u'_j = f(u_j). Requires precision <= depth.
LogFFModule root_pullback(const LogFFModule& m, int depth, const std::optional<FrobLift>& target_lift = std::nullopt);

/// Runs flat, griffiths, horizontal and strong_div in that order.
std::vector<CheckResult> check_module(const LogFFModule& m);

struct MorphismData {
  LogFFModule source;
  LogFFModule target;
  Matrix map;  // column k = image of source basis vector k
};

struct MorphismReport {
  CheckResult connection;
  CheckResult filtration;
  CheckResult strictness;
  CheckResult frobenius;
};

/// Strictness is decided by enumeration for constant maps; for non-constant
/// maps only a sufficient criterion is available and the verdict may be
/// Undetermined.
MorphismReport check_morphism(const MorphismData& md);

struct FrobeniusSolution {
  Matrix frobenius;
  bool strongly_divisible = false;
};

/// Generators of the Z/p^n-module of Frobenius matrices whose entries are
/// supported on the given monomials and which are horizontal for the lift.
std::vector<FrobeniusSolution> solve_frobenius(const FilteredModule& m, const FrobLift& lift,
                                               const std::vector<Exponent>& support);

/// Z/p^n kernel generators of an integer matrix (rows of equal length).
std::vector<std::vector<std::int64_t>> kernel_mod(std::vector<std::vector<std::int64_t>> rows, int cols,
                                                  const Modulus& mod);

}  // namespace logff
