#include "logff/ffmodule.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "logff/transport.hpp"

namespace logff {

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(RingSpec spec, int rows, int cols)
    : spec_(std::move(spec)), rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), RingElem(spec_)) {}

Matrix Matrix::identity(const RingSpec& spec, int size) {
  Matrix m(spec, size, size);
  for (int i = 0; i < size; ++i) m.at(i, i) = RingElem::constant(spec, 1);
  return m;
}

Matrix Matrix::diagonal(const RingSpec& spec, const std::vector<std::int64_t>& entries) {
  auto size = static_cast<int>(entries.size());
  Matrix m(spec, size, size);
  for (int i = 0; i < size; ++i) m.at(i, i) = RingElem::constant(spec, entries[static_cast<std::size_t>(i)]);
  return m;
}

Matrix Matrix::constant(const RingSpec& spec, const std::vector<std::vector<std::int64_t>>& rows) {
  auto r = static_cast<int>(rows.size());
  int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  Matrix m(spec, r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m.at(i, k) = RingElem::constant(spec, rows[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(k)));
  return m;
}

Vector Matrix::column(int c) const {
  Vector v;
  for (int r = 0; r < rows_; ++r) v.push_back(at(r, c));
  return v;
}

void Matrix::set_column(int c, const Vector& v) {
  for (int r = 0; r < rows_; ++r) at(r, c) = v[static_cast<std::size_t>(r)];
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const RingElem& x) { return x.is_zero(); });
}

bool Matrix::is_constant() const {
  return std::all_of(data_.begin(), data_.end(), [](const RingElem& x) { return x.is_constant(); });
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw SpecMismatch("matrix product: shape mismatch");
  Matrix r(spec_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const RingElem& x = at(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j)
        if (!o.at(k, j).is_zero()) r.at(i, j) += x * o.at(k, j);
    }
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw SpecMismatch("matrix sum: shape mismatch");
  Matrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw SpecMismatch("matrix difference: shape mismatch");
  Matrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

Matrix Matrix::scaled(std::int64_t c) const {
  Matrix r = *this;
  for (auto& x : r.data_) x = x.scaled(c);
  return r;
}

Matrix Matrix::map(const std::function<RingElem(const RingElem&)>& f, const RingSpec& target) const {
  Matrix r(target, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = f(data_[i]);
  return r;
}

std::string Matrix::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows_; ++i) {
    os << (i == 0 ? "[" : ", [");
    for (int k = 0; k < cols_; ++k) os << (k == 0 ? "" : ", ") << at(i, k).str();
    os << "]";
  }
  os << "]";
  return os.str();
}

Vector mat_vec(const Matrix& m, const Vector& v) {
  Vector out(static_cast<std::size_t>(m.rows()), RingElem(m.spec()));
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k)
      if (!m.at(i, k).is_zero() && !v[static_cast<std::size_t>(k)].is_zero())
        out[static_cast<std::size_t>(i)] += m.at(i, k) * v[static_cast<std::size_t>(k)];
  return out;
}

Matrix log_derive(const Matrix& m, int slot) {
  return m.map([slot](const RingElem& x) { return log_derive(x, slot); });
}

RingElem determinant(const Matrix& m) {
  if (m.rows() != m.cols()) throw PreconditionViolation("determinant of a non-square matrix");
  const int size = m.rows();
  if (size == 0) return RingElem::constant(m.spec(), 1);
  if (size == 1) return m.at(0, 0);
  RingElem det(m.spec());
  for (int c = 0; c < size; ++c) {
    if (m.at(0, c).is_zero()) continue;
    Matrix minor(m.spec(), size - 1, size - 1);
    for (int i = 1; i < size; ++i)
      for (int k = 0, kk = 0; k < size; ++k)
        if (k != c) minor.at(i - 1, kk++) = m.at(i, k);
    RingElem term = m.at(0, c) * determinant(minor);
    det += (c % 2 == 0) ? term : -term;
  }
  return det;
}

// ---------------------------------------------------------------------------
// Validation

void validate_torsion_divisibility(const Matrix& m, const std::vector<BasisVector>& rows,
                                   const std::vector<BasisVector>& cols, const std::string& what) {
  const Modulus& mod = m.spec().modulus();
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) {
      int need = std::max(0, rows[static_cast<std::size_t>(i)].torsion - cols[static_cast<std::size_t>(k)].torsion);
      for (const auto& [e, c] : m.at(i, k).terms())
        if (mod.valuation(c) < need)
          throw InvariantViolation("torsion-divisibility", what + " entry (" + std::to_string(i) + "," + std::to_string(k) +
                                                               ") must be divisible by p^" + std::to_string(need));
    }
}

void validate(const FilteredModule& m, RangePolicy policy) {
  const std::int64_t p = m.spec.p();
  if (m.b < m.a) throw InvariantViolation("hodge-range", "hodge range has b < a");
  const std::int64_t width_limit = policy == RangePolicy::Strict ? p - 2 : p - 1;
  if (m.b - m.a > width_limit)
    throw InvariantViolation("hodge-width", "b - a = " + std::to_string(m.b - m.a) + " exceeds " + std::to_string(width_limit) +
                                                (policy == RangePolicy::Strict ? " (p - 2)" : " (p - 1)"));
  for (const auto& bv : m.basis) {
    if (bv.level < m.a || bv.level > m.b)
      throw InvariantViolation("level-range", "basis vector " + bv.name + " has level outside [a, b]");
    if (bv.torsion < 1 || bv.torsion > m.spec.n())
      throw InvariantViolation("torsion-range", "basis vector " + bv.name + " has torsion outside [1, n]");
  }
  if (static_cast<int>(m.connection.size()) != m.spec.d())
    throw InvariantViolation("connection-arity", "need one connection matrix per slot");
  for (const auto& a : m.connection) {
    if (a.rows() != m.rank() || a.cols() != m.rank()) throw InvariantViolation("matrix-shape", "connection matrix is not rank x rank");
    if (!(a.spec() == m.spec)) throw InvariantViolation("matrix-ring", "connection matrix over the wrong ring");
    validate_torsion_divisibility(a, m.basis, m.basis, "connection");
  }
}

void validate(const LogFFModule& m, RangePolicy policy) {
  validate(m.filtered, policy);
  if (!(m.lift.spec() == m.spec())) throw InvariantViolation("lift-ring", "Frobenius lift over the wrong ring");
  if (m.frobenius.rows() != m.rank() || m.frobenius.cols() != m.rank())
    throw InvariantViolation("matrix-shape", "Frobenius matrix is not rank x rank");
  if (!(m.frobenius.spec() == m.spec())) throw InvariantViolation("matrix-ring", "Frobenius matrix over the wrong ring");
  validate_torsion_divisibility(m.frobenius, m.filtered.basis, m.filtered.basis, "frobenius");
}

Matrix reduce_rows(const Matrix& m, const std::vector<BasisVector>& rows) {
  Matrix r = m;
  const int n = m.spec().n();
  for (int i = 0; i < m.rows(); ++i) {
    int e = rows[static_cast<std::size_t>(i)].torsion;
    if (e >= n) continue;
    for (int k = 0; k < m.cols(); ++k) r.at(i, k) = m.at(i, k).at_precision(e).at_precision(n);
  }
  return r;
}

std::optional<FailureLocation> first_difference(const Matrix& a, const Matrix& b, const std::vector<BasisVector>& rows) {
  Matrix diff = reduce_rows(a - b, rows);
  for (int i = 0; i < diff.rows(); ++i)
    for (int k = 0; k < diff.cols(); ++k)
      if (!diff.at(i, k).is_zero()) return FailureLocation{-1, i, k, -1};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Connection operators and checks

Vector apply_connection(const FilteredModule& m, int slot, const Vector& v) {
  Vector out = mat_vec(m.connection[static_cast<std::size_t>(slot)], v);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += log_derive(v[i], slot);
  return out;
}

Vector apply_falling_operator(const FilteredModule& m, const MultiIndex& index, Vector v) {
  for (int j = 0; j < m.spec.d(); ++j)
    for (int k = 0; k < index.entries[static_cast<std::size_t>(j)]; ++k) {
      Vector next = apply_connection(m, j, v);
      for (std::size_t i = 0; i < v.size(); ++i) next[i] -= v[i].scaled(k);
      v = std::move(next);
    }
  return v;
}

CheckResult check_flat(const FilteredModule& m) {
  CheckResult result{"flat", Verdict::Pass, std::nullopt, ""};
  for (int i = 0; i < m.spec.d(); ++i)
    for (int j = i + 1; j < m.spec.d(); ++j) {
      const Matrix& ai = m.connection[static_cast<std::size_t>(i)];
      const Matrix& aj = m.connection[static_cast<std::size_t>(j)];
      Matrix curvature = log_derive(aj, i) - log_derive(ai, j) + ai * aj - aj * ai;
      Matrix zero(m.spec, m.rank(), m.rank());
      if (auto where = first_difference(curvature, zero, m.basis)) {
        where->slot = i;
        result.verdict = Verdict::Fail;
        result.where = where;
        result.detail = "curvature of slots (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is nonzero";
        return result;
      }
    }
  return result;
}

CheckResult check_griffiths(const FilteredModule& m) {
  CheckResult result{"griffiths", Verdict::Pass, std::nullopt, ""};
  for (int j = 0; j < m.spec.d(); ++j) {
    Matrix a = reduce_rows(m.connection[static_cast<std::size_t>(j)], m.basis);
    for (int i = 0; i < m.rank(); ++i)
      for (int k = 0; k < m.rank(); ++k)
        if (!a.at(i, k).is_zero() && m.level(i) < m.level(k) - 1) {
          result.verdict = Verdict::Fail;
          result.where = FailureLocation{j, i, k, -1};
          result.detail = "nabla maps level " + std::to_string(m.level(k)) + " to level " + std::to_string(m.level(i));
          return result;
        }
  }
  return result;
}

Vector TildeModule::embed(int level, const Vector& x) const {
  const FilteredModule& m = *module_;
  Vector out(static_cast<std::size_t>(m.rank()), RingElem(m.spec));
  for (int k = 0; k < m.rank(); ++k) {
    RingElem coord = x[static_cast<std::size_t>(k)].at_precision(m.torsion(k)).at_precision(m.spec.n());
    if (coord.is_zero()) continue;
    if (m.level(k) < level)
      throw ElementNotInFil("component along " + m.basis[static_cast<std::size_t>(k)].name + " has level below " +
                            std::to_string(level));
    out[static_cast<std::size_t>(k)] = coord.scaled(m.spec.modulus().p_power(m.level(k) - level));
  }
  return out;
}

TildeModule build_tilde(const FilteredModule& m) { return TildeModule(m); }

std::vector<Matrix> divided_connection(const FilteredModule& m, const RingMap& g) {
  if (!(g.source() == m.spec)) throw SpecMismatch("divided_connection: map source differs from module ring");
  const RingSpec& target = g.target();
  const Modulus& mod = target.modulus();
  const std::int64_t p = target.p();
  const int d_source = m.spec.d();
  const int d_target = target.d();

  // (1/p) g^*(dlog T_j) = sum_m frame[j][m] dlog T'_m
  std::vector<std::vector<RingElem>> frame(static_cast<std::size_t>(d_source));
  for (int j = 0; j < d_source; ++j) {
    const UnitMonomial& um = g.slot(j);
    RingElem inverse_unit = one_plus_p_inverse(um.tail, target.n());
    for (int s = 0; s < d_target; ++s) {
      std::int64_t exponent_part = reduce_mod(ExactRational(um.exponent[s]) / ExactRational(p), mod);
      frame[static_cast<std::size_t>(j)].push_back(RingElem::constant(target, exponent_part) +
                                                   log_derive(um.tail, s) * inverse_unit);
    }
  }

  std::vector<Matrix> out(static_cast<std::size_t>(d_target), Matrix(target, m.rank(), m.rank()));
  for (int l = 0; l < m.rank(); ++l)
    for (int k = 0; k < m.rank(); ++k) {
      long shift = m.level(l) - m.level(k) + 1;
      for (int j = 0; j < d_source; ++j) {
        const RingElem& entry = m.connection[static_cast<std::size_t>(j)].at(l, k);
        if (entry.at_precision(m.torsion(l)).is_zero()) continue;
        std::int64_t scalar = reduce_mod(divided_scalar(p, shift, MultiIndex{}), mod);
        RingElem pulled = g.apply(entry).scaled(scalar);
        for (int s = 0; s < d_target; ++s)
          out[static_cast<std::size_t>(s)].at(l, k) += pulled * frame[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      }
    }
  for (auto& a : out) a = reduce_rows(a, m.basis);
  return out;
}

std::vector<Matrix> divided_connection(const LogFFModule& m) { return divided_connection(m.filtered, m.lift.as_map()); }

CheckResult check_horizontal(const LogFFModule& m) {
  CheckResult result{"horizontal", Verdict::Pass, std::nullopt, ""};
  std::vector<Matrix> divided = divided_connection(m);
  const Matrix& f = m.frobenius;
  for (int j = 0; j < m.spec().d(); ++j) {
    Matrix lhs = log_derive(f, j) + m.filtered.connection[static_cast<std::size_t>(j)] * f;
    Matrix rhs = f * divided[static_cast<std::size_t>(j)];
    if (auto where = first_difference(lhs, rhs, m.filtered.basis)) {
      where->slot = j;
      result.verdict = Verdict::Fail;
      result.where = where;
      result.detail = "phi does not intertwine the connections along slot " + std::to_string(j + 1);
      return result;
    }
  }
  return result;
}

CheckResult check_strong_div(const LogFFModule& m) {
  CheckResult result{"strong_div", Verdict::Pass, std::nullopt, ""};
  std::map<int, std::vector<int>> layers;
  for (int k = 0; k < m.rank(); ++k) layers[m.filtered.torsion(k)].push_back(k);
  RingSpec residue = m.spec().at_precision(1);
  for (const auto& [torsion, idx] : layers) {
    auto size = static_cast<int>(idx.size());
    Matrix block(residue, size, size);
    for (int i = 0; i < size; ++i)
      for (int k = 0; k < size; ++k)
        block.at(i, k) = m.frobenius.at(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)]).at_precision(1);
    RingElem det = determinant(block);
    bool unit = det.terms().size() == 1 && residue.is_unit_monomial(det.terms()[0].first);
    if (!unit) {
      result.verdict = Verdict::Fail;
      result.where = FailureLocation{-1, idx.front(), idx.front(), -1};
      result.detail = "det of the torsion-" + std::to_string(torsion) + " layer is " + det.str() + " mod p, not a unit";
      return result;
    }
  }
  return result;
}

std::vector<CheckResult> check_module(const LogFFModule& m) {
  std::vector<CheckResult> out;
  out.push_back(check_flat(m.filtered));
  out.push_back(check_griffiths(m.filtered));
  if (out[0].passed() && out[1].passed()) {
    out.push_back(check_horizontal(m));
  } else {
    out.push_back({"horizontal", Verdict::Undetermined, std::nullopt, "requires an integrable connection satisfying Griffiths transversality"});
  }
  out.push_back(check_strong_div(m));
  return out;
}

// ---------------------------------------------------------------------------
// Precision change and root covers

FilteredModule reduce_mod_pm(const FilteredModule& m, int precision) {
  if (precision < 1 || precision > m.spec.n()) throw PreconditionViolation("reduce_mod_pm: need 1 <= m <= n");
  FilteredModule r;
  r.spec = m.spec.at_precision(precision);
  r.a = m.a;
  r.b = m.b;
  r.basis = m.basis;
  for (auto& bv : r.basis) bv.torsion = std::min(bv.torsion, precision);
  for (const auto& a : m.connection)
    r.connection.push_back(a.map([precision](const RingElem& x) { return x.at_precision(precision); }, r.spec));
  return r;
}

LogFFModule reduce_mod_pm(const LogFFModule& m, int precision) {
  LogFFModule r{reduce_mod_pm(m.filtered, precision), m.lift.at_precision(precision), Matrix()};
  r.frobenius = m.frobenius.map([precision](const RingElem& x) { return x.at_precision(precision); }, r.spec());
  return r;
}

LogFFModule root_pullback(const LogFFModule& m, int depth, const std::optional<FrobLift>& target_lift) {
  if (depth < 0) throw PreconditionViolation("root_pullback: negative depth");
  if (depth > 0 && m.spec().n() > depth)
    throw PreconditionViolation("root_pullback: module precision " + std::to_string(m.spec().n()) + " exceeds root depth " +
                                std::to_string(depth) + "; reduce mod p^m first");
  RingMap f = RingMap::root_cover(m.spec(), depth);
  FrobLift lift;
  if (target_lift) {
    lift = *target_lift;
  } else {
    std::vector<RingElem> u;
    for (const auto& x : m.lift.u()) u.push_back(f.apply(x));
    lift = FrobLift(m.spec(), std::move(u));
  }
  return pullback_ff(m, f, m.lift, lift);
}

// ---------------------------------------------------------------------------
// Morphisms

namespace {

/// Enumerates H(v) for all constant v; decides strictness level by level.
Verdict constant_strictness(const MorphismData& md, std::string& detail) {
  const FilteredModule& src = md.source.filtered;
  const FilteredModule& dst = md.target.filtered;
  const std::int64_t p = src.spec.p();
  const Modulus& mod = src.spec.modulus();
  std::vector<std::int64_t> ranges;
  double total = 1;
  for (const auto& bv : src.basis) {
    std::int64_t r = 1;
    for (int i = 0; i < bv.torsion; ++i) r *= p;
    ranges.push_back(r);
    total *= static_cast<double>(r);
  }
  if (total > 4.0e6) {
    detail = "constant map too large to enumerate";
    return Verdict::Undetermined;
  }
  std::vector<std::vector<std::int64_t>> h(static_cast<std::size_t>(dst.rank()), std::vector<std::int64_t>(static_cast<std::size_t>(src.rank())));
  for (int l = 0; l < dst.rank(); ++l)
    for (int k = 0; k < src.rank(); ++k) h[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = md.map.at(l, k).coefficient(Exponent{});
  std::vector<std::int64_t> dst_mod;
  for (const auto& bv : dst.basis) dst_mod.push_back(mod.p_power(bv.torsion) == 0 ? mod.value() : mod.p_power(bv.torsion));

  auto image = [&](const std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> w(static_cast<std::size_t>(dst.rank()), 0);
    for (std::size_t l = 0; l < w.size(); ++l) {
      std::int64_t acc = 0;
      for (std::size_t k = 0; k < v.size(); ++k) acc = mod.add(acc, mod.mul(h[l][k], v[k]));
      w[l] = acc % dst_mod[l];
    }
    return w;
  };

  const int lo = std::min(src.a, dst.a);
  const int hi = std::max(src.b, dst.b);
  for (int level = lo + 1; level <= hi; ++level) {
    std::set<std::vector<std::int64_t>> filtered_image;
    std::vector<std::vector<std::int64_t>> candidates;
    std::vector<std::int64_t> v(ranges.size(), 0);
    while (true) {
      bool in_fil = true;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] != 0 && src.level(static_cast<int>(k)) < level) in_fil = false;
      auto w = image(v);
      if (in_fil) filtered_image.insert(w);
      bool lands_in_fil = true;
      for (std::size_t l = 0; l < w.size(); ++l)
        if (w[l] != 0 && dst.level(static_cast<int>(l)) < level) lands_in_fil = false;
      if (lands_in_fil) candidates.push_back(std::move(w));
      std::size_t pos = 0;
      while (pos < v.size() && ++v[pos] == ranges[pos]) v[pos++] = 0;
      if (pos == v.size()) break;
    }
    for (const auto& w : candidates)
      if (!filtered_image.count(w)) {
        detail = "H(V) meets Fil^" + std::to_string(level) + " outside H(Fil^" + std::to_string(level) + ")";
        return Verdict::Fail;
      }
  }
  return Verdict::Pass;
}

/// Sufficient criterion: at every level the block of H between the parts
/// below that level is invertible, so nothing below the level maps into it.
Verdict symbolic_strictness(const MorphismData& md, std::string& detail) {
  const FilteredModule& src = md.source.filtered;
  const FilteredModule& dst = md.target.filtered;
  const int lo = std::min(src.a, dst.a);
  const int hi = std::max(src.b, dst.b);
  RingSpec residue = src.spec.at_precision(1);
  for (int level = lo + 1; level <= hi; ++level) {
    std::vector<int> cols, rows;
    for (int k = 0; k < src.rank(); ++k)
      if (src.level(k) < level) cols.push_back(k);
    for (int l = 0; l < dst.rank(); ++l)
      if (dst.level(l) < level) rows.push_back(l);
    if (cols.empty()) continue;
    if (rows.size() != cols.size()) {
      detail = "non-constant map; strictness criterion inconclusive at level " + std::to_string(level);
      return Verdict::Undetermined;
    }
    auto size = static_cast<int>(cols.size());
    Matrix block(residue, size, size);
    for (int i = 0; i < size; ++i)
      for (int k = 0; k < size; ++k)
        block.at(i, k) = md.map.at(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(k)]).at_precision(1);
    RingElem det = determinant(block);
    if (!(det.terms().size() == 1 && residue.is_unit_monomial(det.terms()[0].first))) {
      detail = "non-constant map; strictness criterion inconclusive at level " + std::to_string(level);
      return Verdict::Undetermined;
    }
  }
  return Verdict::Pass;
}

}  // namespace

MorphismReport check_morphism(const MorphismData& md) {
  const FilteredModule& src = md.source.filtered;
  const FilteredModule& dst = md.target.filtered;
  if (!(src.spec == dst.spec) || !(md.map.spec() == src.spec)) throw SpecMismatch("check_morphism: modules over different rings");
  if (md.map.rows() != dst.rank() || md.map.cols() != src.rank()) throw SpecMismatch("check_morphism: map has the wrong shape");
  validate_torsion_divisibility(md.map, dst.basis, src.basis, "morphism");

  MorphismReport report;
  report.connection = {"connection", Verdict::Pass, std::nullopt, ""};
  for (int j = 0; j < src.spec.d(); ++j) {
    Matrix lhs = log_derive(md.map, j) + dst.connection[static_cast<std::size_t>(j)] * md.map;
    Matrix rhs = md.map * src.connection[static_cast<std::size_t>(j)];
    if (auto where = first_difference(lhs, rhs, dst.basis)) {
      where->slot = j;
      report.connection = {"connection", Verdict::Fail, where, "H does not commute with nabla"};
      break;
    }
  }

  report.filtration = {"filtration", Verdict::Pass, std::nullopt, ""};
  Matrix h = reduce_rows(md.map, dst.basis);
  for (int l = 0; l < dst.rank() && report.filtration.passed(); ++l)
    for (int k = 0; k < src.rank(); ++k)
      if (!h.at(l, k).is_zero() && dst.level(l) < src.level(k)) {
        report.filtration = {"filtration", Verdict::Fail, FailureLocation{-1, l, k, -1}, "H lowers the filtration level"};
        break;
      }

  report.strictness = {"strictness", Verdict::Pass, std::nullopt, ""};
  if (!report.filtration.passed()) {
    report.strictness.verdict = Verdict::Undetermined;
    report.strictness.detail = "H is not filtered";
  } else {
    std::string detail;
    report.strictness.verdict = md.map.is_constant() ? constant_strictness(md, detail) : symbolic_strictness(md, detail);
    report.strictness.detail = detail;
  }

  report.frobenius = {"frobenius", Verdict::Pass, std::nullopt, ""};
  if (!report.filtration.passed()) {
    report.frobenius = {"frobenius", Verdict::Undetermined, std::nullopt, "H is not filtered"};
  } else if (!(md.source.lift == md.target.lift)) {
    report.frobenius = {"frobenius", Verdict::Undetermined, std::nullopt, "modules use different Frobenius lifts"};
  } else {
    const Modulus& mod = src.spec.modulus();
    Matrix tilde(src.spec, dst.rank(), src.rank());
    for (int l = 0; l < dst.rank(); ++l)
      for (int k = 0; k < src.rank(); ++k)
        if (!h.at(l, k).is_zero())
          tilde.at(l, k) = apply_frobenius(h.at(l, k), md.source.lift).scaled(mod.p_power(dst.level(l) - src.level(k)));
    if (auto where = first_difference(md.target.frobenius * tilde, md.map * md.source.frobenius, dst.basis))
      report.frobenius = {"frobenius", Verdict::Fail, where, "H does not commute with phi"};
  }
  return report;
}

// ---------------------------------------------------------------------------
// Linear algebra over Z/p^n and the Frobenius solver

std::vector<std::vector<std::int64_t>> kernel_mod(std::vector<std::vector<std::int64_t>> a, int cols, const Modulus& mod) {
  const auto rows = static_cast<int>(a.size());
  for (auto& row : a) {
    if (static_cast<int>(row.size()) != cols) throw PreconditionViolation("kernel_mod: ragged matrix");
    for (auto& x : row) x = mod.reduce(x);
  }
  std::vector<std::vector<std::int64_t>> q(static_cast<std::size_t>(cols), std::vector<std::int64_t>(static_cast<std::size_t>(cols), 0));
  for (int i = 0; i < cols; ++i) q[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  auto at = [&](int r, int c) -> std::int64_t& { return a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; };
  auto qat = [&](int r, int c) -> std::int64_t& { return q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; };

  std::vector<int> pivot_valuation;
  int t = 0;
  for (; t < std::min(rows, cols); ++t) {
    int best_r = -1, best_c = -1, best_v = mod.n();
    for (int r = t; r < rows; ++r)
      for (int c = t; c < cols; ++c)
        if (at(r, c) != 0 && mod.valuation(at(r, c)) < best_v) {
          best_v = mod.valuation(at(r, c));
          best_r = r;
          best_c = c;
        }
    if (best_r < 0) break;
    std::swap(a[static_cast<std::size_t>(t)], a[static_cast<std::size_t>(best_r)]);
    for (int r = 0; r < rows; ++r) std::swap(at(r, t), at(r, best_c));
    for (int r = 0; r < cols; ++r) std::swap(qat(r, t), qat(r, best_c));
    const std::int64_t pv = mod.p_power(best_v);
    const std::int64_t unit_inv = mod.inverse(at(t, t) / pv);
    for (int r = t + 1; r < rows; ++r) {
      if (at(r, t) == 0) continue;
      std::int64_t f = mod.mul(at(r, t) / pv, unit_inv);
      for (int c = t; c < cols; ++c) at(r, c) = mod.sub(at(r, c), mod.mul(f, at(t, c)));
    }
    for (int c = t + 1; c < cols; ++c) {
      if (at(t, c) == 0) continue;
      std::int64_t f = mod.mul(at(t, c) / pv, unit_inv);
      for (int r = 0; r < rows; ++r) at(r, c) = mod.sub(at(r, c), mod.mul(f, at(r, t)));
      for (int r = 0; r < cols; ++r) qat(r, c) = mod.sub(qat(r, c), mod.mul(f, qat(r, t)));
    }
    pivot_valuation.push_back(best_v);
  }

  std::vector<std::vector<std::int64_t>> generators;
  auto push_column = [&](int c, std::int64_t scale) {
    std::vector<std::int64_t> g(static_cast<std::size_t>(cols));
    for (int r = 0; r < cols; ++r) g[static_cast<std::size_t>(r)] = mod.mul(qat(r, c), scale);
    generators.push_back(std::move(g));
  };
  for (int i = 0; i < t; ++i) {
    int v = pivot_valuation[static_cast<std::size_t>(i)];
    if (v > 0) push_column(i, mod.p_power(mod.n() - v));
  }
  for (int i = t; i < cols; ++i) push_column(i, 1);
  return generators;
}

std::vector<FrobeniusSolution> solve_frobenius(const FilteredModule& m, const FrobLift& lift,
                                               const std::vector<Exponent>& support) {
  if (!(lift.spec() == m.spec)) throw SpecMismatch("solve_frobenius: lift over the wrong ring");
  const RingSpec& spec = m.spec;
  const Modulus& mod = spec.modulus();
  const int rank = m.rank();
  std::vector<Matrix> divided = divided_connection(m, lift.as_map());

  struct Unknown {
    int row, col;
    Exponent exponent;
    std::int64_t scale;
  };
  std::vector<Unknown> unknowns;
  for (int i = 0; i < rank; ++i)
    for (int k = 0; k < rank; ++k)
      for (const auto& e : support) {
        if (!spec.legal(e)) throw PreconditionViolation("solve_frobenius: support monomial not legal");
        unknowns.push_back({i, k, e, mod.p_power(std::max(0, m.torsion(i) - m.torsion(k)))});
      }

  // Each unknown contributes the image L(U) = delta_j U + A_j U - U A'_j.
  std::map<std::tuple<int, int, int, Exponent>, std::size_t> row_index;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> columns;
  for (const auto& u : unknowns) {
    Matrix basis(spec, rank, rank);
    basis.at(u.row, u.col) = RingElem::monomial(spec, u.exponent, u.scale);
    std::vector<std::pair<std::size_t, std::int64_t>> column;
    for (int j = 0; j < spec.d(); ++j) {
      Matrix image = log_derive(basis, j) + m.connection[static_cast<std::size_t>(j)] * basis - basis * divided[static_cast<std::size_t>(j)];
      for (int r = 0; r < rank; ++r)
        for (int c = 0; c < rank; ++c)
          for (const auto& [e, coeff] : image.at(r, c).terms()) {
            auto key = std::make_tuple(j, r, c, e);
            auto [it, inserted] = row_index.emplace(key, row_index.size());
            // Row r only matters modulo p^{e_r}.
            column.emplace_back(it->second, mod.mul(coeff, mod.p_power(spec.n() - m.torsion(r))));
          }
    }
    columns.push_back(std::move(column));
  }
  std::vector<std::vector<std::int64_t>> system(row_index.size(), std::vector<std::int64_t>(unknowns.size(), 0));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (const auto& [r, v] : columns[c]) system[r][c] = mod.add(system[r][c], v);

  std::vector<FrobeniusSolution> out;
  for (const auto& g : kernel_mod(std::move(system), static_cast<int>(unknowns.size()), mod)) {
    Matrix f(spec, rank, rank);
    for (std::size_t v = 0; v < unknowns.size(); ++v)
      if (g[v] != 0)
        f.at(unknowns[v].row, unknowns[v].col) += RingElem::monomial(spec, unknowns[v].exponent, mod.mul(g[v], unknowns[v].scale));
    f = reduce_rows(f, m.basis);
    if (f.is_zero()) continue;
    LogFFModule candidate{m, lift, f};
    out.push_back({f, check_strong_div(candidate).passed()});
  }
  return out;
}

}  // namespace logff
