#include "logff/ffcoeff.hpp"

#include <mutex>

namespace logff {

RationalPoly poly_trim(RationalPoly a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
  return a;
}

RationalPoly poly_mul(const RationalPoly& a, const RationalPoly& b) {
  if (a.empty() || b.empty()) return {};
  RationalPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(std::move(r));
}

RationalPoly FallingPoly::as_rational() const {
  RationalPoly r;
  for (const auto& c : coefficients) r.emplace_back(c);
  return r;
}

FallingPoly falling_poly(int m) {
  if (m < 0) throw PreconditionViolation("falling_poly: negative degree");
  FallingPoly f;
  f.degree = m;
  f.coefficients = {1};
  for (int k = 0; k < m; ++k) {
    // multiply by (X - k)
    std::vector<mpz_class> next(f.coefficients.size() + 1, 0);
    for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
      next[i + 1] += f.coefficients[i];
      next[i] -= f.coefficients[i] * k;
    }
    f.coefficients = std::move(next);
  }
  return f;
}

std::vector<ExactRational> to_falling_basis(const RationalPoly& poly) {
  RationalPoly rest = poly_trim(poly);
  if (rest.empty()) return {};
  std::vector<ExactRational> out(rest.size());
  for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
    if (static_cast<int>(rest.size()) <= k) continue;
    ExactRational lead = rest[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = lead;
    if (lead.is_zero()) continue;
    FallingPoly f = falling_poly(k);
    for (int i = 0; i <= k; ++i)
      rest[static_cast<std::size_t>(i)] -= lead * ExactRational(f.coefficients[static_cast<std::size_t>(i)]);
    rest = poly_trim(std::move(rest));
  }
  return out;
}

ExactRational CoeffTable::at(int k) const {
  auto it = entries.find(k);
  return it == entries.end() ? ExactRational(0) : it->second;
}

const CoeffTable& structure_constants(int m, int n) {
  if (m < 0 || n < 0) throw PreconditionViolation("structure_constants: negative index");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, CoeffTable> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({m, n});
  if (it != cache.end()) return it->second;
  CoeffTable table;
  table.m = m;
  table.n = n;
  auto coeffs = to_falling_basis(poly_mul(falling_poly(m).as_rational(), falling_poly(n).as_rational()));
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (!coeffs[k].is_zero()) table.entries.emplace(static_cast<int>(k), coeffs[k]);
  for (const auto& [k, v] : table.entries)
    if (!v.is_integer() || v < ExactRational(0))
      throw InvariantViolation("structure-constant integrality", "a_{mn}^k is not a nonnegative integer");
  return cache.emplace(std::make_pair(m, n), std::move(table)).first->second;
}

std::map<MultiIndex, mpz_class> multi_structure_constants(const MultiIndex& i, const MultiIndex& j) {
  if (i.entries.size() != j.entries.size()) throw PreconditionViolation("multi_structure_constants: length mismatch");
  std::map<MultiIndex, mpz_class> out{{MultiIndex{}, mpz_class(1)}};
  for (std::size_t slot = 0; slot < i.entries.size(); ++slot) {
    const CoeffTable& table = structure_constants(i.entries[slot], j.entries[slot]);
    std::map<MultiIndex, mpz_class> next;
    for (const auto& [partial, value] : out)
      for (const auto& [k, a] : table.entries) {
        MultiIndex extended = partial;
        extended.entries.push_back(k);
        next.emplace(std::move(extended), value * a.numerator());
      }
    out = std::move(next);
  }
  return out;
}

bool verify_coeff_identity(int k, int degree_bound) {
  // Bivariate polynomials in x = X-1, y = Y-1 keyed by (deg_x, deg_y).
  using Bivariate = std::map<std::pair<int, int>, ExactRational>;
  Bivariate lhs;
  for (int m = 0; m <= k; ++m)
    for (int n = 0; n <= k; ++n) {
      if (m + n > degree_bound) continue;
      ExactRational a = structure_constants(m, n).at(k);
      if (a.is_zero()) continue;
      lhs[{m, n}] += a / ExactRational(mpz_class(factorial(m) * factorial(n)));
    }
  // (xy + x + y)^k / k!
  Bivariate base{{{1, 1}, ExactRational(1)}, {{1, 0}, ExactRational(1)}, {{0, 1}, ExactRational(1)}};
  Bivariate rhs{{{0, 0}, ExactRational(1)}};
  for (int t = 0; t < k; ++t) {
    Bivariate next;
    for (const auto& [ea, ca] : rhs)
      for (const auto& [eb, cb] : base) {
        std::pair<int, int> e{ea.first + eb.first, ea.second + eb.second};
        if (e.first + e.second > degree_bound) continue;
        next[e] += ca * cb;
      }
    rhs = std::move(next);
  }
  for (auto& [e, c] : rhs) c /= ExactRational(factorial(k));
  auto clean = [](Bivariate b) {
    for (auto it = b.begin(); it != b.end();) it = it->second.is_zero() ? b.erase(it) : std::next(it);
    return b;
  };
  return clean(lhs) == clean(rhs);
}

}  // namespace logff
