#include "logff/fixtures.hpp"

#include <algorithm>

#include "logff/errors.hpp"
#include "logff/transport.hpp"

namespace logff {

namespace {

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

FilteredModule nil2_filtered(const RingSpec& spec) {
  return FilteredModule{spec, 0, 1, {{"e0", 0, spec.n()}, {"e1", 1, spec.n()}}, {Matrix::constant(spec, {{0, 1}, {0, 0}})}};
}

ModuleFile single_lift_file(LogFFModule m, const std::string& lift_name) {
  ModuleFile f;
  f.lifts.emplace_back(lift_name, m.lift);
  f.frobenius_lift = lift_name;
  f.module = std::move(m);
  return f;
}

/// Q^{-1} for Q = I + U with U nilpotent.
Matrix unipotent_inverse(const Matrix& q) {
  const int r = q.rows();
  Matrix u = q - Matrix::identity(q.spec(), r);
  Matrix neg = u.scaled(-1);
  Matrix sum = Matrix::identity(q.spec(), r);
  Matrix power = Matrix::identity(q.spec(), r);
  for (int k = 1; k < r; ++k) {
    power = power * neg;
    sum = sum + power;
  }
  return sum;
}

}  // namespace

NamedFixture nil2(std::int64_t p, int n) {
  RingSpec spec(p, n, 1, 1);
  LogFFModule m{nil2_filtered(spec), FrobLift::standard(spec), Matrix::identity(spec, 2)};
  ModuleFile f = single_lift_file(std::move(m), "Phi");
  f.lifts.emplace_back("Psi", FrobLift(spec, {RingElem::constant(spec, 1)}));
  f.lifts.emplace_back("Xi", FrobLift(spec, {RingElem::constant(spec, 2)}));
  return {"nil2_p" + std::to_string(p) + "_n" + std::to_string(n), std::move(f), ""};
}

std::vector<NamedFixture> negative_controls() {
  std::vector<NamedFixture> out;
  {
    RingSpec spec(5, 2, 1, 1);
    LogFFModule m{nil2_filtered(spec), FrobLift::standard(spec), Matrix::diagonal(spec, {5, 5})};
    out.push_back({"bad_frobenius_p_identity", single_lift_file(std::move(m), "Phi"), "strong_div"});
  }
  {
    RingSpec spec(5, 2, 1, 1);
    LogFFModule m{nil2_filtered(spec), FrobLift::standard(spec), Matrix::diagonal(spec, {1, 6})};
    out.push_back({"bad_frobenius_diag", single_lift_file(std::move(m), "Phi"), "horizontal"});
  }
  {
    RingSpec spec(5, 1, 1, 1);
    FilteredModule fm{spec, 0, 2, {{"e0", 0, 1}, {"e2", 2, 1}}, {Matrix::constant(spec, {{0, 1}, {0, 0}})}};
    LogFFModule m{fm, FrobLift::standard(spec), Matrix::identity(spec, 2)};
    ModuleFile f = single_lift_file(std::move(m), "Phi");
    f.lifts.emplace_back("Psi", FrobLift(spec, {RingElem::constant(spec, 1)}));
    out.push_back({"bad_griffiths", std::move(f), "griffiths"});
  }
  {
    RingSpec spec(5, 1, 2, 1);
    Matrix a1(spec, 2, 2);
    a1.at(0, 1) = RingElem::variable(spec, 1);
    FilteredModule fm{spec, 0, 1, {{"e0", 0, 1}, {"e1", 1, 1}}, {a1, Matrix(spec, 2, 2)}};
    LogFFModule m{fm, FrobLift::standard(spec), Matrix::identity(spec, 2)};
    out.push_back({"bad_not_flat", single_lift_file(std::move(m), "Phi"), "flat"});
  }
  return out;
}

RingElem random_element(const RingSpec& spec, std::mt19937_64& rng, int terms, int spread) {
  RingElem r(spec);
  const std::int64_t pn = spec.modulus().value();
  for (int t = 0; t < terms; ++t) {
    Exponent e{};
    for (int j = 0; j < spec.d(); ++j)
      e[j] = static_cast<std::int32_t>(spec.is_divisor_slot(j) ? uniform(rng, 0, spread) : uniform(rng, -spread, spread));
    r += RingElem::monomial(spec, e, uniform(rng, 0, pn - 1));
  }
  return r;
}

FrobLift random_lift(const RingSpec& spec, std::mt19937_64& rng, int terms) {
  std::vector<RingElem> u;
  for (int j = 0; j < spec.d(); ++j) u.push_back(random_element(spec, rng, static_cast<int>(uniform(rng, 1, terms)), 1));
  return FrobLift(spec, std::move(u));
}

NamedFixture grid_fixture(std::int64_t p, int n, int d, int s, int rank, std::uint64_t seed, int variant) {
  std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(p) * 0x9E3779B97F4A7C15ULL) ^ (static_cast<std::uint64_t>(n) << 8) ^
                      (static_cast<std::uint64_t>(d) << 16) ^ (static_cast<std::uint64_t>(s) << 24) ^
                      (static_cast<std::uint64_t>(rank) << 32) ^ (static_cast<std::uint64_t>(variant) << 40));
  RingSpec spec(p, n, d, s);
  const std::int64_t pn = spec.modulus().value();

  // Levels ascending in [0, p-2], consecutive levels at most one apart so
  // the nilpotent part can link them.
  std::vector<int> levels{0};
  for (int k = 1; k < rank; ++k) levels.push_back(std::min<int>(static_cast<int>(p) - 2, levels.back() + static_cast<int>(uniform(rng, 0, 1))));
  FilteredModule fm;
  fm.spec = spec;
  fm.a = 0;
  fm.b = levels.back();
  const bool mixed = variant % 2 == 1 && n > 1;
  for (int k = 0; k < rank; ++k)
    fm.basis.push_back({"e" + std::to_string(k), levels[static_cast<std::size_t>(k)], mixed ? static_cast<int>(uniform(rng, 1, n)) : n});
  // Hom(R/p^{e_k}, R/p^{e_l}) needs entries divisible by p^{max(0, e_l - e_k)}.
  auto hom_factor = [&](int l, int k) { return spec.modulus().p_power(std::max(0, fm.torsion(l) - fm.torsion(k))); };

  Matrix nil(spec, rank, rank);
  for (int l = 0; l < rank; ++l)
    for (int k = 0; k < rank; ++k)
      if (levels[static_cast<std::size_t>(l)] == levels[static_cast<std::size_t>(k)] - 1) nil.at(l, k) = RingElem::constant(spec, spec.modulus().mul(uniform(rng, 0, pn - 1), hom_factor(l, k)));
  for (int j = 0; j < d; ++j) fm.connection.push_back(nil.scaled(uniform(rng, 0, pn - 1)));

  std::int64_t c = uniform(rng, 1, pn - 1);
  if (c % p == 0) ++c;
  Matrix f = Matrix::identity(spec, rank).scaled(c) + nil.scaled(uniform(rng, 0, pn - 1));
  FrobLift standard = FrobLift::standard(spec);

  // Filtered unipotent gauge change e'_k = sum_l Q(l,k) e_l.
  Matrix q = Matrix::identity(spec, rank);
  for (int l = 0; l < rank; ++l)
    for (int k = 0; k < l; ++k)
      if (levels[static_cast<std::size_t>(l)] >= levels[static_cast<std::size_t>(k)]) q.at(l, k) = random_element(spec, rng, 2, 1).scaled(hom_factor(l, k));
  Matrix q_inv = unipotent_inverse(q);
  FilteredModule gauged = fm;
  for (int j = 0; j < d; ++j)
    gauged.connection[static_cast<std::size_t>(j)] = q_inv * (fm.connection[static_cast<std::size_t>(j)] * q + log_derive(q, j));
  Matrix q_tilde(spec, rank, rank);
  for (int l = 0; l < rank; ++l)
    for (int k = 0; k < rank; ++k)
      if (!q.at(l, k).is_zero())
        q_tilde.at(l, k) = apply_frobenius(q.at(l, k), standard).scaled(spec.modulus().p_power(levels[static_cast<std::size_t>(l)] - levels[static_cast<std::size_t>(k)]));
  gauged.connection = [&] {
    std::vector<Matrix> reduced;
    for (const auto& a : gauged.connection) reduced.push_back(reduce_rows(a, fm.basis));
    return reduced;
  }();
  LogFFModule base{gauged, standard, reduce_rows(q_inv * f * q_tilde, fm.basis)};

  FrobLift lift = random_lift(spec, rng);
  LogFFModule moved = transport(base, lift);

  ModuleFile file;
  file.module = std::move(moved);
  file.frobenius_lift = "L";
  file.lifts.emplace_back("L", lift);
  file.lifts.emplace_back("Phi", standard);
  file.lifts.emplace_back("M", random_lift(spec, rng));
  std::string name = "grid_p" + std::to_string(p) + "_n" + std::to_string(n) + "_d" + std::to_string(d) + "_s" +
                     std::to_string(s) + "_r" + std::to_string(rank) + "_v" + std::to_string(variant);
  return {name, std::move(file), ""};
}

std::vector<NamedFixture> fixture_grid(const GridOptions& options) {
  std::vector<NamedFixture> out;
  for (auto p : options.primes)
    for (int n : options.precisions)
      for (int d : options.dims)
        for (int s = 0; s <= d; ++s)
          for (int rank = 1; rank <= options.max_rank; ++rank)
            for (int variant = 0; variant < options.variants; ++variant) out.push_back(grid_fixture(p, n, d, s, rank, options.seed, variant));
  return out;
}

}  // namespace logff
