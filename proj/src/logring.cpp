#include "logff/logring.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace logff {

Exponent unit_exponent(int slot, std::int32_t power) {
  Exponent e{};
  e.at(static_cast<std::size_t>(slot)) = power;
  return e;
}

Exponent operator+(const Exponent& a, const Exponent& b) {
  Exponent r{};
  for (int i = 0; i < kMaxSlots; ++i) r[i] = a[i] + b[i];
  return r;
}

Exponent operator-(const Exponent& a, const Exponent& b) {
  Exponent r{};
  for (int i = 0; i < kMaxSlots; ++i) r[i] = a[i] - b[i];
  return r;
}

Exponent operator*(std::int32_t k, const Exponent& a) {
  Exponent r{};
  for (int i = 0; i < kMaxSlots; ++i) r[i] = k * a[i];
  return r;
}

// ---------------------------------------------------------------------------
// RingSpec

RingSpec::RingSpec(std::int64_t p, int n, int d, int s) : mod_(p, n), d_(d), s_(s) {
  if (d < 0 || d > kMaxSlots) throw PreconditionViolation("ring: d must lie in [0, " + std::to_string(kMaxSlots) + "]");
  if (s < 0 || s > d) throw PreconditionViolation("ring: s must lie in [0, d]");
}

bool RingSpec::legal(const Exponent& e) const {
  for (int j = 0; j < kMaxSlots; ++j) {
    if (j >= d_ && e[j] != 0) return false;
    if (j < s_ && e[j] < 0) return false;
  }
  return true;
}

bool RingSpec::is_unit_monomial(const Exponent& e) const {
  if (!legal(e)) return false;
  for (int j = 0; j < s_; ++j)
    if (e[j] != 0) return false;
  return true;
}

std::string RingSpec::str() const {
  std::ostringstream os;
  os << "(p=" << p() << ", n=" << n() << ", d=" << d_ << ", s=" << s_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// MultiIndex

int MultiIndex::order() const {
  int total = 0;
  for (int i : entries) total += i;
  return total;
}

mpz_class MultiIndex::factorial() const {
  mpz_class r = 1;
  for (int i : entries) r *= logff::factorial(i);
  return r;
}

namespace {

void fill_shell(int slot, int remaining, MultiIndex& current, std::vector<MultiIndex>& out) {
  auto d = static_cast<int>(current.entries.size());
  if (slot == d - 1) {
    current.entries[static_cast<std::size_t>(slot)] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current.entries[static_cast<std::size_t>(slot)] = k;
    fill_shell(slot + 1, remaining - k, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> shell(int d, int c) {
  std::vector<MultiIndex> out;
  if (d == 0) {
    if (c == 0) out.push_back(MultiIndex{});
    return out;
  }
  MultiIndex current{std::vector<int>(static_cast<std::size_t>(d), 0)};
  fill_shell(0, c, current, out);
  return out;
}

// ---------------------------------------------------------------------------
// RingElem

namespace {

void normalize_terms(const Modulus& mod, std::vector<RingElem::Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    Exponent e = terms[i].first;
    std::int64_t c = 0;
    for (; i < terms.size() && terms[i].first == e; ++i) c = mod.add(c, mod.reduce(terms[i].second));
    if (c != 0) terms[out++] = {e, c};
  }
  terms.resize(out);
}

}  // namespace

RingElem RingElem::constant(const RingSpec& spec, std::int64_t c) { return monomial(spec, Exponent{}, c); }

RingElem RingElem::monomial(const RingSpec& spec, const Exponent& e, std::int64_t c) {
  return from_terms(spec, {{e, c}});
}

RingElem RingElem::variable(const RingSpec& spec, int slot) { return monomial(spec, unit_exponent(slot), 1); }

RingElem RingElem::from_terms(const RingSpec& spec, std::vector<Term> terms) {
  RingElem r(spec);
  normalize_terms(spec.modulus(), terms);
  for (const auto& [e, c] : terms)
    if (!spec.legal(e)) throw IllegalMap("monomial not legal in ring " + spec.str());
  r.terms_ = std::move(terms);
  return r;
}

bool RingElem::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Exponent{}); }

std::int64_t RingElem::coefficient(const Exponent& e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e, [](const Term& t, const Exponent& x) { return t.first < x; });
  return (it != terms_.end() && it->first == e) ? it->second : 0;
}

RingElem& RingElem::operator+=(const RingElem& o) {
  if (!(spec_ == o.spec_)) throw SpecMismatch("ring add: " + spec_.str() + " vs " + o.spec_.str());
  const Modulus& mod = spec_.modulus();
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      std::int64_t c = mod.add(a->second, b->second);
      if (c != 0) merged.emplace_back(a->first, c);
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

RingElem& RingElem::operator-=(const RingElem& o) { return *this += o.scaled(-1); }

RingElem operator*(const RingElem& a, const RingElem& b) {
  if (!(a.spec_ == b.spec_)) throw SpecMismatch("ring mul: " + a.spec_.str() + " vs " + b.spec_.str());
  RingElem r(a.spec_);
  if (a.is_zero() || b.is_zero()) return r;
  const Modulus& mod = a.spec_.modulus();
  std::vector<RingElem::Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) terms.emplace_back(ea + eb, mod.mul(ca, cb));
  normalize_terms(mod, terms);
  r.terms_ = std::move(terms);
  return r;
}

RingElem& RingElem::operator*=(const RingElem& o) { return *this = *this * o; }

RingElem RingElem::scaled(std::int64_t c) const {
  const Modulus& mod = spec_.modulus();
  c = mod.reduce(c);
  RingElem r(spec_);
  if (c == 0) return r;
  r.terms_.reserve(terms_.size());
  for (const auto& [e, v] : terms_) {
    std::int64_t x = mod.mul(v, c);
    if (x != 0) r.terms_.emplace_back(e, x);
  }
  return r;
}

RingElem RingElem::shifted(const Exponent& e) const {
  RingElem r(spec_);
  r.terms_.reserve(terms_.size());
  for (const auto& [f, c] : terms_) {
    Exponent g = f + e;
    if (!spec_.legal(g)) throw IllegalMap("shift leaves ring " + spec_.str());
    r.terms_.emplace_back(g, c);
  }
  return r;
}

RingElem RingElem::pow(unsigned k) const {
  RingElem result = constant(spec_, 1);
  RingElem base = *this;
  while (k != 0) {
    if (k & 1U) result *= base;
    k >>= 1U;
    if (k != 0) base *= base;
  }
  return result;
}

RingElem RingElem::at_precision(int m) const {
  RingSpec target = spec_.at_precision(m);
  RingElem r(target);
  const Modulus& mod = target.modulus();
  for (const auto& [e, c] : terms_) {
    std::int64_t x = m <= spec_.n() ? mod.reduce(c) : c;
    if (x != 0) r.terms_.emplace_back(e, x);
  }
  return r;
}

RingElem RingElem::divided_by_p() const {
  if (spec_.n() < 2) throw PreconditionViolation("divided_by_p needs precision >= 2");
  RingElem r(spec_.at_precision(spec_.n() - 1));
  std::int64_t p = spec_.p();
  for (const auto& [e, c] : terms_) {
    if (c % p != 0) throw NonIntegral("element " + str() + " is not divisible by p");
    r.terms_.emplace_back(e, c / p);
  }
  return r;
}

RingElem RingElem::recast(const RingSpec& target) const {
  if (target.p() != spec_.p() || target.n() != spec_.n())
    throw SpecMismatch("recast: " + spec_.str() + " -> " + target.str());
  RingElem r(target);
  for (const auto& t : terms_) {
    if (!target.legal(t.first)) throw IllegalMap("recast: monomial not legal in " + target.str());
    r.terms_.push_back(t);
  }
  return r;
}

std::string RingElem::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    const auto& [e, c] = *it;
    bool has_var = false;
    std::ostringstream vars;
    for (int j = 0; j < spec_.d(); ++j) {
      if (e[j] == 0) continue;
      if (has_var) vars << "*";
      has_var = true;
      vars << "T" << (j + 1);
      if (e[j] != 1) vars << "^" << e[j];
    }
    if (!has_var) {
      os << c;
    } else if (c == 1) {
      os << vars.str();
    } else {
      os << c << "*" << vars.str();
    }
  }
  return os.str();
}

RingElem ring_mul(const RingElem& x, const RingElem& y) { return x * y; }

RingElem one_plus_p_inverse(const RingElem& t, int m) {
  RingElem lifted = t.at_precision(m);
  RingSpec spec = lifted.spec();
  RingElem z = lifted.scaled(-spec.p());
  RingElem result = RingElem::constant(spec, 1);
  RingElem term = result;
  for (int k = 1; k < m; ++k) {
    term *= z;
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

RingElem log_derive(const RingElem& r, int slot) {
  if (slot < 0 || slot >= r.spec().d()) throw PreconditionViolation("log_derive: slot out of range");
  std::vector<RingElem::Term> terms;
  for (const auto& [e, c] : r.terms()) terms.emplace_back(e, r.spec().modulus().mul(c, r.spec().modulus().reduce(e[slot])));
  return RingElem::from_terms(r.spec(), std::move(terms));
}

mpz_class falling_factorial(long x, int m) {
  mpz_class r = 1;
  for (int k = 0; k < m; ++k) r *= (x - k);
  return r;
}

RingElem falling_op(const RingElem& r, const MultiIndex& index) {
  const RingSpec& spec = r.spec();
  if (static_cast<int>(index.entries.size()) != spec.d()) throw PreconditionViolation("falling_op: index length != d");
  const Modulus& mod = spec.modulus();
  std::vector<RingElem::Term> terms;
  for (const auto& [e, c] : r.terms()) {
    std::int64_t factor = 1;
    for (int j = 0; j < spec.d() && factor != 0; ++j)
      for (int k = 0; k < index.entries[static_cast<std::size_t>(j)] && factor != 0; ++k)
        factor = mod.mul(factor, mod.reduce(static_cast<std::int64_t>(e[j]) - k));
    if (factor != 0) terms.emplace_back(e, mod.mul(c, factor));
  }
  return RingElem::from_terms(spec, std::move(terms));
}

// ---------------------------------------------------------------------------
// RingMap

RingMap::RingMap(RingSpec source, RingSpec target, std::vector<UnitMonomial> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
  if (source_.p() != target_.p() || source_.n() != target_.n())
    throw IllegalMap("ring map: source " + source_.str() + " and target " + target_.str() + " differ in p or n");
  if (static_cast<int>(images_.size()) != source_.d()) throw IllegalMap("ring map: need one image per source slot");
  Modulus lifted(target_.p(), target_.n() + 1);
  for (int j = 0; j < source_.d(); ++j) {
    auto& img = images_[static_cast<std::size_t>(j)];
    img.unit = lifted.reduce(img.unit);
    if (!lifted.is_unit(img.unit)) throw IllegalMap("ring map: image constant of T" + std::to_string(j + 1) + " is not a unit");
    if (!target_.legal(img.exponent)) throw IllegalMap("ring map: image monomial of T" + std::to_string(j + 1) + " not legal");
    if (!source_.is_divisor_slot(j) && !target_.is_unit_monomial(img.exponent))
      throw IllegalMap("ring map: Laurent slot T" + std::to_string(j + 1) + " must map to a unit");
    if (img.tail.spec().d() == 0 && target_.d() != 0 && img.tail.is_zero()) img.tail = RingElem(target_);
    if (!(img.tail.spec() == target_)) throw IllegalMap("ring map: tail lives in the wrong ring");
  }
}

RingMap RingMap::from_images(const RingSpec& source, const RingSpec& target, const std::vector<RingElem>& images) {
  if (static_cast<int>(images.size()) != source.d()) throw IllegalMap("ring map: need one image per source slot");
  const int n = target.n();
  const RingSpec lifted_spec = target.at_precision(n + 1);
  const Modulus& lifted = lifted_spec.modulus();
  std::int64_t p = target.p();
  std::vector<UnitMonomial> out;
  for (int j = 0; j < source.d(); ++j) {
    RingElem y = images[static_cast<std::size_t>(j)];
    if (!y.spec().same_shape(target)) throw IllegalMap("ring map: image of T" + std::to_string(j + 1) + " in wrong ring");
    if (y.spec().n() == n) y = y.at_precision(n + 1);
    if (y.spec().n() != n + 1) throw IllegalMap("ring map: images must be given at precision n or n+1");
    const RingElem::Term* lead = nullptr;
    for (const auto& t : y.terms()) {
      if (t.second % p == 0) continue;
      if (lead != nullptr) throw IllegalMap("ring map: image of T" + std::to_string(j + 1) + " is not a unit times a monomial mod p");
      lead = &t;
    }
    if (lead == nullptr) throw IllegalMap("ring map: image of T" + std::to_string(j + 1) + " vanishes mod p");
    UnitMonomial um;
    um.unit = lead->second;
    um.exponent = lead->first;
    RingElem normalized = y.scaled(lifted.inverse(um.unit)) - RingElem::monomial(lifted_spec, um.exponent, 1);
    std::vector<RingElem::Term> tail_terms;
    for (const auto& [e, c] : normalized.terms()) tail_terms.emplace_back(e - um.exponent, c / p);
    um.tail = RingElem::from_terms(target, std::move(tail_terms));
    out.push_back(std::move(um));
  }
  return RingMap(source, target, std::move(out));
}

RingMap RingMap::identity(const RingSpec& spec) {
  std::vector<UnitMonomial> images;
  for (int j = 0; j < spec.d(); ++j) images.push_back({1, unit_exponent(j), RingElem(spec)});
  return RingMap(spec, spec, std::move(images));
}

RingMap RingMap::rescaling(const RingSpec& spec, const std::vector<std::int64_t>& units) {
  if (static_cast<int>(units.size()) != spec.d()) throw IllegalMap("rescaling: need one unit per slot");
  std::vector<UnitMonomial> images;
  for (int j = 0; j < spec.d(); ++j) images.push_back({units[static_cast<std::size_t>(j)], unit_exponent(j), RingElem(spec)});
  return RingMap(spec, spec, std::move(images));
}

RingMap RingMap::root_cover(const RingSpec& spec, int depth) {
  if (depth < 0) throw PreconditionViolation("root_cover: negative depth");
  std::int32_t power = 1;
  for (int i = 0; i < depth; ++i) power *= static_cast<std::int32_t>(spec.p());
  std::vector<UnitMonomial> images;
  for (int j = 0; j < spec.d(); ++j)
    images.push_back({1, unit_exponent(j, spec.is_divisor_slot(j) ? power : 1), RingElem(spec)});
  return RingMap(spec, spec, std::move(images));
}

RingElem RingMap::image(int j, int m) const {
  if (m < 1 || m > target_.n() + 1) throw PreconditionViolation("ring map image: precision out of range");
  const UnitMonomial& um = slot(j);
  RingSpec spec = target_.at_precision(m);
  RingElem y = um.tail.at_precision(m).scaled(spec.p()) + RingElem::constant(spec, 1);
  return y.shifted(um.exponent).scaled(spec.modulus().reduce(um.unit));
}

RingElem RingMap::inverse_image(int j, int m) const {
  const UnitMonomial& um = slot(j);
  RingSpec spec = target_.at_precision(m);
  std::int64_t unit_inv = spec.modulus().inverse(spec.modulus().reduce(um.unit));
  return one_plus_p_inverse(um.tail, m).shifted(Exponent{} - um.exponent).scaled(unit_inv);
}

RingElem RingMap::apply(const RingElem& r) const {
  if (!r.spec().same_shape(source_)) throw SpecMismatch("ring map apply: element in " + r.spec().str() + ", map from " + source_.str());
  const int m = r.spec().n();
  if (m > target_.n() + 1) throw PreconditionViolation("ring map apply: element precision exceeds n+1");
  RingSpec spec = target_.at_precision(m);
  const int d = source_.d();
  std::vector<std::vector<RingElem>> pos(static_cast<std::size_t>(d)), neg(static_cast<std::size_t>(d));
  auto power = [&](int j, std::int32_t k) -> const RingElem& {
    auto& cache = k >= 0 ? pos[static_cast<std::size_t>(j)] : neg[static_cast<std::size_t>(j)];
    auto want = static_cast<std::size_t>(k >= 0 ? k : -k);
    if (cache.empty()) cache.push_back(RingElem::constant(spec, 1));
    if (cache.size() <= want) {
      RingElem base = k >= 0 ? image(j, m) : inverse_image(j, m);
      while (cache.size() <= want) cache.push_back(cache.back() * base);
    }
    return cache[want];
  };
  RingElem result(spec);
  for (const auto& [e, c] : r.terms()) {
    RingElem term = RingElem::constant(spec, c);
    for (int j = 0; j < d; ++j)
      if (e[j] != 0) term *= power(j, e[j]);
    result += term;
  }
  return result;
}

RingMap RingMap::then(const RingMap& next) const {
  if (!next.source_.same_shape(target_) || next.source_.n() != target_.n())
    throw SpecMismatch("ring map composition: " + target_.str() + " vs " + next.source_.str());
  std::vector<RingElem> images;
  for (int j = 0; j < source_.d(); ++j) images.push_back(next.apply(image(j, target_.n() + 1)));
  return from_images(source_, next.target_, images);
}

RingMap RingMap::at_precision(int m) const {
  if (m > target_.n()) throw PreconditionViolation("ring map: cannot raise precision");
  Modulus lifted(target_.p(), m + 1);
  std::vector<UnitMonomial> images;
  for (const auto& um : images_) images.push_back({lifted.reduce(um.unit), um.exponent, um.tail.at_precision(m)});
  return RingMap(source_.at_precision(m), target_.at_precision(m), std::move(images));
}

RingElem apply_ring_map(const RingElem& r, const RingMap& f) { return f.apply(r); }

// ---------------------------------------------------------------------------
// FrobLift

namespace {

RingMap frobenius_map(const RingSpec& spec, const std::vector<RingElem>& u) {
  std::vector<UnitMonomial> images;
  for (int j = 0; j < spec.d(); ++j)
    images.push_back({1, unit_exponent(j, static_cast<std::int32_t>(spec.p())), u[static_cast<std::size_t>(j)]});
  return RingMap(spec, spec, std::move(images));
}

}  // namespace

FrobLift::FrobLift(RingSpec spec, std::vector<RingElem> u) : spec_(std::move(spec)), u_(std::move(u)) {
  if (static_cast<int>(u_.size()) != spec_.d()) throw PreconditionViolation("Frobenius lift: need one u_j per slot");
  for (const auto& x : u_)
    if (!(x.spec() == spec_)) throw SpecMismatch("Frobenius lift: u_j in " + x.spec().str() + ", expected " + spec_.str());
  map_ = frobenius_map(spec_, u_);
}

FrobLift FrobLift::standard(const RingSpec& spec) {
  return FrobLift(spec, std::vector<RingElem>(static_cast<std::size_t>(spec.d()), RingElem(spec)));
}

RingElem FrobLift::w(int j) const {
  return u_.at(static_cast<std::size_t>(j)).scaled(spec_.p()) + RingElem::constant(spec_, 1);
}

FrobLift FrobLift::at_precision(int m) const {
  std::vector<RingElem> u;
  for (const auto& x : u_) u.push_back(x.at_precision(m));
  return FrobLift(spec_.at_precision(m), std::move(u));
}

RingElem apply_frobenius(const RingElem& r, const FrobLift& lift) {
  if (!(r.spec() == lift.spec())) throw SpecMismatch("apply_frobenius: " + r.spec().str() + " vs " + lift.spec().str());
  return lift.as_map().apply(r);
}

// ---------------------------------------------------------------------------
// Divided ratios and Taylor series

std::vector<RingElem> divided_ratio(const RingMap& g1, const RingMap& g2) {
  if (!(g1.source() == g2.source()) || !(g1.target() == g2.target()))
    throw SpecMismatch("divided_ratio: maps have different source or target");
  const RingSpec& target = g1.target();
  const int n = target.n();
  RingSpec lifted_spec = target.at_precision(n + 1);
  const Modulus& lifted = lifted_spec.modulus();
  std::vector<RingElem> out;
  for (int j = 0; j < g1.source().d(); ++j) {
    const UnitMonomial& a = g1.slot(j);
    const UnitMonomial& b = g2.slot(j);
    if (a.exponent != b.exponent)
      throw LiftMismatch("maps disagree mod p on T" + std::to_string(j + 1) + ": different monomials");
    std::int64_t c = lifted.mul(a.unit, lifted.inverse(b.unit));
    if (c % target.p() != 1) throw LiftMismatch("maps disagree mod p on T" + std::to_string(j + 1) + ": unit constants differ");
    RingElem ratio = (a.tail.at_precision(n + 1).scaled(target.p()) + RingElem::constant(lifted_spec, 1)) *
                     one_plus_p_inverse(b.tail, n + 1);
    RingElem shifted = ratio.scaled(c) - RingElem::constant(lifted_spec, 1);
    out.push_back(shifted.divided_by_p());
  }
  return out;
}

int truncation_bound(std::int64_t p, int n, int width) {
  const std::int64_t q = p - 2;
  return static_cast<int>(width + (static_cast<std::int64_t>(n) * (p - 1) + q - 1) / q);
}

MultiIndexPowers::MultiIndexPowers(std::vector<RingElem> base, const RingSpec& spec) : base_(std::move(base)) {
  cache_.emplace(MultiIndex{std::vector<int>(base_.size(), 0)}, RingElem::constant(spec, 1));
}

const RingElem& MultiIndexPowers::get(const MultiIndex& index) {
  auto it = cache_.find(index);
  if (it != cache_.end()) return it->second;
  std::size_t j = index.entries.size() - 1;
  while (index.entries[j] == 0) --j;
  MultiIndex lower = index;
  --lower.entries[j];
  RingElem value = get(lower) * base_[j];
  return cache_.emplace(index, std::move(value)).first->second;
}

ExactRational divided_scalar(std::int64_t p, long power_of_p, const MultiIndex& index) {
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(power_of_p < 0 ? -power_of_p : power_of_p));
  return power_of_p >= 0 ? ExactRational(pk, index.factorial()) : ExactRational(mpz_class(1), pk * index.factorial());
}

RingElem taylor_sum(const RingElem& r, const RingMap& g1, const RingMap& g2) {
  if (!(r.spec() == g1.source())) throw SpecMismatch("taylor_sum: element not in source ring");
  const RingSpec& target = g1.target();
  const Modulus& mod = target.modulus();
  const std::int64_t p = target.p();
  const int d = g1.source().d();
  MultiIndexPowers x(divided_ratio(g1, g2), target);

  const int bound = truncation_bound(p, target.n(), 0);
  RingElem sum(target);
  for (int c = 0; c <= bound; ++c) {
    for (const MultiIndex& index : shell(d, c)) {
      ExactRational scalar = divided_scalar(p, c, index);
      if (*valp(scalar, p) >= target.n()) continue;
      RingElem derived = falling_op(r, index);
      if (derived.is_zero()) continue;
      sum += g2.apply(derived) * x.get(index).scaled(reduce_mod(scalar, mod));
    }
  }
  return sum;
}

RingElem taylor_residual(const RingElem& r, const RingMap& g1, const RingMap& g2) {
  return g1.apply(r) - taylor_sum(r, g1, g2);
}

RingElem taylor_residual(const RingElem& r, const FrobLift& l1, const FrobLift& l2) {
  return taylor_residual(r, l1.as_map(), l2.as_map());
}

RingElem localize(const RingElem& r) {
  const RingSpec& s = r.spec();
  return r.recast(RingSpec(s.p(), s.n(), s.d(), 0));
}

}  // namespace logff
