#include "logff/expr.hpp"

#include <cctype>

#include <gmpxx.h>

#include "logff/errors.hpp"

namespace logff {

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, const RingSpec& spec) : text_(text), spec_(spec) {}

  RingElem parse() {
    RingElem sum(spec_);
    skip();
    if (at_end()) fail("empty expression");
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    while (true) {
      RingElem t = term();
      if (negate) sum -= t; else sum += t;
      skip();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') fail(std::string("expected '+' or '-', found '") + peek() + "'");
      negate = peek() == '-';
      ++pos_;
    }
    return sum;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1), 1, static_cast<int>(pos_ + 1));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  mpz_class unsigned_integer() {
    skip();
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return mpz_class(std::string(text_.substr(start, pos_ - start)));
  }

  long signed_integer() {
    skip();
    bool neg = false;
    if (!at_end() && (peek() == '-' || peek() == '+')) {
      neg = peek() == '-';
      ++pos_;
    }
    mpz_class v = unsigned_integer();
    if (!v.fits_slong_p() || v > 1000000) fail("exponent out of range");
    return neg ? -v.get_si() : v.get_si();
  }

  RingElem term() {
    skip();
    if (at_end()) fail("expected a term");
    Exponent e{};
    mpz_class coeff = 1;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff = unsigned_integer();
      skip();
      if (at_end() || peek() != '*') return RingElem::constant(spec_, spec_.modulus().reduce(coeff));
      ++pos_;
    }
    while (true) {
      factor(e);
      skip();
      if (at_end() || peek() != '*') break;
      ++pos_;
    }
    return RingElem::monomial(spec_, e, spec_.modulus().reduce(coeff));
  }

  void factor(Exponent& e) {
    skip();
    std::size_t start = pos_;
    if (at_end() || peek() != 'T') fail("expected a variable T<index>");
    ++pos_;
    if (!at_end() && peek() == '_') ++pos_;
    std::size_t digits = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (digits == pos_) fail("expected a variable index");
    long index = std::stol(std::string(text_.substr(digits, pos_ - digits)));
    if (index < 1 || index > spec_.d()) {
      pos_ = digits;
      fail("variable index " + std::to_string(index) + " outside 1.." + std::to_string(spec_.d()));
    }
    long power = 1;
    skip();
    if (!at_end() && peek() == '^') {
      ++pos_;
      skip();
      if (!at_end() && peek() == '(') {
        ++pos_;
        power = signed_integer();
        skip();
        if (at_end() || peek() != ')') fail("expected ')'");
        ++pos_;
      } else {
        power = signed_integer();
      }
    }
    const int slot = static_cast<int>(index - 1);
    long total = e[slot] + power;
    if (spec_.is_divisor_slot(slot) && (power < 0 || total < 0)) {
      pos_ = start;
      fail("negative exponent on divisor slot T" + std::to_string(index));
    }
    e[slot] = static_cast<std::int32_t>(total);
  }

  std::string_view text_;
  const RingSpec& spec_;
  std::size_t pos_ = 0;
};

}  // namespace

RingElem parse_expression(std::string_view text, const RingSpec& spec) { return ExprParser(text, spec).parse(); }

std::string format_expression(const RingElem& r) { return r.str(); }

}  // namespace logff
