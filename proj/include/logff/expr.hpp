#pragma once

#include <string>
#include <string_view>

#include "logff/logring.hpp"

namespace logff {

/// Parses a polynomial expression into an element of `spec`:
///
///   expression := ["+"|"-"] term (("+"|"-") term)*
///   term       := integer ("*" factor)* | factor ("*" factor)*
///   factor     := "T" ["_"] index ["^" signed-integer | "^(" signed-integer ")"]
///
/// Whitespace is ignored and coefficients are reduced mod p^n. Negative
/// exponents on divisor slots are rejected. Errors carry a 1-based column
/// into `text` (line 1).
RingElem parse_expression(std::string_view text, const RingSpec& spec);

/// Inverse of parse_expression (canonical form, descending terms).
std::string format_expression(const RingElem& r);

}  // namespace logff
