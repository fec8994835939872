#pragma once

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logff/ffmodule.hpp"

namespace logff {

using ReportJson = nlohmann::ordered_json;

/// Stable JSON layout, described in docs/report_schema.md.
inline constexpr const char* kReportSchema = "logff-report/1";

std::string verdict_name(Verdict v);
ReportJson to_json(const CheckResult& r);
ReportJson to_json(const RingSpec& spec);
ReportJson to_json(const Matrix& m);

/// One line per check: "flat: pass", "horizontal: FAIL at slot 1, row 2, column 2 (...)".
std::string to_text(const CheckResult& r);

/// Exit codes shared by every command.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitMalformed = 2, kExitNonIntegral = 3 };

ReportJson error_json(const std::string& kind, const std::string& message);
/// Error class name as used in reports ("NonIntegral", "ParseError", ...).
std::string error_kind(const std::exception& e);
/// {kind, message} plus "invariant" or "line"/"column" when the error has them.
ReportJson error_json(const std::exception& e);

}  // namespace logff
