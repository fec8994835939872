#include "logff/report.hpp"

#include "logff/errors.hpp"
#include "logff/expr.hpp"

namespace logff {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

ReportJson to_json(const CheckResult& r) {
  ReportJson j;
  j["name"] = r.name;
  j["verdict"] = verdict_name(r.verdict);
  if (r.where) {
    auto one_based = [](int v) { return v < 0 ? ReportJson(nullptr) : ReportJson(v + 1); };
    j["location"] = {{"slot", one_based(r.where->slot)},
                     {"row", one_based(r.where->row)},
                     {"column", one_based(r.where->column)},
                     {"shell", r.where->shell < 0 ? ReportJson(nullptr) : ReportJson(r.where->shell)}};
  } else {
    j["location"] = nullptr;
  }
  j["detail"] = r.detail;
  return j;
}

ReportJson to_json(const RingSpec& spec) {
  return {{"p", spec.p()}, {"n", spec.n()}, {"d", spec.d()}, {"s", spec.s()}};
}

ReportJson to_json(const Matrix& m) {
  ReportJson rows = ReportJson::array();
  for (int i = 0; i < m.rows(); ++i) {
    ReportJson row = ReportJson::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(format_expression(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_text(const CheckResult& r) {
  std::string out = r.name + ": ";
  switch (r.verdict) {
    case Verdict::Pass: return out + "pass";
    case Verdict::Undetermined: out += "undetermined"; break;
    case Verdict::Fail: out += "FAIL"; break;
  }
  if (r.where) {
    std::vector<std::string> parts;
    if (r.where->slot >= 0) parts.push_back("slot " + std::to_string(r.where->slot + 1));
    if (r.where->row >= 0) parts.push_back("row " + std::to_string(r.where->row + 1));
    if (r.where->column >= 0) parts.push_back("column " + std::to_string(r.where->column + 1));
    if (r.where->shell >= 0) parts.push_back("shell " + std::to_string(r.where->shell));
    if (!parts.empty()) {
      out += " at";
      for (std::size_t i = 0; i < parts.size(); ++i) out += (i == 0 ? " " : ", ") + parts[i];
    }
  }
  if (!r.detail.empty()) out += " (" + r.detail + ")";
  return out;
}

ReportJson error_json(const std::string& kind, const std::string& message) {
  return {{"kind", kind}, {"message", message}};
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const NonIntegral*>(&e)) return "NonIntegral";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const InvariantViolation*>(&e)) return "InvariantViolation";
  if (dynamic_cast<const SpecMismatch*>(&e)) return "SpecMismatch";
  if (dynamic_cast<const IllegalMap*>(&e)) return "IllegalMap";
  if (dynamic_cast<const LiftMismatch*>(&e)) return "LiftMismatch";
  if (dynamic_cast<const ElementNotInFil*>(&e)) return "ElementNotInFil";
  if (dynamic_cast<const PreconditionViolation*>(&e)) return "PreconditionViolation";
  return "Error";
}

ReportJson error_json(const std::exception& e) {
  ReportJson out = error_json(error_kind(e), e.what());
  if (const auto* iv = dynamic_cast<const InvariantViolation*>(&e)) out["invariant"] = iv->invariant();
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    out["line"] = pe->line();
    out["column"] = pe->column();
  }
  return out;
}

}  // namespace logff
