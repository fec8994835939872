// Command-line driver: check, glue, pullback, coeffs, selftest.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "logff/errors.hpp"
#include "logff/ffcoeff.hpp"
#include "logff/modfile.hpp"
#include "logff/report.hpp"
#include "logff/selftest.hpp"
#include "logff/transport.hpp"

using namespace logff;
namespace fs = std::filesystem;

namespace {

struct Output {
  bool json = false;
  ReportJson report;

  void begin(const std::string& command) {
    report = ReportJson::object();
    report["schema"] = kReportSchema;
    report["command"] = command;
  }
};

/// Runs a command body and maps exceptions onto the exit-code contract.
int guarded(Output& out, const std::function<int()>& body) {
  const auto start = std::chrono::steady_clock::now();
  int code = kExitPass;
  try {
    code = body();
  } catch (const std::exception& e) {
    std::string kind = error_kind(e);
    code = kind == "NonIntegral" ? kExitNonIntegral : kExitMalformed;
    out.report["error"] = error_json(e);
    if (!out.json) {
      std::cerr << "error (" << kind;
      if (const auto* iv = dynamic_cast<const InvariantViolation*>(&e)) std::cerr << ", invariant " << iv->invariant();
      std::cerr << "): " << e.what() << "\n";
    }
  }
  out.report["exit_code"] = code;
  out.report["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  if (out.json) std::cout << out.report.dump(2) << "\n";
  return code;
}

int verdict_code(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed()) return kExitFail;
  return kExitPass;
}

ReportJson results_json(const std::vector<CheckResult>& results) {
  ReportJson arr = ReportJson::array();
  for (const auto& r : results) arr.push_back(to_json(r));
  return arr;
}

CheckResult boolean_check(const std::string& name, bool ok, const std::string& detail = "") {
  return {name, ok ? Verdict::Pass : Verdict::Fail, std::nullopt, ok ? "" : detail};
}

/// Fixed test element for the linearity property: 1 + T_1 + ... + T_d.
RingElem probe_element(const RingSpec& spec) {
  RingElem r = RingElem::constant(spec, 1);
  for (int j = 0; j < spec.d(); ++j) r += RingElem::variable(spec, j);
  return r;
}

std::vector<CheckResult> glue_properties(const FilteredModule& m, const std::string& n1, const FrobLift& l1,
                                         const std::string& n2, const FrobLift& l2, const FrobLift* l3) {
  std::vector<CheckResult> out;
  out.push_back(boolean_check("glue_identity", check_glue_identity(m, l1) && check_glue_identity(m, l2),
                              "alpha(" + n1 + "," + n1 + ") or alpha(" + n2 + "," + n2 + ") is not the identity"));
  out.push_back(boolean_check("glue_linearity", check_glue_linearity(m, l1, l2, probe_element(m.spec)),
                              "alpha(r e) differs from " + n1 + "(r) alpha(e)"));
  CheckResult horizontal = check_glue_horizontal(m, l1.as_map(), l2.as_map());
  out.push_back(horizontal);
  if (l3) out.push_back(boolean_check("glue_cocycle", check_glue_cocycle(m, l1, l2, *l3), "G13 != G23 G12"));
  return out;
}

void print_text(const std::vector<CheckResult>& results) {
  for (const auto& r : results) std::cout << to_text(r) << "\n";
}

RangePolicy policy_of(const std::string& mode);

int cmd_check(Output& out, const std::string& path, const std::string& mode) {
  out.report["file"] = path;
  out.report["mode"] = mode;
  return guarded(out, [&] {
    ModuleFile file = load_module_file(path, policy_of(mode));
    const LogFFModule& m = file.module;
    out.report["ring"] = to_json(m.spec());
    out.report["rank"] = m.rank();
    std::vector<CheckResult> results = check_module(m);
    out.report["checks"] = results_json(results);
    if (!out.json) print_text(results);
    int code = verdict_code(results);

    ReportJson glue = ReportJson::array();
    if (file.lifts.size() >= 2 && verdict_code({results[0], results[1]}) == kExitPass) {
      std::vector<std::pair<std::string, const FrobLift*>> others;
      for (const auto& [name, l] : file.lifts)
        if (name != file.frobenius_lift) others.emplace_back(name, &l);
      for (std::size_t i = 0; i < others.size(); ++i) {
        const FrobLift* third = i + 1 < others.size() ? others[i + 1].second : nullptr;
        GlueMap g = glue_map(m.filtered, m.lift, *others[i].second);
        auto props = glue_properties(m.filtered, file.frobenius_lift, m.lift, others[i].first, *others[i].second, third);
        ReportJson entry{{"lift1", file.frobenius_lift}, {"lift2", others[i].first}};
        if (third) entry["lift3"] = others[i + 1].first;
        entry["shells_used"] = g.shells_used;
        entry["last_nonzero_shell"] = g.last_nonzero_shell;
        entry["checks"] = results_json(props);
        glue.push_back(std::move(entry));
        if (!out.json) {
          std::cout << "glue " << file.frobenius_lift << " -> " << others[i].first << "\n";
          for (const auto& r : props) std::cout << "  " << to_text(r) << "\n";
        }
        code = std::max(code, verdict_code(props));
      }
    }
    out.report["glue"] = glue;
    out.report["result"] = code == kExitPass ? "pass" : "fail";
    if (!out.json) std::cout << (code == kExitPass ? "result: pass" : "result: FAIL") << "\n";
    return code;
  });
}

RangePolicy policy_of(const std::string& mode) { return mode == "wide-range" ? RangePolicy::Wide : RangePolicy::Strict; }

int cmd_glue(Output& out, const std::string& path, const std::string& mode, const std::string& n1, const std::string& n2,
             const std::string& n3, bool cocycle) {
  out.report["file"] = path;
  return guarded(out, [&]() -> int {
    ModuleFile file = load_module_file(path, policy_of(mode));
    std::string third = n3;
    // --cocycle alone takes the first other lift named in the file
    if (cocycle && third.empty())
      for (const auto& [name, l] : file.lifts)
        if (name != n1 && name != n2) {
          third = name;
          break;
        }
    if (cocycle && third.empty()) throw PreconditionViolation("--cocycle needs a third lift");
    const FilteredModule& m = file.module.filtered;
    const FrobLift& l1 = file.lift(n1);
    const FrobLift& l2 = file.lift(n2);
    const FrobLift* l3 = third.empty() ? nullptr : &file.lift(third);
    GlueMap g = glue_map(m, l1, l2);
    auto props = glue_properties(m, n1, l1, n2, l2, l3);
    out.report["ring"] = to_json(m.spec);
    out.report["lift1"] = n1;
    out.report["lift2"] = n2;
    if (l3) out.report["lift3"] = third;
    out.report["matrix"] = to_json(g.G);
    out.report["shells_used"] = g.shells_used;
    out.report["last_nonzero_shell"] = g.last_nonzero_shell;
    out.report["checks"] = results_json(props);
    int code = verdict_code(props);
    out.report["result"] = code == kExitPass ? "pass" : "fail";
    if (!out.json) {
      std::cout << g.G.str() << "\n";
      std::cout << "shells: " << g.shells_used << " (last nonzero " << g.last_nonzero_shell << ")\n";
      print_text(props);
    }
    return code;
  });
}

int cmd_pullback(Output& out, const std::string& path, const std::string& mode, const std::string& map_path,
                 const std::string& output) {
  out.report["file"] = path;
  out.report["map"] = map_path;
  return guarded(out, [&] {
    ModuleFile file = load_module_file(path, policy_of(mode));
    MapFile map = load_map_file(map_path, file.module.spec());
    std::string source_name = map.source_lift.value_or(file.frobenius_lift);
    const FrobLift& source = file.lift(source_name);
    FrobLift target;
    if (map.target_lift) {
      target = *map.target_lift;
    } else {
      std::vector<RingElem> u;
      for (const auto& x : source.u()) u.push_back(map.map.apply(x));
      target = FrobLift(map.map.target(), std::move(u));
    }
    ModuleFile result;
    result.module = pullback_ff(file.module, map.map, source, target);
    result.frobenius_lift = source_name;
    result.lifts.emplace_back(source_name, target);
    std::vector<CheckResult> results = check_module(result.module);
    std::string serialized = serialize_module_file(result);
    if (!output.empty()) {
      std::ofstream os(output, std::ios::binary);
      if (!os) throw PreconditionViolation("cannot write " + output);
      os << serialized;
    }
    out.report["ring"] = to_json(result.module.spec());
    out.report["checks"] = results_json(results);
    out.report["module"] = ReportJson::parse(serialized);
    int code = verdict_code(results);
    out.report["result"] = code == kExitPass ? "pass" : "fail";
    if (!out.json) {
      if (output.empty()) {
        std::cout << serialized;
        for (const auto& r : results) std::cerr << to_text(r) << "\n";
      } else {
        print_text(results);
      }
    }
    return code;
  });
}

int cmd_coeffs(Output& out, int max) {
  out.report["max"] = max;
  return guarded(out, [&] {
    if (max < 0) throw PreconditionViolation("--max must be nonnegative");
    ReportJson table = ReportJson::array();
    for (int m = 0; m <= max; ++m)
      for (int n = 0; n <= max; ++n)
        for (const auto& [k, a] : structure_constants(m, n).entries) {
          table.push_back({{"m", m}, {"n", n}, {"k", k}, {"a", a.str()}});
          if (!out.json) std::cout << "a_{" << m << "," << n << "}^" << k << " = " << a.str() << "\n";
        }
    ReportJson identities = ReportJson::array();
    bool all = true;
    for (int k = 0; k <= 6; ++k) {
      bool ok = verify_coeff_identity(k, 6);
      all = all && ok;
      identities.push_back({{"k", k}, {"verdict", ok ? "pass" : "fail"}});
      if (!out.json) std::cout << "identity k=" << k << ": " << (ok ? "pass" : "FAIL") << "\n";
    }
    out.report["coefficients"] = table;
    out.report["identities"] = identities;
    out.report["result"] = all ? "pass" : "fail";
    return all ? kExitPass : kExitFail;
  });
}

int cmd_selftest(Output& out, bool quick, const std::string& fixtures_dir) {
  out.report["quick"] = quick;
  return guarded(out, [&] {
    SelftestOptions options;
    options.quick = quick;
    int code = kExitPass;
    ReportJson suites = ReportJson::array();
    for (const auto& s : run_selftest(options)) {
      ReportJson failures = s.failures;
      suites.push_back({{"id", s.id}, {"title", s.title}, {"verdict", s.passed() ? "pass" : "fail"}, {"cases", s.cases},
                        {"failures", s.failure_count}, {"messages", failures}});
      if (!out.json) {
        std::cout << s.id << " " << (s.passed() ? "PASS" : "FAIL") << "  " << s.title << " (" << s.cases << " cases)\n";
        for (const auto& msg : s.failures) std::cout << "    " << msg << "\n";
      }
      if (!s.passed()) code = kExitFail;
    }
    out.report["suites"] = suites;

    if (!fixtures_dir.empty()) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(fixtures_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      ReportJson fixtures = ReportJson::array();
      for (const auto& file : files) {
        ReportJson entry{{"file", file.filename().string()}};
        std::string failed;
        try {
          auto results = check_module(load_module_file(file).module);
          for (const auto& r : results)
            if (r.verdict == Verdict::Fail) failed += (failed.empty() ? "" : ",") + r.name;
          for (const auto& r : results)
            if (r.verdict == Verdict::Undetermined) failed += (failed.empty() ? "" : ",") + r.name + "?";
          entry["checks"] = results_json(results);
        } catch (const std::exception& e) {
          failed = error_kind(e);
          entry["error"] = error_json(e);
        }
        entry["verdict"] = failed.empty() ? "pass" : "fail";
        fixtures.push_back(std::move(entry));
        if (!failed.empty()) code = kExitFail;
        if (!out.json) std::cout << file.filename().string() << ": " << (failed.empty() ? "pass" : "FAIL [" + failed + "]") << "\n";
      }
      out.report["fixtures"] = fixtures;
    }
    out.report["result"] = code == kExitPass ? "pass" : "fail";
    if (!out.json) std::cout << (code == kExitPass ? "selftest: pass" : "selftest: FAIL") << "\n";
    return code;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logarithmic Fontaine-Faltings module workbench"};
  app.require_subcommand(1);
  Output out;
  std::string format = "text";
  std::string mode = "strict";
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "Hodge-width policy: b - a <= p - 2 (strict) or <= p - 1")
        ->check(CLI::IsMember({"strict", "wide-range"}));
  };

  std::string file, lift1, lift2, lift3, map_path, output, fixtures_dir;
  bool cocycle = false, quick = false;
  int max = 2;

  auto* check = app.add_subcommand("check", "Run the module checks on a module file");
  check->add_option("file", file, "Module file")->required();
  add_mode(check);
  add_format(check);

  auto* glue = app.add_subcommand("glue", "Gluing matrix between two named lifts");
  glue->add_option("file", file, "Module file")->required();
  glue->add_option("lift1", lift1, "Source lift")->required();
  glue->add_option("lift2", lift2, "Target lift")->required();
  glue->add_option("--third", lift3, "Third lift for the cocycle check");
  glue->add_flag("--cocycle", cocycle, "Require the cocycle check");
  add_mode(glue);
  add_format(glue);

  auto* pullback = app.add_subcommand("pullback", "Pull a module back along a ring map");
  pullback->add_option("file", file, "Module file")->required();
  pullback->add_option("--map", map_path, "Map file")->required();
  pullback->add_option("--output", output, "Write the pulled-back module here");
  add_mode(pullback);
  add_format(pullback);

  auto* coeffs = app.add_subcommand("coeffs", "Falling-factorial structure constants");
  coeffs->add_option("--max", max, "Largest m and n")->required();
  add_format(coeffs);

  auto* selftest = app.add_subcommand("selftest", "Run the property suites on the fixture grid");
  selftest->add_flag("--quick", quick, "Precision 1 only");
  selftest->add_option("--fixtures", fixtures_dir, "Also check every module file in this directory");
  add_format(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitMalformed;
  }
  out.json = format == "json";

  if (*check) {
    out.begin("check");
    return cmd_check(out, file, mode);
  }
  if (*glue) {
    out.begin("glue");
    return cmd_glue(out, file, mode, lift1, lift2, lift3, cocycle);
  }
  if (*pullback) {
    out.begin("pullback");
    return cmd_pullback(out, file, mode, map_path, output);
  }
  if (*coeffs) {
    out.begin("coeffs");
    return cmd_coeffs(out, max);
  }
  out.begin("selftest");
  return cmd_selftest(out, quick, fixtures_dir);
}
