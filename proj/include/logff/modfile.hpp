#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logff/ffmodule.hpp"

namespace logff {

/// A module file: the module plus every lift named in the document.
struct ModuleFile {
  LogFFModule module;
  std::vector<std::pair<std::string, FrobLift>> lifts;  // document order
  std::string frobenius_lift;

  /// Throws PreconditionViolation for an unknown name.
  const FrobLift& lift(const std::string& name) const;
};

/// Parses and validates. Syntax and grammar problems raise ParseError with
/// the line and column in `text`; broken module invariants raise
/// InvariantViolation.
ModuleFile parse_module_file(const std::string& text, RangePolicy policy = RangePolicy::Strict);
ModuleFile load_module_file(const std::filesystem::path& path, RangePolicy policy = RangePolicy::Strict);
std::string serialize_module_file(const ModuleFile& file);

/// Ring map description for `pullback`: target ring, images of T_1..T_d
/// (read modulo p^(n+1)), optional source lift name and target lift u-vector.
struct MapFile {
  RingMap map;
  std::optional<std::string> source_lift;
  std::optional<FrobLift> target_lift;
};

MapFile parse_map_file(const std::string& text, const RingSpec& source);
MapFile load_map_file(const std::filesystem::path& path, const RingSpec& source);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace logff
