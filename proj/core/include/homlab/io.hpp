#pragma once

#include <optional>
#include <string>
#include <variant>

#include "homlab/comonads.hpp"
#include "homlab/covers.hpp"
#include "homlab/harness.hpp"
#include "homlab/structure.hpp"

namespace homlab {

struct LoadedStructure {
  RelStructure structure;
  std::optional<Element> point;

  PointedStructure pointed() const;  // throws PreconditionViolation without a point
};

/// JSON ({"signature":[...],"size":n,"relations":{...},"point":p}) or the
/// plain-graph text form ("n <size>" then "e u v" lines, each edge
/// symmetric). Throws ParseError / MalformedInput.
LoadedStructure parse_structure(const std::string& text);
LoadedStructure load_structure(const std::string& path);

std::string structure_to_json(const RelStructure& a, std::optional<Element> point = {});

/// {"parent":[...], "pebbles":[...], "k":2}; without pebbles the result is
/// a plain forest cover.
std::variant<ForestCover, PebbleForestCover> parse_cover(const std::string& text, const RelStructure& base);
std::variant<ForestCover, PebbleForestCover> load_cover(const std::string& path, const RelStructure& base);

std::string cover_to_json(const ForestCover& cover);
std::string cover_to_json(const PebbleForestCover& cover);

/// Carrier as a structure file; the sidecar decodes each element
/// (plays as element lists, or [label, element] moves, and the counit).
std::string comonad_carrier_json(const ComonadStructure& cs);
std::string comonad_sidecar_json(const ComonadStructure& cs);
/// {"carrier":..., "sidecar":...}
std::string comonad_to_json(const ComonadStructure& cs);

std::string report_to_json(const VerificationReport& report);
/// Deterministic for fixed inputs: timing is left out.
std::string sweep_to_json(const SweepReport& report);

std::string read_text_file(const std::string& path);

}  // namespace homlab
