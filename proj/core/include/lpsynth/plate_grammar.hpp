#pragma once

#include "lpsynth/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpsynth {

/// German three-block plate text: region letters, middle letters, digits.
struct PlateString {
  std::string region;
  std::string middle;
  std::string digits;

  std::size_t symbol_count() const { return region.size() + middle.size() + digits.size(); }
  bool operator==(const PlateString&) const = default;
};

inline constexpr std::size_t kMaxPlateSymbols = 9;

enum class PlateRule {
  region_length,
  middle_length,
  digits_length,
  total_length,
  region_alphabet,
  middle_alphabet,
  digits_alphabet,
};

std::string_view to_string(PlateRule rule);

struct PlateVerdict {
  bool valid = true;
  std::vector<PlateRule> violations;
};

PlateVerdict validate_plate(std::string_view region, std::string_view middle, std::string_view digits);
inline PlateVerdict validate_plate(const PlateString& p) {
  return validate_plate(p.region, p.middle, p.digits);
}

/// Block-length combination (region, middle, digits).
struct PlateShape {
  int region = 0;
  int middle = 0;
  int digits = 0;
  bool operator==(const PlateShape&) const = default;
};

/// All block-length combinations with a total of at most nine symbols.
std::span<const PlateShape> legal_shapes();

/// Draws a shape uniformly from legal_shapes(), then every character
/// uniformly from its block alphabet.
PlateString generate_plate(SplitMix64& rng);

/// Ground-truth label: region + "-" + middle + digits, no blanks.
std::string format_label(const PlateString& plate);

/// Inverse of format_label; nullopt unless the text is a valid label.
std::optional<PlateString> parse_label(std::string_view label);

}  // namespace lpsynth
