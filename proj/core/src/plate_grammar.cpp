#include "lpsynth/plate_grammar.hpp"

#include <algorithm>
#include <array>

namespace lpsynth {

namespace {

constexpr std::string_view kLetters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr std::string_view kDigits = "0123456789";

bool all_of(std::string_view s, std::string_view alphabet) {
  return std::all_of(s.begin(), s.end(),
                     [&](char c) { return alphabet.find(c) != std::string_view::npos; });
}

constexpr auto make_shapes() {
  std::array<PlateShape, 24> shapes{};
  std::size_t n = 0;
  for (int r = 1; r <= 3; ++r) {
    for (int m = 1; m <= 2; ++m) {
      for (int d = 1; d <= 4; ++d) {
        if (static_cast<std::size_t>(r + m + d) <= kMaxPlateSymbols) shapes[n++] = {r, m, d};
      }
    }
  }
  return shapes;
}

// 3 + 2 + 4 = 9, so every block-length combination is legal today; the
// filter stays in make_shapes() in case the symbol limit changes.
constexpr auto kShapes = make_shapes();

}  // namespace

std::string_view to_string(PlateRule rule) {
  switch (rule) {
    case PlateRule::region_length: return "region_length";
    case PlateRule::middle_length: return "middle_length";
    case PlateRule::digits_length: return "digits_length";
    case PlateRule::total_length: return "total_length";
    case PlateRule::region_alphabet: return "region_alphabet";
    case PlateRule::middle_alphabet: return "middle_alphabet";
    case PlateRule::digits_alphabet: return "digits_alphabet";
  }
  return "unknown";
}

PlateVerdict validate_plate(std::string_view region, std::string_view middle,
                            std::string_view digits) {
  PlateVerdict v;
  auto fail = [&](PlateRule r) {
    v.valid = false;
    v.violations.push_back(r);
  };
  if (region.empty() || region.size() > 3) fail(PlateRule::region_length);
  if (middle.empty() || middle.size() > 2) fail(PlateRule::middle_length);
  if (digits.empty() || digits.size() > 4) fail(PlateRule::digits_length);
  if (region.size() + middle.size() + digits.size() > kMaxPlateSymbols) fail(PlateRule::total_length);
  if (!all_of(region, kLetters)) fail(PlateRule::region_alphabet);
  if (!all_of(middle, kLetters)) fail(PlateRule::middle_alphabet);
  if (!all_of(digits, kDigits)) fail(PlateRule::digits_alphabet);
  return v;
}

std::span<const PlateShape> legal_shapes() {
  const auto end = std::find(kShapes.begin(), kShapes.end(), PlateShape{});
  return {kShapes.begin(), end};
}

PlateString generate_plate(SplitMix64& rng) {
  const auto shapes = legal_shapes();
  const PlateShape shape = shapes[rng.uniform_below(shapes.size())];
  auto draw = [&](int n, std::string_view alphabet) {
    std::string s(static_cast<std::size_t>(n), ' ');
    for (char& c : s) c = alphabet[rng.uniform_below(alphabet.size())];
    return s;
  };
  PlateString p;
  p.region = draw(shape.region, kLetters);
  p.middle = draw(shape.middle, kLetters);
  p.digits = draw(shape.digits, kDigits);
  return p;
}

std::string format_label(const PlateString& plate) {
  std::string out;
  out.reserve(plate.symbol_count() + 1);
  out += plate.region;
  out += '-';
  out += plate.middle;
  out += plate.digits;
  return out;
}

std::optional<PlateString> parse_label(std::string_view label) {
  const auto dash = label.find('-');
  if (dash == std::string_view::npos || label.find('-', dash + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  const std::string_view region = label.substr(0, dash);
  const std::string_view rest = label.substr(dash + 1);
  const auto split = rest.find_first_of(kDigits);
  if (split == std::string_view::npos) return std::nullopt;
  PlateString p{std::string(region), std::string(rest.substr(0, split)),
                std::string(rest.substr(split))};
  if (!validate_plate(p).valid) return std::nullopt;
  return p;
}

}  // namespace lpsynth
