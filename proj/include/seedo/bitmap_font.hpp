#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace seedo::font {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
/// Horizontal advance per character at scale 1 (glyph + 1 column gap).
inline constexpr int kAdvance = kGlyphWidth + 1;

/// Seven rows, bit 4 is the leftmost column.
using Glyph = std::array<std::uint8_t, kGlyphHeight>;

/// Glyphs exist for the label alphabet: digits, 'I', 'D', ':' and space.
std::optional<Glyph> glyph(char c);

}  // namespace seedo::font
