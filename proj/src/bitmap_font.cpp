#include "seedo/bitmap_font.hpp"

namespace seedo::font {

std::optional<Glyph> glyph(char c) {
  switch (c) {
    case '0': return Glyph{0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110};
    case '1': return Glyph{0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110};
    case '2': return Glyph{0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111};
    case '3': return Glyph{0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110};
    case '4': return Glyph{0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010};
    case '5': return Glyph{0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110};
    case '6': return Glyph{0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110};
    case '7': return Glyph{0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000};
    case '8': return Glyph{0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110};
    case '9': return Glyph{0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100};
    case 'I': return Glyph{0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110};
    case 'D': return Glyph{0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100};
    case ':': return Glyph{0b00000, 0b01100, 0b01100, 0b00000, 0b01100, 0b01100, 0b00000};
    case ' ': return Glyph{0, 0, 0, 0, 0, 0, 0};
    default: return std::nullopt;
  }
}

}  // namespace seedo::font
