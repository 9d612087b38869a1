#pragma once

// UTF-8 <-> code point helpers. All character offsets in this library index
// Unicode scalar values (code points), never bytes.

#include <cstdint>
#include <string>
#include <string_view>

#include "toxspan/error.hpp"

namespace toxspan {

inline std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  const auto fail = [&](const char* what) {
    throw EncodingError("invalid UTF-8 at byte " + std::to_string(i) + ": " + what);
  };
  while (i < utf8.size()) {
    const unsigned char b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      fail("bad leading byte");
    }
    if (i + len > utf8.size()) fail("truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(utf8[i + k]);
      if ((b & 0xC0) != 0x80) fail("bad continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    if (len == 2 && cp < 0x80) fail("overlong sequence");
    if (len == 3 && cp < 0x800) fail("overlong sequence");
    if (len == 4 && cp < 0x10000) fail("overlong sequence");
    if (cp >= 0xD800 && cp <= 0xDFFF) fail("surrogate code point");
    if (cp > 0x10FFFF) fail("code point out of range");
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

// Number of code points in a UTF-8 string.
inline std::size_t charlen(std::string_view utf8) { return decode_utf8(utf8).size(); }

inline bool is_whitespace(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0xA0;
}

// ASCII punctuation blocks, the usual WordPiece front-end convention.
// Non-ASCII code points are treated as word characters.
inline bool is_punctuation(char32_t cp) {
  return (cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) || (cp >= 91 && cp <= 96) ||
         (cp >= 123 && cp <= 126);
}

inline char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  return cp;
}

inline std::string lowercase(std::string_view utf8) {
  std::u32string cps = decode_utf8(utf8);
  for (char32_t& cp : cps) cp = to_lower(cp);
  return encode_utf8(cps);
}

}  // namespace toxspan
