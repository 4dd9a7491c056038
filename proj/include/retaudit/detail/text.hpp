#pragma once

#include <cstdint>
#include <locale.h>
#include <stdexcept>
#include <string>
#include <string_view>
#include <wctype.h>

namespace retaudit::detail {

// Character classification and case mapping are delegated to glibc's Unicode
// tables through a UTF-8 locale. The locale object is built once and shared;
// the _l interfaces are thread-safe.
inline locale_t text_locale() {
    static locale_t loc = [] {
        locale_t l = newlocale(LC_ALL_MASK, "C.UTF-8", (locale_t)0);
        if (l == (locale_t)0) {
            l = newlocale(LC_ALL_MASK, "en_US.UTF-8", (locale_t)0);
        }
        if (l == (locale_t)0) {
            throw std::runtime_error("no UTF-8 locale available on this system");
        }
        return l;
    }();
    return loc;
}

inline bool is_word_cp(char32_t cp) {
    return iswalnum_l(static_cast<wint_t>(cp), text_locale()) != 0;
}

inline bool is_space_cp(char32_t cp) {
    return iswspace_l(static_cast<wint_t>(cp), text_locale()) != 0;
}

inline char32_t lower_cp(char32_t cp) {
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), text_locale()));
}

// Decodes one code point starting at s[i] and advances i. Malformed bytes are
// consumed one at a time and yield U+FFFD, so progress is always made.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
    }
    if (len == 0 || i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    char32_t cp = b0 & (0xFFu >> (len + 1));
    for (int k = 1; k < len; ++k) {
        const auto bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
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

// Lowercases every code point; non-letters pass through unchanged.
inline std::string lowercase(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        append_utf8(out, lower_cp(decode_utf8(text, i)));
    }
    return out;
}

// Strips leading and trailing whitespace (Unicode-aware) and returns the
// byte range in between.
inline std::string_view trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t first_nonspace = std::string_view::npos;
    std::size_t end_after_nonspace = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        begin = i;
        const char32_t cp = decode_utf8(s, i);
        if (!is_space_cp(cp)) {
            if (first_nonspace == std::string_view::npos) {
                first_nonspace = begin;
            }
            end_after_nonspace = i;
        }
    }
    if (first_nonspace == std::string_view::npos) {
        return {};
    }
    return s.substr(first_nonspace, end_after_nonspace - first_nonspace);
}

}  // namespace retaudit::detail
