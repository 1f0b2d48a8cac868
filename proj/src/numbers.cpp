#include "chartkit/numbers.hpp"

#include <cctype>
#include <cstdlib>
#include <string>

namespace chartkit {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Multi-byte currency glyphs are matched as their UTF-8 byte sequences.
std::size_t currency_prefix_len(std::string_view s) {
  static constexpr std::string_view symbols[] = {"US$", "$", "€", "£",
                                                 "¥", "₹"};
  for (std::string_view sym : symbols) {
    if (s.substr(0, sym.size()) == sym) return sym.size();
  }
  return 0;
}

// Parses the digit core starting at `i`: integer part with optional
// well-formed thousands groups, optional fraction, optional exponent.
// On success appends the de-comma'd text to `clean` and advances `i`.
bool scan_core(std::string_view s, std::size_t& i, std::string& clean) {
  std::size_t start = i;
  bool any_digit = false;

  if (i < s.size() && is_digit(s[i])) {
    std::size_t first_group = 0;
    while (i < s.size() && is_digit(s[i])) {
      clean.push_back(s[i]);
      ++i;
      ++first_group;
    }
    any_digit = true;
    if (i < s.size() && s[i] == ',') {
      // Thousands groups: the leading group has 1-3 digits, every
      // subsequent group exactly 3.
      if (first_group > 3) return false;
      while (i < s.size() && s[i] == ',') {
        std::size_t g = 0;
        std::size_t j = i + 1;
        while (j < s.size() && is_digit(s[j])) {
          ++g;
          ++j;
        }
        if (g < 3) return false;
        // Exactly 3 digits belong to this group; a longer run means the
        // grouping is malformed ("1,2345").
        if (g > 3) return false;
        clean.append(s.substr(i + 1, 3));
        i = j;
      }
    }
  }

  if (i < s.size() && s[i] == '.') {
    clean.push_back('.');
    ++i;
    while (i < s.size() && is_digit(s[i])) {
      clean.push_back(s[i]);
      ++i;
      any_digit = true;
    }
  }
  if (!any_digit) {
    i = start;
    return false;
  }

  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    std::string exp;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) {
      exp.push_back(s[j]);
      ++j;
    }
    std::size_t digits = 0;
    while (j < s.size() && is_digit(s[j])) {
      exp.push_back(s[j]);
      ++j;
      ++digits;
    }
    // A bare trailing "e" is treated as a unit letter, not an exponent.
    if (digits > 0) {
      clean.push_back('e');
      clean.append(exp);
      i = j;
    }
  }
  return true;
}

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::optional<double> parse_number(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) return std::nullopt;

  std::size_t i = 0;
  std::string clean;

  bool saw_sign = false;
  bool saw_currency = false;
  // Currency and sign may appear in either order, each at most once.
  for (int k = 0; k < 2; ++k) {
    if (!saw_currency) {
      std::size_t n = currency_prefix_len(s.substr(i));
      if (n > 0) {
        i += n;
        while (i < s.size() && is_space(s[i])) ++i;
        saw_currency = true;
        continue;
      }
    }
    if (!saw_sign && i < s.size() && (s[i] == '+' || s[i] == '-')) {
      clean.push_back(s[i]);
      ++i;
      saw_sign = true;
      continue;
    }
    break;
  }

  if (!scan_core(s, i, clean)) return std::nullopt;

  // Optional unit suffix: "%" or a short alphabetic token.
  if (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && is_space(s[j])) ++j;
    if (j < s.size() && s[j] == '%') {
      i = j + 1;
    } else {
      std::size_t letters = 0;
      std::size_t k = j;
      while (k < s.size() && is_alpha(s[k])) {
        ++k;
        ++letters;
      }
      if (letters >= 1 && letters <= 8 && k == s.size()) i = k;
    }
  }
  if (i != s.size()) return std::nullopt;

  return std::strtod(clean.c_str(), nullptr);
}

std::string normalize_answer(std::string_view s) {
  std::string_view t = trim(s);
  std::string out;
  out.reserve(t.size());
  bool pending_space = false;
  for (char c : t) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace chartkit
