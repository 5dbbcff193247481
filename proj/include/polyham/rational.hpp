#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace polyham {

/// Exact rational with 64-bit parts, always normalized (den > 0, gcd 1).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  constexpr void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  long double to_long_double() const { return static_cast<long double>(num) / static_cast<long double>(den); }

  /// ceil(this * m) computed exactly.
  std::int64_t ceil_times(std::int64_t m) const {
    const __int128 p = static_cast<__int128>(num) * m;
    __int128 q = p / den;
    if (p % den != 0 && p > 0) ++q;
    return static_cast<std::int64_t>(q);
  }

  friend constexpr bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }

  std::string to_string() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
  /// Parses "p/q", an integer, or a decimal such as "0.24".
  static Rational parse(const std::string& text);
};

}  // namespace polyham
