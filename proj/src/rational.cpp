#include "polyham/rational.hpp"

#include "polyham/errors.hpp"

namespace polyham {

Rational Rational::parse(const std::string& text) {
  try {
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      std::size_t u1 = 0, u2 = 0;
      const auto num_s = text.substr(0, slash);
      const auto den_s = text.substr(slash + 1);
      const auto n = std::stoll(num_s, &u1);
      const auto d = std::stoll(den_s, &u2);
      if (u1 != num_s.size() || u2 != den_s.size() || d == 0) throw std::invalid_argument(text);
      return Rational(n, d);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const auto n = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return Rational(n);
    }
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument(text);
    }
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool negative = !whole.empty() && whole[0] == '-';
    std::size_t used = 0;
    const std::int64_t w = (whole.empty() || whole == "-") ? 0 : std::stoll(whole, &used);
    if (!(whole.empty() || whole == "-") && used != whole.size()) throw std::invalid_argument(text);
    const std::int64_t f = std::stoll(frac);
    const std::int64_t mag = (w < 0 ? -w : w) * den + f;
    return Rational(negative ? -mag : mag, den);
  } catch (const std::logic_error&) {
    throw ParameterError("cannot parse rational '" + text + "'");
  }
}

}  // namespace polyham
