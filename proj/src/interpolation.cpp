#include "polyham/interpolation.hpp"

#include <string>

#include "polyham/errors.hpp"

namespace polyham {
namespace {

void check_knots(std::int64_t k, std::size_t r) {
  if (r == 0) throw ParameterError("interpolation needs r >= 1");
  if (k < -1) throw ParameterError("interpolation needs k >= -1 (weights start at k+1 >= 0)");
}

BigInt binomial_signed(std::int64_t top, std::size_t bottom) {
  // C(top, bottom) for any integer top, via the falling-factorial recurrence.
  BigInt g = 1;
  for (std::size_t j = 1; j <= bottom; ++j) {
    g *= BigInt(static_cast<long>(top - static_cast<std::int64_t>(j) + 1));
    mpz_divexact_ui(g.get_mpz_t(), g.get_mpz_t(), j);
  }
  return g;
}

// Bareiss elimination in place on an augmented matrix; returns the determinant
// of the leading square block. Row swaps flip the sign.
BigInt bareiss(std::vector<std::vector<BigInt>>& m, std::size_t n) {
  BigInt prev = 1;
  int sign = 1;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t p = 0; p < n; ++p) {
    if (m[p][p] == 0) {
      std::size_t swap = p + 1;
      while (swap < n && m[swap][p] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[p], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = p + 1; i < n; ++i) {
      for (std::size_t j = p + 1; j < cols; ++j) {
        BigInt v = m[i][j] * m[p][p] - m[i][p] * m[p][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = std::move(v);
      }
      m[i][p] = 0;
    }
    prev = m[p][p];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace

std::vector<BigInt> forward_differences(std::span<const std::int64_t> c) {
  const std::size_t r = c.size();
  std::vector<BigInt> row(r);
  for (std::size_t j = 0; j < r; ++j) row[j] = BigInt(static_cast<long>(c[j]));
  std::vector<BigInt> diff(r);
  for (std::size_t m = 0; m < r; ++m) {
    diff[m] = row[0];
    for (std::size_t j = 0; j + 1 < r - m; ++j) row[j] = row[j + 1] - row[j];
  }
  return diff;
}

std::vector<BigInt> interpolation_coefficients(std::int64_t k, std::span<const std::int64_t> c) {
  check_knots(k, c.size());
  const std::size_t r = c.size();
  const auto b = forward_differences(c);
  // p(w) = sum_m b_m C(w - s, m) with s = k + 1, and by Vandermonde's identity
  // C(w - s, m) = sum_i C(w, i) C(-s, m - i). Hence a_i = sum_{m>=i} b_m C(-s, m - i).
  const std::int64_t s = k + 1;
  std::vector<BigInt> g(r);
  g[0] = 1;
  for (std::size_t j = 1; j < r; ++j) {
    g[j] = g[j - 1] * BigInt(static_cast<long>(-s - static_cast<std::int64_t>(j) + 1));
    mpz_divexact_ui(g[j].get_mpz_t(), g[j].get_mpz_t(), j);
  }
  std::vector<BigInt> a(r);
  for (std::size_t i = 0; i < r; ++i) {
    BigInt acc = 0;
    for (std::size_t m = i; m < r; ++m) {
      if (b[m] != 0 && g[m - i] != 0) acc += b[m] * g[m - i];
    }
    a[i] = std::move(acc);
  }
  return a;
}

IntPolynomial interpolate_weights(std::size_t n, std::int64_t k, std::size_t r, std::span<const std::int64_t> c) {
  check_knots(k, r);
  if (c.size() != r) throw ParameterError("interpolate_weights: expected " + std::to_string(r) + " target values");
  if (static_cast<std::int64_t>(n) < k + static_cast<std::int64_t>(r)) {
    throw ParameterError("interpolate_weights: need n >= k + r (n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                         ", r=" + std::to_string(r) + ")");
  }
  return IntPolynomial::symmetric_from_values(n, static_cast<std::size_t>(k + 1),
                                              std::vector<std::int64_t>(c.begin(), c.end()));
}

std::vector<std::vector<BigInt>> binomial_matrix(std::int64_t k, std::size_t r) {
  check_knots(k, r);
  std::vector<std::vector<BigInt>> m(r, std::vector<BigInt>(r));
  for (std::size_t row = 0; row < r; ++row) {
    const std::int64_t top = k + static_cast<std::int64_t>(row) + 1;
    for (std::size_t col = 0; col < r; ++col) m[row][col] = binomial_signed(top, col);
  }
  return m;
}

BigInt binomial_matrix_det(std::int64_t k, std::size_t r) {
  auto m = binomial_matrix(k, r);
  return bareiss(m, r);
}

std::vector<BigInt> solve_binomial_system(std::int64_t k, std::span<const BigInt> c) {
  const std::size_t r = c.size();
  auto m = binomial_matrix(k, r);
  for (std::size_t i = 0; i < r; ++i) m[i].push_back(c[i]);
  const BigInt det = bareiss(m, r);
  if (det == 0) throw ParameterError("binomial system is singular");
  // After Bareiss the system is upper triangular with m[r-1][r-1] = det.
  // Back substitution in fractions over the common denominator det.
  std::vector<BigInt> x(r);  // holds det * a_i
  for (std::size_t ii = r; ii-- > 0;) {
    BigInt acc = m[ii][r] * det;
    for (std::size_t j = ii + 1; j < r; ++j) acc -= m[ii][j] * x[j];
    mpz_divexact(acc.get_mpz_t(), acc.get_mpz_t(), m[ii][ii].get_mpz_t());
    x[ii] = std::move(acc);
  }
  for (auto& v : x) {
    BigInt q, rem;
    mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), v.get_mpz_t(), det.get_mpz_t());
    if (rem != 0) throw ParameterError("binomial system solution is not integral");
    v = std::move(q);
  }
  return x;
}

}  // namespace polyham
