#include <doctest.h>

#include <sstream>

#include "polyham/errors.hpp"
#include "polyham/interpolation.hpp"
#include "polyham/polynomial.hpp"
#include "polyham/rng.hpp"
#include "polyham/threshold.hpp"

using namespace polyham;

namespace {

BitVector point(std::size_t n, std::uint64_t bits) {
  BitVectorBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, (bits >> i) & 1);
  return std::move(b).build();
}

IntPolynomial random_int_poly(std::size_t n, Rng& rng, std::size_t terms, std::size_t max_deg) {
  IntPolynomial::Terms t;
  for (std::size_t i = 0; i < terms; ++i) {
    std::vector<std::uint32_t> vars;
    const auto deg = rng.below(max_deg + 1);
    for (std::size_t j = 0; j < deg; ++j) vars.push_back(static_cast<std::uint32_t>(rng.below(n)));
    t[Monomial(vars)] += BigInt(static_cast<long>(rng.below(21)) - 10);
  }
  return IntPolynomial::from_terms(n, std::move(t));
}

Gf2Polynomial random_gf2_poly(std::size_t n, Rng& rng, std::size_t terms, std::size_t max_deg) {
  Gf2Polynomial p(n);
  for (std::size_t i = 0; i < terms; ++i) {
    std::vector<std::uint32_t> vars;
    const auto deg = rng.below(max_deg + 1);
    for (std::size_t j = 0; j < deg; ++j) vars.push_back(static_cast<std::uint32_t>(rng.below(n)));
    p.toggle(Monomial(vars));
  }
  return p;
}

// C(top, k) for signed top, computed by the product formula as an oracle.
BigInt binom_oracle(long top, long k) {
  BigInt num = 1, den = 1;
  for (long j = 0; j < k; ++j) {
    num *= top - j;
    den *= j + 1;
  }
  return num / den;
}

}  // namespace

TEST_CASE("monomial is multilinear and ordered") {
  const Monomial m({3, 1, 3});
  CHECK(m.degree() == 2);
  CHECK(m.vars()[0] == 1);
  CHECK((Monomial{0} * Monomial{0}) == Monomial{0});
  CHECK((Monomial{0, 2} * Monomial{1}) == Monomial{0, 1, 2});
}

TEST_CASE("eval_int examples") {
  // p = -1 + x1 + x2 + x3
  IntPolynomial::Terms t{{Monomial{}, -1}, {Monomial{0}, 1}, {Monomial{1}, 1}, {Monomial{2}, 1}};
  const auto p = IntPolynomial::from_terms(3, t);
  CHECK(p.eval(BitVector::from_string("110")) == 1);
  CHECK(IntPolynomial::constant(3, 7).eval(BitVector::from_string("101")) == 7);
  CHECK(IntPolynomial(3).eval(BitVector::from_string("111")) == 0);
  CHECK_THROWS_AS(p.eval(BitVector::from_string("11")), InputError);
}

TEST_CASE("mul_int examples") {
  const auto x = IntPolynomial::variable(2, 0);
  const auto one = IntPolynomial::constant(2, 1);
  const auto sq = x * x;
  CHECK(sq.expand(100) == x.expand(100));
  // (1 + x)(1 - x) = 1 - x after x^2 = x
  const auto prod = (one + x) * (one - x);
  CHECK(prod.expand(100) == (one - x).expand(100));
  CHECK((x * IntPolynomial(2)).is_zero());
}

TEST_CASE("gf2 examples") {
  const auto x1 = Gf2Polynomial::variable(3, 0);
  const auto x2 = Gf2Polynomial::variable(3, 1);
  const auto x3 = Gf2Polynomial::variable(3, 2);
  const auto one = Gf2Polynomial::constant(3, true);
  CHECK((x1 + x1).is_zero());
  CHECK(((one + x1) * (one + x1)) == one + x1);
  const Monomial expect[] = {Monomial{0, 2}, Monomial{1, 2}};
  CHECK(((x1 + x2) * x3) == Gf2Polynomial::from_monomials(3, expect));
}

TEST_CASE("ring operations agree pointwise") {
  Rng rng(5);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int t = 0; t < 6; ++t) {
      const auto p = random_int_poly(n, rng, 6, 4);
      const auto q = random_int_poly(n, rng, 6, 4);
      const auto sum = p + q, diff = p - q, prod = p * q;
      const auto gp = random_gf2_poly(n, rng, 6, 4);
      const auto gq = random_gf2_poly(n, rng, 6, 4);
      const auto gsum = gp + gq, gprod = gp * gq;
      for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
        const auto x = point(n, bits);
        REQUIRE(sum.eval(x) == p.eval(x) + q.eval(x));
        REQUIRE(diff.eval(x) == p.eval(x) - q.eval(x));
        REQUIRE(prod.eval(x) == p.eval(x) * q.eval(x));
        REQUIRE(gsum.eval(x) == (gp.eval(x) != gq.eval(x)));
        REQUIRE(gprod.eval(x) == (gp.eval(x) && gq.eval(x)));
      }
    }
  }
  // Randomized above the exhaustive range.
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 20 + rng.below(40);
    const auto p = random_int_poly(n, rng, 10, 6);
    const auto q = random_int_poly(n, rng, 10, 6);
    const auto prod = p * q;
    const auto gp = random_gf2_poly(n, rng, 10, 6);
    const auto gq = random_gf2_poly(n, rng, 10, 6);
    const auto gprod = gp * gq;
    for (int s = 0; s < 200; ++s) {
      const auto x = random_vector(n, rng);
      REQUIRE(prod.eval(x) == p.eval(x) * q.eval(x));
      REQUIRE(gprod.eval(x) == (gp.eval(x) && gq.eval(x)));
    }
  }
}

TEST_CASE("interpolate_weights example: n=3 k=0 r=2 c=(0,1)") {
  const std::int64_t c[] = {0, 1};
  const auto p = interpolate_weights(3, 0, 2, c);
  REQUIRE(p.is_symmetric());
  const auto& a = p.symmetric_coefficients();
  REQUIRE(a.size() == 2);
  CHECK(a[0] == -1);
  CHECK(a[1] == 1);
  CHECK(p.eval(BitVector::from_string("100")) == 0);
  CHECK(p.eval(BitVector::from_string("011")) == 1);
  const auto terms = p.expand(100);
  CHECK(terms.size() == 4);
  CHECK(terms.at(Monomial{}) == -1);
}

TEST_CASE("interpolate_weights single point and errors") {
  const std::int64_t five[] = {5};
  const auto p = interpolate_weights(4, 2, 1, five);
  CHECK(p.degree() == 0);
  CHECK(p.eval(BitVector::from_string("0000")) == 5);
  CHECK(p.eval(BitVector::from_string("1111")) == 5);
  const std::int64_t c3[] = {1, 2, 3};
  CHECK_THROWS_AS(interpolate_weights(4, 2, 3, c3), ParameterError);
  CHECK_THROWS_AS(interpolate_weights(4, 0, 0, std::span<const std::int64_t>{}), ParameterError);
}

TEST_CASE("binomial matrix determinant") {
  // k=0, r=3: [[1,1,0],[1,2,1],[1,3,3]] -> 1*(6-3) - 1*(3-1) + 0 = 1
  const auto m = binomial_matrix(0, 3);
  CHECK(m[0][0] == 1);
  CHECK(m[0][1] == 1);
  CHECK(m[0][2] == 0);
  CHECK(m[1][2] == 1);
  CHECK(m[2][1] == 3);
  CHECK(m[2][2] == 3);
  CHECK(binomial_matrix_det(0, 3) == 1);
  CHECK(binomial_matrix_det(7, 1) == 1);
  CHECK(binomial_matrix_det(5, 4) == 1);
  for (std::int64_t k = 0; k <= 20; ++k) {
    for (std::size_t r = 1; r <= 12; ++r) REQUIRE(binomial_matrix_det(k, r) == 1);
  }
}

TEST_CASE("determinant product formula cross-check") {
  // With p_i(x) = C(x, i-1), leading coefficient 1/(i-1)!, and knots x_j = k+j,
  // det = prod 1/(i-1)! * prod_{i<j} (j - i), which must equal 1.
  for (std::size_t r = 1; r <= 12; ++r) {
    BigInt vandermonde = 1, factorials = 1;
    for (std::size_t j = 1; j <= r; ++j) {
      for (std::size_t i = 1; i < j; ++i) vandermonde *= static_cast<unsigned long>(j - i);
      for (std::size_t f = 2; f < j; ++f) factorials *= static_cast<unsigned long>(f);
    }
    CHECK(vandermonde == factorials);
  }
}

TEST_CASE("Newton route matches fraction-free solve") {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t k = static_cast<std::int64_t>(rng.below(25)) - 1;
    const std::size_t r = 1 + rng.below(12);
    std::vector<std::int64_t> c(r);
    std::vector<BigInt> cb(r);
    for (std::size_t i = 0; i < r; ++i) {
      c[i] = static_cast<std::int64_t>(rng.below(2001)) - 1000;
      cb[i] = static_cast<long>(c[i]);
    }
    if (k < 0) continue;  // Bareiss route is exercised for k >= 0 here
    const auto newton = interpolation_coefficients(k, c);
    const auto bareiss = solve_binomial_system(k, cb);
    REQUIRE(newton == bareiss);
  }
}

TEST_CASE("interpolation hits every prescribed weight") {
  Rng rng(23);
  for (std::size_t n = 1; n <= 20; ++n) {
    for (int t = 0; t < 8; ++t) {
      const std::size_t r = 1 + rng.below(n + 1);
      const std::int64_t k = static_cast<std::int64_t>(rng.below(n - r + 2)) - 1;
      std::vector<std::int64_t> c(r);
      for (auto& v : c) v = static_cast<std::int64_t>(rng.below(200)) - 100;
      const auto p = interpolate_weights(n, k, r, c);
      REQUIRE(p.degree() <= r - 1);
      const auto& a = p.symmetric_coefficients();
      for (std::size_t i = 1; i <= r; ++i) {
        const auto w = static_cast<std::size_t>(k + static_cast<std::int64_t>(i));
        // Coefficient route: sum_j a_j C(w, j).
        BigInt via_coeffs = 0;
        for (std::size_t j = 0; j < a.size(); ++j) via_coeffs += a[j] * binom_oracle(static_cast<long>(w), static_cast<long>(j));
        REQUIRE(via_coeffs == c[i - 1]);
        BitVectorBuilder rep(n);
        for (std::size_t b = 0; b < w; ++b) rep.set(b);
        REQUIRE(p.eval(std::move(rep).build()) == c[i - 1]);
        for (int s = 0; s < 50; ++s) REQUIRE(p.eval(random_vector_of_weight(n, w, rng)) == c[i - 1]);
      }
    }
  }
}

TEST_CASE("symmetric evaluation off the knots uses the same polynomial") {
  Rng rng(29);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 4 + rng.below(10);
    const std::size_t r = 1 + rng.below(4);
    const std::int64_t k = static_cast<std::int64_t>(rng.below(n - r + 1));
    std::vector<std::int64_t> c(r);
    for (auto& v : c) v = static_cast<std::int64_t>(rng.below(9)) - 4;
    const auto p = interpolate_weights(n, k, r, c);
    const auto explicit_p = p.to_explicit(1 << 16);
    const auto coeff_form = IntPolynomial::symmetric_from_coefficients(n, p.symmetric_coefficients());
    for (std::uint64_t bits = 0; bits < (1ULL << n); bits += 1 + rng.below(7)) {
      const auto x = point(n, bits);
      REQUIRE(p.eval(x) == explicit_p.eval(x));
      REQUIRE(coeff_form.eval(x) == explicit_p.eval(x));
    }
  }
}

TEST_CASE("monomial count and budget") {
  const auto p = IntPolynomial::symmetric_from_coefficients(10, {1, 0, 3});
  CHECK(p.monomial_count() == 1 + 45);
  CHECK(p.expand(46).size() == 46);
  CHECK_THROWS_AS(p.expand(45), BudgetError);
}

TEST_CASE("mod2 reduction agrees with integer evaluation mod 2") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const auto p = random_int_poly(n, rng, 8, 4);
    const auto g = p.mod2(1 << 16);
    const auto s = IntPolynomial::symmetric_from_coefficients(n, {3, -1, 2, 5});
    const auto gs = s.mod2(1 << 16);
    for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
      const auto x = point(n, bits);
      REQUIRE(g.eval(x) == mpz_odd_p(p.eval(x).get_mpz_t()));
      REQUIRE(gs.eval(x) == mpz_odd_p(s.eval(x).get_mpz_t()));
    }
  }
}

TEST_CASE("debug serialization") {
  std::ostringstream a;
  IntPolynomial::from_terms(3, {{Monomial{}, -2}, {Monomial{0, 2}, 5}}).serialize(a);
  CHECK(a.str() == "-2 : \n5 : 0,2\n");
  std::ostringstream b;
  IntPolynomial::symmetric_from_coefficients(3, {1, 0, -4}).serialize(b);
  CHECK(b.str() == "sym 0 1\nsym 2 -4\n");
  std::ostringstream c;
  const Monomial ms[] = {Monomial{1, 2}, Monomial{0}};
  Gf2Polynomial::from_monomials(3, ms).serialize(c);
  CHECK(c.str() == "0\n1,2\n");
}
