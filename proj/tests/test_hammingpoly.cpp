#include <doctest.h>

#include <cmath>

#include "polyham/errors.hpp"
#include "polyham/hamming_poly.hpp"

using namespace polyham;

namespace {

BitVector point(std::size_t n, std::uint64_t bits) {
  BitVectorBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, (bits >> i) & 1);
  return std::move(b).build();
}

PairSet from_mask(std::size_t s, std::uint64_t mask) {
  PairSet out(s);
  for (std::size_t b = 0; b < s * s; ++b) out.set(b / s, b % s, (mask >> b) & 1);
  return out;
}

bool truth(std::span<const BitVector> xs, std::span<const BitVector> ys, std::size_t k) {
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      if (hamming_distance(x, y) <= k) return true;
    }
  }
  return false;
}

std::vector<BitVector> random_group(std::size_t s, std::size_t d, Rng& rng) {
  std::vector<BitVector> g;
  for (std::size_t i = 0; i < s; ++i) g.push_back(random_vector(d, rng));
  return g;
}

// Groups with every cross pair at distance > k: x's are all-zero, y's have weight k+1.
std::pair<std::vector<BitVector>, std::vector<BitVector>> far_groups(std::size_t s, std::size_t d, std::size_t k,
                                                                     Rng& rng) {
  std::vector<BitVector> xs(s, BitVector(d)), ys;
  for (std::size_t j = 0; j < s; ++j) ys.push_back(random_vector_of_weight(d, k + 1 + rng.below(d - k), rng));
  return {xs, ys};
}

}  // namespace

TEST_CASE("spec and eps wiring") {
  CHECK_THROWS_AS((GroupPredicateSpec{2, 4, 4}.validate()), ParameterError);
  CHECK_THROWS_AS((GroupPredicateSpec{0, 4, 1}.validate()), ParameterError);
  const GroupPredicateSpec spec{3, 12, 2};
  CHECK(spec.inner_eps() == Rational(1, 27));
  CHECK(spec.nvars() == 72);
  CHECK(spec.x_var(2, 5) == 29);
  CHECK(spec.y_var(0, 0) == 36);
  ThresholdSampler sampler;
  Rng rng(1);
  const auto hp = HammingPolynomial::sample(spec, rng, sampler);
  CHECK(hp.inner().eps() == doctest::Approx(1.0 / 27));
  CHECK(hp.inner().n() == 12);
  CHECK(hp.inner().cutoff() == 3);
  CHECK(hp.r1().s() == 3);
}

TEST_CASE("s = 1 with both subsets full is the distance predicate") {
  ThresholdSampler sampler;
  for (std::size_t d = 1; d <= 4; ++d) {
    for (std::size_t k = 0; k < d; ++k) {
      const GroupPredicateSpec spec{1, d, k};
      const auto hp = HammingPolynomial::with_exact_inner(spec, PairSet::full(1), PairSet::full(1), sampler);
      const auto q = hp.expand();
      // 1 + p(x + y) over GF(2), expanded directly.
      const auto p = hp.inner_gf2();
      for (std::uint64_t a = 0; a < (1ULL << d); ++a) {
        for (std::uint64_t b = 0; b < (1ULL << d); ++b) {
          const BitVector xs[] = {point(d, a)};
          const BitVector ys[] = {point(d, b)};
          const bool expect = hamming_distance(xs[0], ys[0]) <= k;
          REQUIRE(hp.eval(xs, ys) == expect);
          REQUIRE(q.eval(concat(std::array{xs[0], ys[0]})) == expect);
          REQUIRE(!p.eval(bitwise_xor(xs[0], ys[0])) == expect);
        }
      }
    }
  }
}

TEST_CASE("structural evaluation matches expansion exhaustively for s = 1") {
  ThresholdSampler sampler;
  Rng rng(3);
  for (std::size_t d = 1; d <= 4; ++d) {
    for (std::size_t k = 0; k < d; ++k) {
      for (int t = 0; t < 4; ++t) {
        const auto hp = HammingPolynomial::sample({1, d, k}, rng, sampler);
        const auto q = hp.expand();
        for (std::uint64_t a = 0; a < (1ULL << (2 * d)); ++a) {
          const auto xy = point(2 * d, a);
          std::vector<std::uint32_t> xi(d), yi(d);
          for (std::uint32_t i = 0; i < d; ++i) {
            xi[i] = i;
            yi[i] = static_cast<std::uint32_t>(d) + i;
          }
          const BitVector gx[] = {gather(xy, xi)};
          const BitVector gy[] = {gather(xy, yi)};
          REQUIRE(hp.eval(gx, gy) == q.eval(xy));
        }
      }
    }
  }
}

TEST_CASE("expansion agrees with structural evaluation on random inputs") {
  ThresholdSampler sampler;
  Rng rng(5);
  int tested = 0;
  for (std::size_t s = 1; s <= 4; ++s) {
    for (std::size_t d = 2; d <= 8; ++d) {
      for (std::size_t k : {std::size_t{0}, d / 2, d - 1}) {
        const auto hp = HammingPolynomial::sample({s, d, k}, rng, sampler);
        if (hp.projected_monomials() > BigInt(1 << 16)) {
          CHECK_THROWS_AS(hp.expand(1 << 16), BudgetError);
          continue;
        }
        ++tested;
        const auto q = hp.expand(1 << 16);
        REQUIRE(BigInt(static_cast<unsigned long>(q.size())) <= hp.projected_monomials());
        REQUIRE(q.degree() <= hp.degree_bound());
        for (const auto& m : q.terms()) REQUIRE(m.span_end() <= hp.spec().nvars());
        for (int t = 0; t < 300; ++t) {
          const auto xs = random_group(s, d, rng);
          auto ys = random_group(s, d, rng);
          // Plant a close pair half of the time.
          if (t % 2 == 0) ys[rng.below(s)] = xs[rng.below(s)];
          std::vector<BitVector> all(xs);
          all.insert(all.end(), ys.begin(), ys.end());
          REQUIRE(hp.eval(xs, ys) == q.eval(concat(all)));
        }
      }
    }
  }
  CHECK(tested >= 20);
}

TEST_CASE("empty first subset") {
  ThresholdSampler sampler;
  Rng rng(7);
  const std::size_t s = 3, d = 5, k = 1;
  for (int t = 0; t < 50; ++t) {
    const auto r2 = PairSet::random(s, rng);
    const auto hp = HammingPolynomial::with_exact_inner({s, d, k}, PairSet(s), r2, sampler);
    const auto xs = random_group(s, d, rng);
    const auto ys = random_group(s, d, rng);
    // q = sum over R2 of [close], mod 2.
    bool parity = false;
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        if (r2.contains(i, j) && hamming_distance(xs[i], ys[j]) <= k) parity = !parity;
      }
    }
    CHECK(hp.eval(xs, ys) == parity);
  }
}

TEST_CASE("no close pair gives zero with an exact inner polynomial") {
  ThresholdSampler sampler;
  Rng rng(11);
  for (std::size_t s = 1; s <= 6; ++s) {
    for (int t = 0; t < 100; ++t) {
      const std::size_t d = 2 + rng.below(10);
      const std::size_t k = rng.below(d);
      const auto hp = HammingPolynomial::with_exact_inner({s, d, k}, PairSet::random(s, rng), PairSet::random(s, rng),
                                                          sampler);
      const auto [xs, ys] = far_groups(s, d, k, rng);
      REQUIRE(!truth(xs, ys, k));
      REQUIRE(!hp.eval(xs, ys));
    }
  }
}

TEST_CASE("a close pair is detected with probability exactly 3/4 over the subsets") {
  ThresholdSampler sampler;
  for (std::size_t s : {1u, 2u}) {
    const std::size_t cells = s * s;
    const GroupPredicateSpec spec{s, 4, 1};
    const auto probe = HammingPolynomial::with_exact_inner(spec, PairSet(s), PairSet(s), sampler);
    // Every nonempty pattern of close pairs; the inner bit of a close pair is 0.
    for (std::uint64_t close = 1; close < (1ULL << cells); ++close) {
      const std::vector<std::uint64_t> inner_bits{~close & ((1ULL << cells) - 1)};
      std::uint64_t hits = 0;
      for (std::uint64_t a = 0; a < (1ULL << cells); ++a) {
        for (std::uint64_t b = 0; b < (1ULL << cells); ++b) {
          const auto hp = HammingPolynomial::with_exact_inner(spec, from_mask(s, a), from_mask(s, b), sampler);
          hits += hp.combine(inner_bits);
        }
      }
      REQUIRE(4 * hits == 3 * (1ULL << (2 * cells)));
    }
    CHECK(!probe.combine(std::vector<std::uint64_t>{(1ULL << cells) - 1}));
  }
}

TEST_CASE("Monte Carlo detection rate for small groups") {
  ThresholdSampler sampler;
  Rng rng(13);
  const std::size_t trials = 20000;
  for (std::size_t s = 1; s <= 5; ++s) {
    const std::size_t d = 10, k = 2;
    auto xs = random_group(s, d, rng);
    auto ys = random_group(s, d, rng);
    ys[s - 1] = xs[0];
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      Rng r = rng.split("trial", t);
      hits += HammingPolynomial::sample({s, d, k}, r, sampler).eval(xs, ys);
    }
    const double rate = static_cast<double>(hits) / trials;
    CHECK(std::abs(rate - 0.75) <= 3 * std::sqrt(0.75 * 0.25 / trials));
  }
}

TEST_CASE("sampled polynomial at s = 25 beats two thirds") {
  ThresholdSampler sampler;
  Rng rng(17);
  const std::size_t s = 25, d = 24, k = 3, trials = 300;
  auto xs = random_group(s, d, rng);
  auto ys = random_group(s, d, rng);
  ys[7] = bitwise_xor(xs[3], random_vector_of_weight(d, 2, rng));
  const auto [fx, fy] = far_groups(s, d, k, rng);
  std::size_t agree_close = 0, agree_far = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng r = rng.split("trial", t);
    const auto hp = HammingPolynomial::sample({s, d, k}, r, sampler);
    agree_close += hp.eval(xs, ys) == truth(xs, ys, k);
    agree_far += hp.eval(fx, fy) == truth(fx, fy, k);
  }
  const double sigma = std::sqrt((2.0 / 3) * (1.0 / 3) / trials);
  CHECK(static_cast<double>(agree_close) / trials >= 2.0 / 3 - 3 * sigma);
  CHECK(agree_far == trials);
}

TEST_CASE("monomial count regression bound") {
  // Recorded constant for q's expansion against s^4 * C(2d, deg inner), small
  // sizes; the worst ratio seen over 30 seeds was 25.1.
  const double kConstant = 32.0;
  ThresholdSampler sampler;
  Rng rng(19);
  double worst = 0;
  for (std::size_t s = 1; s <= 3; ++s) {
    for (std::size_t d = 2; d <= 5; ++d) {
      for (std::size_t k = 0; k < d; ++k) {
        const auto hp = HammingPolynomial::sample({s, d, k}, rng, sampler);
        const auto q = hp.expand(1 << 22);
        const double bound = std::pow(static_cast<double>(s), 4) *
                             binomial(2 * d, std::min<std::size_t>(2 * d, hp.inner().degree())).get_d();
        worst = std::max(worst, static_cast<double>(q.size()) / bound);
        CHECK(static_cast<double>(q.size()) <= kConstant * bound);
        CHECK(BigInt(static_cast<unsigned long>(q.size())) <= hp.projected_monomials());
      }
    }
  }
  MESSAGE("worst monomial ratio " << worst);
}

TEST_CASE("dimension advisory") {
  ThresholdSampler sampler;
  Rng rng(23);
  CHECK(HammingPolynomial::sample({2, 6, 1}, rng, sampler).dimension_advisory_ok());
  CHECK_FALSE(HammingPolynomial::sample({100, 6, 1}, rng, sampler).dimension_advisory_ok());
}
