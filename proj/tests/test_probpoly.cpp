#include <doctest.h>

#include <cmath>
#include <set>

#include "polyham/errors.hpp"
#include "polyham/interpolation.hpp"
#include "polyham/threshold.hpp"

using namespace polyham;

namespace {

BitVector point(std::size_t n, std::uint64_t bits) {
  BitVectorBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, (bits >> i) & 1);
  return std::move(b).build();
}

ThresholdSpec spec(std::size_t n, const char* theta, const char* eps) {
  return ThresholdSpec{n, Rational::parse(theta), Rational::parse(eps)};
}

double degree_cap(std::size_t n, double eps) {
  return std::min(static_cast<double>(n), 41.0 * std::sqrt(static_cast<double>(n) * std::log(1.0 / eps)));
}

void check_shared_maps(const ThresholdCircuit& c) {
  if (c.kind() != ThresholdCircuit::Kind::kRecursive) return;
  const auto hi = c.near_hi(), lo = c.near_lo(), in = c.inner();
  CHECK(hi.level() == c.level() + 1);
  if (hi.kind() == ThresholdCircuit::Kind::kRecursive && lo.kind() == ThresholdCircuit::Kind::kRecursive) {
    CHECK(hi.shared_sample_map() == lo.shared_sample_map());
  }
  if (hi.kind() == ThresholdCircuit::Kind::kRecursive && in.kind() == ThresholdCircuit::Kind::kRecursive) {
    CHECK(hi.shared_sample_map() == in.shared_sample_map());
  }
  check_shared_maps(hi);
  check_shared_maps(lo);
  check_shared_maps(in);
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(spec(0, "1/2", "1/4").validate(), ParameterError);
  CHECK_THROWS_AS(spec(4, "3/2", "1/4").validate(), ParameterError);
  CHECK_THROWS_AS(spec(4, "1/2", "0").validate(), ParameterError);
  CHECK_THROWS_AS(spec(4, "1/2", "1").validate(), ParameterError);
  CHECK_NOTHROW(spec(4, "1/2", "0.9").validate());
  CHECK(spec(3, "1/2", "1/4").cutoff() == 2);
  CHECK(spec(4, "1/2", "1/4").cutoff() == 2);
  CHECK(spec(5, "0", "1/4").cutoff() == 0);
}

TEST_CASE("exact base examples") {
  Rng rng(1);
  const auto one = sample_threshold(spec(1, "1/2", "1/4"), rng);
  CHECK(one.kind() == ThresholdCircuit::Kind::kExactBase);
  const auto x1 = one.expand();
  CHECK(x1.expand(10) == IntPolynomial::variable(1, 0).expand(10));

  const auto three = sample_threshold(spec(3, "1/2", "1/4"), rng);
  CHECK(three.eval(BitVector::from_string("110")) == 1);
  CHECK(three.eval(BitVector::from_string("000")) == 0);
  const std::int64_t c[] = {0, 0, 1, 1};
  CHECK(three.expand().expand(100) == interpolate_weights(3, -1, 4, c).expand(100));
  CHECK_THROWS_AS(three.eval(BitVector::from_string("11")), InputError);
}

TEST_CASE("base case rule") {
  Rng rng(2);
  const auto c100 = sample_threshold(spec(100, "1/2", "1/2"), rng);
  CHECK(c100.kind() == ThresholdCircuit::Kind::kExactBase);
  CHECK(c100.degree() <= 100);
  CHECK(threshold_degree_bound(100, 0.5) == doctest::Approx(100.0));

  const auto big = sample_threshold(spec(10000, "1/2", "1/2"), rng);
  REQUIRE(big.kind() == ThresholdCircuit::Kind::kRecursive);
  CHECK(big.sample_map().size() == 1000);
  for (auto i : big.sample_map()) CHECK(i < 10000);
  CHECK(big.a_param() == doctest::Approx(std::sqrt(10.0) * std::sqrt(std::log(2.0))));
  CHECK(big.near_hi().n() == 1000);
  CHECK(big.inner().n() == 1000);
  CHECK(big.near_lo().eps() == doctest::Approx(0.125));
  CHECK(big.inner().eps() == doctest::Approx(0.125));
  const auto [lo, hi] = big.band();
  CHECK(lo <= 5000);
  CHECK(hi >= 5000);
  CHECK(big.band_poly().degree() <= hi - lo);
  CHECK(big.depth() <= static_cast<std::size_t>(std::ceil(std::log10(10000.0))) + 1);
}

TEST_CASE("circuit evaluation matches expansion exhaustively") {
  const SamplerOptions loose{2, 1.0};
  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(1000 * n + seed);
      const std::size_t num = 1 + rng.below(n);
      const auto theta = Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(n)};
      // eps near 1 forces recursion under the default rule for n >= 11; the
      // loose options force it everywhere.
      const bool use_default = n >= 11 && seed % 2 == 0;
      const ThresholdSpec s{n, theta, use_default ? Rational::parse("0.999") : Rational::parse("0.2")};
      const auto c = sample_threshold(s, rng, use_default ? SamplerOptions{} : loose);
      if (n >= 3) REQUIRE(c.kind() == ThresholdCircuit::Kind::kRecursive);
      check_shared_maps(c);
      const auto p = c.expand();
      if (use_default) REQUIRE(static_cast<double>(p.degree()) <= degree_cap(n, c.eps()) + 1e-9);
      REQUIRE(p.degree() <= c.degree());
      for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
        const auto x = point(n, bits);
        REQUIRE(c.eval(x) == p.eval(x));
      }
    }
  }
}

TEST_CASE("structural degree bound at scale") {
  Rng rng(7);
  for (const char* eps : {"0.24", "0.1", "0.01", "0.5"}) {
    for (std::size_t n : {50u, 1000u, 10000u}) {
      const auto c = sample_threshold(spec(n, "1/2", eps), rng);
      CHECK(static_cast<double>(c.degree()) <= degree_cap(n, c.eps()) + 1e-9);
      check_shared_maps(c);
    }
  }
}

TEST_CASE("sample chain is shared across a symmetric draw") {
  Rng rng(11);
  SymmetricFunctionSpec f{10000, std::vector<std::uint8_t>(10001)};
  for (std::size_t w = 0; w <= 10000; ++w) f.values[w] = (w >= 3000 && w < 6000) || w >= 8000;
  const auto s = sample_symmetric(f, Rational::parse("0.1"), rng);
  REQUIRE(s.terms().size() == 3);
  std::set<const void*> maps;
  for (const auto& t : s.terms()) {
    REQUIRE(t.circuit.kind() == ThresholdCircuit::Kind::kRecursive);
    maps.insert(t.circuit.shared_sample_map().get());
    check_shared_maps(t.circuit);
    CHECK(t.circuit.eps() == doctest::Approx(0.05));
  }
  CHECK(maps.size() == 1);
  CHECK(s.terms()[0].sign == 1);
  CHECK(s.terms()[1].sign == -1);
  CHECK(s.terms()[2].sign == 1);
}

TEST_CASE("jump sets") {
  CHECK(jump_sets({4, {0, 0, 1, 1, 1}}).up == std::vector<std::size_t>{2});
  CHECK(jump_sets({4, {0, 0, 1, 1, 1}}).down.empty());
  const auto parity = jump_sets({3, {0, 1, 0, 1}});
  CHECK(parity.up == std::vector<std::size_t>{1, 3});
  CHECK(parity.down == std::vector<std::size_t>{2});
  CHECK_THROWS_AS(SymmetricFunctionSpec({3, {0, 1}}).validate(), ParameterError);
}

TEST_CASE("symmetric examples") {
  Rng rng(13);
  const auto ones = sample_symmetric({5, std::vector<std::uint8_t>(6, 1)}, Rational::parse("0.1"), rng);
  CHECK(ones.terms().empty());
  CHECK(ones.constant() == 1);
  CHECK(ones.expand().expand(10) == IntPolynomial::constant(5, 1).expand(10));

  const auto maj = sample_symmetric({4, {0, 0, 1, 1, 1}}, Rational::parse("0.1"), rng);
  REQUIRE(maj.terms().size() == 1);
  CHECK(maj.terms()[0].sign == 1);
  CHECK(maj.terms()[0].jump == 2);
  CHECK(maj.constant() == 0);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const auto x = point(4, bits);
    CHECK(maj.eval(x) == (x.weight() >= 2 ? 1 : 0));
  }
}

TEST_CASE("decomposition with true thresholds reproduces f") {
  Rng rng(17);
  for (std::size_t n = 1; n <= 64; ++n) {
    for (int t = 0; t < 20; ++t) {
      SymmetricFunctionSpec f{n, std::vector<std::uint8_t>(n + 1)};
      for (auto& v : f.values) v = static_cast<std::uint8_t>(rng.coin());
      const auto j = jump_sets(f);
      for (std::size_t w = 0; w <= n; ++w) {
        int v = f.values[0];
        for (auto i : j.up) v += w >= i;
        for (auto i : j.down) v -= w >= i;
        REQUIRE(v == f.values[w]);
      }
    }
  }
}

TEST_CASE("sampled symmetric polynomials are exact at small n") {
  Rng rng(19);
  for (std::size_t n = 1; n <= 64; n += 7) {
    SymmetricFunctionSpec f{n, std::vector<std::uint8_t>(n + 1)};
    for (auto& v : f.values) v = static_cast<std::uint8_t>(rng.coin());
    const auto s = sample_symmetric(f, Rational::parse("1/3"), rng);
    for (std::size_t w = 0; w <= n; ++w) {
      for (int r = 0; r < 3; ++r) REQUIRE(s.eval(random_vector_of_weight(n, w, rng)) == f.values[w]);
    }
  }
}

TEST_CASE("symmetric circuit evaluation matches expansion") {
  const SamplerOptions loose{2, 1.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 50);
    const std::size_t n = 6 + rng.below(5);
    SymmetricFunctionSpec f{n, std::vector<std::uint8_t>(n + 1)};
    for (auto& v : f.values) v = static_cast<std::uint8_t>(rng.coin());
    const auto s = sample_symmetric(f, Rational::parse("0.2"), rng, loose);
    const auto p = s.expand();
    for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
      const auto x = point(n, bits);
      REQUIRE(s.eval(x) == p.eval(x));
    }
  }
}

TEST_CASE("sampling concentration") {
  const std::size_t n = 10000;
  const double eps = 0.1;
  const double a = std::sqrt(10.0) * std::sqrt(std::log(1.0 / eps));
  Rng rng(23);
  const auto x = random_vector_of_weight(n, 5000, rng);
  const std::size_t draws = 10000;
  std::size_t low = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    SampleChain chain(n, rng.split("concentration", d));
    const auto xs = chain.project(x, 1);
    const double v = static_cast<double>(xs[1].weight()) / static_cast<double>(n / 10);
    if (v <= 0.5 - a / std::sqrt(static_cast<double>(n))) ++low;
  }
  const double p = eps / 4;
  const double frac = static_cast<double>(low) / draws;
  CHECK(frac <= p + 3 * std::sqrt(p * (1 - p) / draws));
}

TEST_CASE("measure_error on exact circuits is exact") {
  Rng rng(29);
  const auto s = spec(20, "3/10", "0.1");
  ThresholdSampler sampler;
  const auto inputs = threshold_test_inputs(20, s.cutoff(), 10, rng);
  REQUIRE(inputs.size() == 12);
  CHECK(inputs[0].weight() == 6);
  CHECK(inputs[1].weight() == 5);
  const auto report = measure_error(
      [&](Rng& r) -> PolynomialEvaluator {
        auto c = sampler.sample(s, r);
        return [c](const BitVector& x) { return c.eval(x); };
      },
      [](const BitVector& x) { return x.weight() >= 6 ? 1 : 0; }, inputs, 5, rng);
  for (const auto& row : report) CHECK(row.agreement() == 1.0);
}

TEST_CASE("measure_error on recursive circuits meets the error budget") {
  Rng rng(31);
  const auto s = spec(10000, "1/2", "0.1");
  ThresholdSampler sampler;
  const auto inputs = threshold_test_inputs(10000, s.cutoff(), 2, rng);
  const std::size_t trials = 200;
  const auto report = measure_error(
      [&](Rng& r) -> PolynomialEvaluator {
        auto c = sampler.sample(s, r);
        REQUIRE(c.kind() == ThresholdCircuit::Kind::kRecursive);
        return [c](const BitVector& x) { return c.eval(x); };
      },
      [](const BitVector& x) { return x.weight() >= 5000 ? 1 : 0; }, inputs, trials, rng);
  for (const auto& row : report) CHECK(row.agreement() >= 0.9 - 3 * std::sqrt(0.9 * 0.1 / trials));
}
