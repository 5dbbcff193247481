#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "polyham/bitvector.hpp"
#include "polyham/polynomial.hpp"
#include "polyham/rational.hpp"
#include "polyham/rng.hpp"
#include "polyham/threshold.hpp"

namespace polyham {

/// Hamming-dist_k on two groups of s vectors of dimension d: 1 iff some pair
/// (x_i, y_j) has distance at most k.
struct GroupPredicateSpec {
  std::size_t s = 1;
  std::size_t d = 1;
  std::size_t k = 0;

  /// Throws ParameterError unless s >= 1 and k < d.
  void validate() const;
  std::size_t nvars() const { return 2 * s * d; }
  /// Variable index of x_{i,t} and y_{j,t} in the expanded polynomial.
  std::uint32_t x_var(std::size_t i, std::size_t t) const { return static_cast<std::uint32_t>(i * d + t); }
  std::uint32_t y_var(std::size_t j, std::size_t t) const { return static_cast<std::uint32_t>((s + j) * d + t); }
  /// Error budget of the inner threshold polynomial, 1/s^3.
  Rational inner_eps() const;
};

/// Subset of [s] x [s] as a bit mask; pair (i, j) is bit i * s + j.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::size_t s) : s_(s), words_((s * s + 63) / 64, 0) {}
  static PairSet random(std::size_t s, Rng& rng);
  static PairSet full(std::size_t s);

  std::size_t s() const noexcept { return s_; }
  bool contains(std::size_t i, std::size_t j) const { return (words_[(i * s_ + j) / 64] >> ((i * s_ + j) % 64)) & 1U; }
  void set(std::size_t i, std::size_t j, bool v = true);
  std::size_t size() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  /// Parity of |this ∩ other|.
  bool intersect_parity(std::span<const std::uint64_t> other) const;

 private:
  std::size_t s_ = 0;
  std::vector<std::uint64_t> words_;
};

/// One draw of the probabilistic GF(2) polynomial
///   q = 1 + prod_{t=1,2} (1 + sum_{(i,j) in R_t} (1 + p(x_i + y_j)))
/// with p a sampled threshold polynomial for TH_{(k+1)/d}, reduced mod 2.
class HammingPolynomial {
 public:
  /// s = 1 uses the exact threshold: an error budget of 1/s^3 = 1 is vacuous.
  static HammingPolynomial sample(const GroupPredicateSpec& spec, Rng& rng, ThresholdSampler& sampler);
  /// Exact inner threshold with the given subsets.
  static HammingPolynomial with_exact_inner(const GroupPredicateSpec& spec, PairSet r1, PairSet r2,
                                            ThresholdSampler& sampler);

  const GroupPredicateSpec& spec() const noexcept { return spec_; }
  const ThresholdCircuit& inner() const noexcept { return inner_; }
  const PairSet& r1() const noexcept { return r1_; }
  const PairSet& r2() const noexcept { return r2_; }

  /// p(z) mod 2 for z of dimension d.
  bool inner_bit(const BitVector& z) const;
  /// When the inner polynomial depends only on |z|: its value mod 2 per weight.
  bool inner_is_symmetric() const noexcept { return weight_table_ != nullptr; }
  /// Shared between draws with the same exact inner polynomial.
  const std::vector<std::uint8_t>& weight_table() const noexcept { return *weight_table_; }

  /// q given the mask of inner values p(x_i + y_j) mod 2 (layout of PairSet).
  bool combine(std::span<const std::uint64_t> inner_bits) const;
  /// Structural evaluation of q on groups X and Y (each s vectors of dimension d).
  bool eval(std::span<const BitVector> xs, std::span<const BitVector> ys) const;

  /// The inner polynomial reduced mod 2, over d variables.
  Gf2Polynomial inner_gf2(std::size_t budget = IntPolynomial::kDefaultBudget) const;
  /// Monomial count of p(x + y) over GF(2) for one pair.
  BigInt per_pair_monomials() const;
  /// Upper bound on the monomials of the expansion, (|R1| P + 1)(|R2| P + 1)
  /// with P the monomial count of p(x + y).
  BigInt projected_monomials() const;
  /// Explicit polynomial over 2sd variables (layout of GroupPredicateSpec).
  Gf2Polynomial expand(std::size_t budget = IntPolynomial::kDefaultBudget) const;
  /// 2 * deg(inner).
  std::size_t degree_bound() const { return 2 * inner_.degree(); }

  /// The requirement d > e^2 ln s under which the monomial bound is asymptotic.
  bool dimension_advisory_ok() const;

 private:
  HammingPolynomial(GroupPredicateSpec spec, ThresholdCircuit inner, PairSet r1, PairSet r2);

  GroupPredicateSpec spec_;
  ThresholdCircuit inner_;
  PairSet r1_, r2_;
  std::shared_ptr<const std::vector<std::uint8_t>> weight_table_;
};

/// Number of monomials of p(x + y) over GF(2) for p given by its monomials:
/// sum over monomials of 2^degree.
BigInt substituted_monomial_count(const Gf2Polynomial& p);

}  // namespace polyham
