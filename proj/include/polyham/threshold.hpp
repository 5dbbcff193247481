#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "polyham/bitvector.hpp"
#include "polyham/polynomial.hpp"
#include "polyham/rational.hpp"
#include "polyham/rng.hpp"

namespace polyham {

/// TH_theta on n variables with error budget eps: outputs [|x|/n >= theta].
struct ThresholdSpec {
  std::size_t n = 0;
  Rational theta;
  Rational eps;

  /// Throws ParameterError unless n >= 1, 0 <= theta <= 1, 0 < eps < 1.
  void validate() const;
  /// Smallest weight on which the function is 1.
  std::int64_t cutoff() const { return theta.ceil_times(static_cast<std::int64_t>(n)); }
};

/// Symmetric Boolean function given by its value on each Hamming weight 0..n.
struct SymmetricFunctionSpec {
  std::size_t n = 0;
  std::vector<std::uint8_t> values;

  void validate() const;
  bool operator()(std::size_t weight) const { return values.at(weight) != 0; }
};

/// Positions i in 1..n where the value table jumps up (A) or down (B).
struct JumpSets {
  std::vector<std::size_t> up;    // f_i = 1, f_{i-1} = 0
  std::vector<std::size_t> down;  // f_i = 0, f_{i-1} = 1
};
JumpSets jump_sets(const SymmetricFunctionSpec& f);

struct SamplerOptions {
  /// Circuits on at most this many variables use the exact polynomial.
  std::size_t base_size = 10;
  /// Constant c of the degree bound c * sqrt(n ln(1/eps)).
  double degree_constant = 41.0;
};

/// The degree bound min(n, c * sqrt(n ln(1/eps))) used for the base-case rule.
double threshold_degree_bound(std::size_t n, double eps, double constant = 41.0);

/// Coordinate samples shared by every node at the same recursion level:
/// level L maps the level-L vector (n_L coordinates) to n_{L+1} = max(1, n_L/10)
/// coordinates drawn uniformly with replacement. Drawn lazily, thread-safe.
class SampleChain {
 public:
  SampleChain(std::size_t n, Rng rng);

  std::size_t size_at(std::size_t level) const;
  /// Shared sample map of the given level.
  std::shared_ptr<const std::vector<std::uint32_t>> map(std::size_t level) const;
  /// Vectors x_0 = x, x_{L+1} = x_L[map(L)] for L < levels.
  std::vector<BitVector> project(const BitVector& x, std::size_t levels) const;

 private:
  std::size_t n_;
  Rng rng_;
  mutable std::mutex mu_;
  mutable std::vector<std::shared_ptr<const std::vector<std::uint32_t>>> maps_;
};

/// Cache for the deterministic step-function interpolants used by circuits.
/// Only the coordinate samples are random, so these are shared across draws.
class InterpolantCache {
 public:
  /// Symmetric polynomial on nvars variables interpolating [w >= cutoff] on
  /// weights first..first+count-1.
  std::shared_ptr<const IntPolynomial> step(std::size_t nvars, std::size_t first, std::size_t count,
                                            std::int64_t cutoff);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::int64_t>;
  mutable std::mutex mu_;
  std::map<Key, std::shared_ptr<const IntPolynomial>> entries_;
};

/// A sampled instance of the recursive threshold polynomial
///   M(x) = A(x) * S(x~) + M'(x~) * (1 - S(x~)),  S = (1 - M_hi) * M_lo,
/// kept as a tree and evaluated lazily. Immutable; cheap to copy.
class ThresholdCircuit {
 public:
  enum class Kind { kExactBase, kRecursive };

  Kind kind() const noexcept;
  std::size_t n() const noexcept;
  std::size_t level() const noexcept;
  double eps() const noexcept;
  long double theta() const noexcept;
  /// Smallest weight on which this node's threshold function is 1.
  std::int64_t cutoff() const noexcept;

  /// Recursive nodes only.
  const std::vector<std::uint32_t>& sample_map() const;
  std::shared_ptr<const std::vector<std::uint32_t>> shared_sample_map() const;
  double a_param() const;
  std::pair<std::size_t, std::size_t> band() const;
  const IntPolynomial& band_poly() const;
  ThresholdCircuit near_hi() const;
  ThresholdCircuit near_lo() const;
  ThresholdCircuit inner() const;
  /// Exact-base nodes only.
  const IntPolynomial& base_poly() const;

  /// Number of node levels (1 for an exact base).
  std::size_t depth() const;
  /// Structural degree: exact for base nodes, deg(hi) + deg(lo) + max(deg A,
  /// deg inner) for recursive nodes, capped at n.
  std::size_t degree() const;
  /// Depends only on |x|: true when the whole circuit is an exact base.
  bool is_symmetric() const noexcept { return kind() == Kind::kExactBase; }

  BigInt eval(const BitVector& x) const;
  /// Evaluation from the weights of the projected chain x_level, x_level+1, ...
  /// (as produced by SampleChain::project); weights[0] belongs to this node.
  BigInt eval_weights(std::span<const std::size_t> weights) const;
  /// Explicit polynomial over n variables; BudgetError if an intermediate
  /// product would exceed budget monomials.
  IntPolynomial expand(std::size_t budget = IntPolynomial::kDefaultBudget) const;

  const SampleChain& chain() const { return *chain_; }

  struct Node;

 private:
  friend class ThresholdSampler;
  ThresholdCircuit(std::shared_ptr<const Node> node, std::shared_ptr<const SampleChain> chain)
      : node_(std::move(node)), chain_(std::move(chain)) {}

  std::shared_ptr<const Node> node_;
  std::shared_ptr<const SampleChain> chain_;
};

/// A sampled polynomial for an arbitrary symmetric function:
/// f_0 + sum_{i in up} TH_{i/n} - sum_{i in down} TH_{i/n}, all thresholds
/// sharing one sample chain.
class SymmetricCircuit {
 public:
  struct Term {
    int sign;
    std::size_t jump;
    ThresholdCircuit circuit;
  };

  std::size_t n() const noexcept { return n_; }
  int constant() const noexcept { return f0_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t degree() const;
  BigInt eval(const BitVector& x) const;
  IntPolynomial expand(std::size_t budget = IntPolynomial::kDefaultBudget) const;

 private:
  friend class ThresholdSampler;
  std::size_t n_ = 0;
  int f0_ = 0;
  std::vector<Term> terms_;
  std::shared_ptr<const SampleChain> chain_;
};

/// Draws threshold and symmetric-function polynomials. Holds the interpolant
/// cache; one sampler can serve many draws and threads.
class ThresholdSampler {
 public:
  explicit ThresholdSampler(SamplerOptions options = {});

  ThresholdCircuit sample(const ThresholdSpec& spec, Rng& rng);
  /// Same, on a caller-supplied chain (used to share samples across thresholds).
  ThresholdCircuit sample(const ThresholdSpec& spec, std::shared_ptr<const SampleChain> chain);
  SymmetricCircuit sample_symmetric(const SymmetricFunctionSpec& f, const Rational& eps, Rng& rng);

  /// An exact-base circuit for TH_theta on n variables regardless of size.
  ThresholdCircuit exact_circuit(std::size_t n, const Rational& theta);

  /// The exact weight-interpolation polynomial of TH with the given cutoff.
  std::shared_ptr<const IntPolynomial> exact_threshold(std::size_t n, std::int64_t cutoff);

  const SamplerOptions& options() const noexcept { return options_; }
  InterpolantCache& cache() noexcept { return *cache_; }

 private:
  std::shared_ptr<const ThresholdCircuit::Node> build(std::size_t n, std::size_t level, long double theta,
                                                      std::optional<Rational> exact_theta, double eps,
                                                      const std::shared_ptr<const SampleChain>& chain);

  SamplerOptions options_;
  std::shared_ptr<InterpolantCache> cache_;
};

/// Convenience wrappers with a fresh sampler.
ThresholdCircuit sample_threshold(const ThresholdSpec& spec, Rng& rng, SamplerOptions options = {});
SymmetricCircuit sample_symmetric(const SymmetricFunctionSpec& f, const Rational& eps, Rng& rng,
                                  SamplerOptions options = {});

/// One row of an agreement report.
struct InputAgreement {
  BitVector input;
  std::size_t weight = 0;
  std::size_t agree = 0;
  std::size_t trials = 0;
  double agreement() const { return trials == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(trials); }
};

/// Draws `trials` independent polynomials and, for each input, counts how many
/// agree with the reference function. `draw` receives a per-trial stream.
using PolynomialEvaluator = std::function<BigInt(const BitVector&)>;
std::vector<InputAgreement> measure_error(const std::function<PolynomialEvaluator(Rng&)>& draw,
                                          const std::function<int(const BitVector&)>& reference,
                                          std::span<const BitVector> inputs, std::size_t trials, Rng& rng);

/// Boundary-weight inputs (cutoff and cutoff - 1, when in range) followed by
/// `random_count` uniformly random vectors.
std::vector<BitVector> threshold_test_inputs(std::size_t n, std::int64_t cutoff, std::size_t random_count, Rng& rng);
/// A vector of dimension n with the first `weight` coordinates set, shuffled.
BitVector random_vector_of_weight(std::size_t n, std::size_t weight, Rng& rng);
BitVector random_vector(std::size_t n, Rng& rng);

}  // namespace polyham
