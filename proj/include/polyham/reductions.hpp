#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "polyham/bitvector.hpp"
#include "polyham/dataset.hpp"
#include "polyham/neighbors.hpp"
#include "polyham/rational.hpp"
#include "polyham/rng.hpp"

namespace polyham {

/// Integer vectors with entries in [0, m].
struct IntVectors {
  std::size_t dim = 0;
  std::uint32_t m = 0;
  std::vector<std::vector<std::uint32_t>> rows;

  /// Throws InputError on ragged rows or entries above m.
  void validate() const;
};

/// Parses `m=<int>` followed by one comma-separated row per line; `#`
/// comments and blank lines are skipped.
IntVectors load_int_vectors(std::istream& in);

/// Block i holds x_i ones followed by m - x_i zeros.
BitVector unary_encode(std::span<const std::uint32_t> x, std::uint32_t m);
std::size_t l1_distance(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y);

/// Batch nearest neighbors under l1 through the unary encoding (MAX = m dim).
NNResult l1_batch_nn(const IntVectors& db, const IntVectors& queries, const ClosestPairConfig& cfg, Rng& rng);
std::vector<NNEntry> l1_batch_nn_bruteforce(const IntVectors& db, const IntVectors& queries);

/// Maximum-distance pair through the complement of the blue side.
PairResult furthest_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng, PipelineStats* stats = nullptr);
PairResult furthest_pair_bruteforce(const Dataset& ds);

enum class IpMode { kMin, kMax };

struct IpResult {
  std::size_t red = 0;
  std::size_t blue = 0;
  std::size_t value = 0;
  friend bool operator==(const IpResult&, const IpResult&) = default;
};

/// Min or max inner product over weight buckets: with |u| = I and |v| = J,
/// H(u, v) = I + J - 2 <u, v>. Ties by smallest red, then blue index.
IpResult extreme_inner_product(const Dataset& ds, IpMode mode, const ClosestPairConfig& cfg, Rng& rng,
                               PipelineStats* stats = nullptr);
IpResult extreme_inner_product_bruteforce(const Dataset& ds, IpMode mode);

/// A verified pair with inner product 0, if the minimum is 0.
std::optional<IpResult> find_orthogonal_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng,
                                             PipelineStats* stats = nullptr);
std::optional<IpResult> find_orthogonal_pair_bruteforce(const Dataset& ds);

struct JaccardResult {
  std::size_t red = 0;
  std::size_t blue = 0;
  Rational coefficient;
  friend bool operator==(const JaccardResult&, const JaccardResult&) = default;
};

/// |A ∩ B| / |A ∪ B| for indicator vectors; two empty sets score 1.
Rational jaccard(const BitVector& a, const BitVector& b);
/// The same from cardinalities and intersection size.
Rational jaccard_from_counts(std::size_t d1, std::size_t d2, std::size_t ip);

/// Maximum Jaccard pair via maximum inner product per cardinality bucket pair.
JaccardResult max_jaccard_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng,
                               PipelineStats* stats = nullptr);
JaccardResult max_jaccard_pair_bruteforce(const Dataset& ds);

}  // namespace polyham
