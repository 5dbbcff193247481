#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyham/bitvector.hpp"
#include "polyham/dataset.hpp"
#include "polyham/pair_eval.hpp"
#include "polyham/rng.hpp"

namespace polyham {

/// How a group-pair vote is evaluated when the group size exceeds 1. kAuto
/// expands only when the worst-case expansion fits the budget and costs less
/// than direct evaluation (at most s^2 monomials per group on the smaller side).
enum class EvalStrategy { kAuto, kMatrix, kStructural };

struct ClosestPairConfig {
  /// Group size; nullopt selects it from n and the dimension.
  std::optional<std::size_t> group_size;
  /// u in the automatic rule s = n^{1/(u c log^2 c)}.
  double u_param = 16.0;
  /// Amplification rounds; nullopt means ceil(10 log2 n).
  std::optional<std::size_t> rounds;
  /// Monomial budget for expanded polynomials; 0 forces brute force.
  std::size_t budget = std::size_t{1} << 20;
  /// Skip the polynomial pipeline entirely.
  bool brute_force = false;
  /// Pad the last group with copies of a member (otherwise ragged groups
  /// are brute-forced).
  bool pad_groups = true;
  EvalStrategy strategy = EvalStrategy::kAuto;
  /// Tiling, kernel and thread settings for all-pairs evaluation.
  PairEvalOptions eval;
};

/// How the close-pair search was carried out.
enum class PipelineMode { kBruteForce, kMatrix, kStructural };
std::string to_string(PipelineMode mode);

struct PipelineStats {
  std::size_t group_size = 1;
  std::size_t rounds = 0;
  PipelineMode mode = PipelineMode::kBruteForce;
  std::size_t oracle_calls = 0;
  std::size_t flagged_group_pairs = 0;
  /// Flagged group pairs without a verified close pair.
  std::size_t rejected_group_pairs = 0;
  /// Group pairs decided by direct search instead of the polynomial vote.
  std::size_t fallback_group_pairs = 0;

  void merge(const PipelineStats& other);
};

struct PairResult {
  std::size_t red = 0;
  std::size_t blue = 0;
  std::size_t distance = 0;
  friend bool operator==(const PairResult&, const PairResult&) = default;
};

/// Exact minimum-distance pair; ties by smallest red, then blue index.
PairResult closest_pair_bruteforce(const Dataset& ds);

/// The automatic group size for sets of size n in dimension dim, before the
/// budget check.
std::size_t auto_group_size(std::size_t n, std::size_t dim, double u_param);
/// ceil(10 log2 n), at least 1.
std::size_t auto_rounds(std::size_t n);

/// Some pair at distance <= k, whp if one exists; every returned pair is
/// verified. Among the verified pairs found, the one with the smallest
/// (red, blue) is returned.
std::optional<PairResult> bichromatic_close_pair(const Dataset& ds, std::size_t k, const ClosestPairConfig& cfg,
                                                 Rng& rng, PipelineStats* stats = nullptr);

/// Minimum-distance pair via galloping and binary search over k.
PairResult closest_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng, PipelineStats* stats = nullptr);

struct NNEntry {
  std::size_t query = 0;
  std::size_t nn = 0;
  std::size_t distance = 0;
  friend bool operator==(const NNEntry&, const NNEntry&) = default;
};

struct NNResult {
  std::vector<NNEntry> entries;
  /// Outer group size (ceil(sqrt n)).
  std::size_t outer_group_size = 0;
  std::size_t max_distance = 0;
  PipelineStats stats;
};

/// Exact nearest database vector per query; ties by smallest database index.
std::vector<NNEntry> batch_nn_bruteforce(std::span<const BitVector> db, std::span<const BitVector> queries);

/// Batch nearest neighbors by descending distance levels over group pairs.
/// max_distance is the largest possible distance (the dimension, unless a
/// reduction supplies a tighter value).
NNResult batch_nn(std::span<const BitVector> db, std::span<const BitVector> queries, const ClosestPairConfig& cfg,
                  Rng& rng, std::optional<std::size_t> max_distance = std::nullopt);

}  // namespace polyham
