#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyham/bitvector.hpp"
#include "polyham/polynomial.hpp"

namespace polyham {

/// Dense GF(2) matrix, rows packed into 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_((cols + 63) / 64), data_(rows * stride_, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t stride() const noexcept { return stride_; }
  bool get(std::size_t r, std::size_t c) const { return (data_[r * stride_ + c / 64] >> (c % 64)) & 1U; }
  void set(std::size_t r, std::size_t c, bool v = true) {
    auto& w = data_[r * stride_ + c / 64];
    const auto mask = std::uint64_t{1} << (c % 64);
    w = v ? (w | mask) : (w & ~mask);
  }
  std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }
  std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * stride_, stride_}; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
  std::vector<std::uint64_t> data_;
};

/// A monomial over (x, y) split into its x-side and y-side factors; y indices
/// are relative to the start of the y block.
struct SplitMonomial {
  Monomial x;
  Monomial y;
  friend bool operator==(const SplitMonomial&, const SplitMonomial&) = default;
};

/// Splits every monomial of p at x_dim: variables below x_dim are x-side.
std::vector<SplitMonomial> split_monomials(const Gf2Polynomial& p, std::size_t x_dim);

/// Feature matrix: entry (g, m) = monomials[m] evaluated on points[g].
BitMatrix feature_matrix(std::span<const BitVector> points, std::span<const Monomial> monomials);

struct PairEvalOptions {
  /// Output tile edge; tiles are the unit of parallel work.
  std::size_t tile = 256;
  /// Use the four-Russians table kernel instead of AND + popcount.
  bool four_russians = false;
  /// Worker cap; 0 means all cores.
  std::size_t threads = 0;
  /// Maximum monomial count accepted.
  std::size_t budget = std::size_t{1} << 20;
};

/// F * G^T over GF(2) for F (a x m) and G (b x m).
BitMatrix gf2_product_transposed(const BitMatrix& f, const BitMatrix& g, const PairEvalOptions& options = {});
/// Same product by a word-free reference loop, for testing.
BitMatrix gf2_product_transposed_reference(const BitMatrix& f, const BitMatrix& g);

/// Output (i, j) = p(a_i, b_j) for every pair, where p is over the variables
/// of a_i followed by those of b_j. BudgetError above options.budget monomials.
BitMatrix eval_all_pairs(const Gf2Polynomial& p, std::span<const BitVector> a, std::span<const BitVector> b,
                         const PairEvalOptions& options = {});
/// Pointwise oracle for eval_all_pairs.
BitMatrix eval_all_pairs_pointwise(const Gf2Polynomial& p, std::span<const BitVector> a, std::span<const BitVector> b);

}  // namespace polyham
