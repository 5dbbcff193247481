#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyham {

/// Fixed-dimension packed 0/1 vector.
///
/// Bits are stored little-endian in 64-bit words: coordinate i lives in word
/// i / 64 at bit i % 64. Bits at positions >= dim are always zero, so storage
/// equality is vector equality and distance kernels never mask.
class BitVector {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  /// All-zero vector of dimension dim.
  explicit BitVector(std::size_t dim);
  /// From raw words; high garbage above dim is cleared.
  BitVector(std::size_t dim, std::vector<Word> words);

  /// Parses a string of '0'/'1' characters; throws InputError otherwise.
  static BitVector from_string(std::string_view bits);
  static BitVector from_bits(std::span<const std::uint8_t> bits);
  static BitVector from_hex(std::string_view hex, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const Word> words() const noexcept { return words_; }
  bool operator[](std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  /// Hamming weight |x|.
  std::size_t weight() const noexcept;

  std::string to_string() const;
  std::string to_hex() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void canonicalize();

  std::size_t dim_ = 0;
  std::vector<Word> words_;
};

/// Builder for BitVector; vectors themselves are immutable once built.
class BitVectorBuilder {
 public:
  explicit BitVectorBuilder(std::size_t dim);
  BitVectorBuilder& set(std::size_t i, bool value = true);
  BitVector build() &&;

 private:
  std::size_t dim_;
  std::vector<BitVector::Word> words_;
};

std::size_t hamming_distance(const BitVector& u, const BitVector& v);
std::size_t inner_product(const BitVector& u, const BitVector& v);
BitVector complement(const BitVector& u);
BitVector bitwise_xor(const BitVector& u, const BitVector& v);
/// Concatenation of the given vectors in order (used to lay out group blocks).
BitVector concat(std::span<const BitVector> parts);
/// Coordinates gathered by index: out[j] = u[indices[j]].
BitVector gather(const BitVector& u, std::span<const std::uint32_t> indices);

}  // namespace polyham
