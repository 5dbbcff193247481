#include "polyham/bitvector.hpp"

#include <bit>

#include "polyham/errors.hpp"

namespace polyham {
namespace {

std::size_t words_for(std::size_t dim) { return (dim + BitVector::kWordBits - 1) / BitVector::kWordBits; }

void check_same_dim(const BitVector& u, const BitVector& v, const char* op) {
  if (u.dim() != v.dim()) {
    throw InputError(std::string(op) + ": dimension mismatch (" + std::to_string(u.dim()) + " vs " +
                     std::to_string(v.dim()) + ")");
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

BitVector::BitVector(std::size_t dim) : dim_(dim), words_(words_for(dim), 0) {}

BitVector::BitVector(std::size_t dim, std::vector<Word> words) : dim_(dim), words_(std::move(words)) {
  words_.resize(words_for(dim), 0);
  canonicalize();
}

void BitVector::canonicalize() {
  if (const std::size_t tail = dim_ % kWordBits; tail != 0) {
    words_.back() &= (Word{1} << tail) - 1;
  }
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVectorBuilder b(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      b.set(i);
    } else if (bits[i] != '0') {
      throw InputError(std::string("invalid character '") + bits[i] + "' in 0/1 vector");
    }
  }
  return std::move(b).build();
}

BitVector BitVector::from_bits(std::span<const std::uint8_t> bits) {
  BitVectorBuilder b(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) b.set(i, bits[i] != 0);
  return std::move(b).build();
}

// Hex digits are read most-significant first: digit j covers coordinates
// 4j..4j+3 with coordinate 4j as the digit's high bit, so "a" with dim 4 is 1010.
BitVector BitVector::from_hex(std::string_view hex, std::size_t dim) {
  if (hex.size() != (dim + 3) / 4) {
    throw InputError("hex vector has " + std::to_string(hex.size()) + " digits, expected " +
                     std::to_string((dim + 3) / 4) + " for dim=" + std::to_string(dim));
  }
  BitVectorBuilder b(dim);
  for (std::size_t j = 0; j < hex.size(); ++j) {
    const int v = hex_value(hex[j]);
    if (v < 0) throw InputError(std::string("invalid hex digit '") + hex[j] + "'");
    for (int k = 0; k < 4; ++k) {
      const std::size_t i = 4 * j + static_cast<std::size_t>(k);
      const bool bit = (v >> (3 - k)) & 1;
      if (i >= dim) {
        if (bit) throw InputError("hex vector sets bits beyond dim");
        continue;
      }
      b.set(i, bit);
    }
  }
  return std::move(b).build();
}

std::size_t BitVector::weight() const noexcept {
  std::size_t w = 0;
  for (Word x : words_) w += static_cast<std::size_t>(std::popcount(x));
  return w;
}

std::string BitVector::to_string() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

std::string BitVector::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s((dim_ + 3) / 4, '0');
  for (std::size_t j = 0; j < s.size(); ++j) {
    int v = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t i = 4 * j + static_cast<std::size_t>(k);
      if (i < dim_ && (*this)[i]) v |= 1 << (3 - k);
    }
    s[j] = kDigits[v];
  }
  return s;
}

BitVectorBuilder::BitVectorBuilder(std::size_t dim) : dim_(dim), words_(words_for(dim), 0) {}

BitVectorBuilder& BitVectorBuilder::set(std::size_t i, bool value) {
  if (i >= dim_) throw InputError("bit index " + std::to_string(i) + " out of range");
  const auto mask = BitVector::Word{1} << (i % BitVector::kWordBits);
  if (value) {
    words_[i / BitVector::kWordBits] |= mask;
  } else {
    words_[i / BitVector::kWordBits] &= ~mask;
  }
  return *this;
}

BitVector BitVectorBuilder::build() && { return BitVector(dim_, std::move(words_)); }

std::size_t hamming_distance(const BitVector& u, const BitVector& v) {
  check_same_dim(u, v, "hamming_distance");
  const auto a = u.words();
  const auto b = v.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
  return d;
}

std::size_t inner_product(const BitVector& u, const BitVector& v) {
  check_same_dim(u, v, "inner_product");
  const auto a = u.words();
  const auto b = v.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return d;
}

BitVector complement(const BitVector& u) {
  std::vector<BitVector::Word> w(u.words().begin(), u.words().end());
  for (auto& x : w) x = ~x;
  return BitVector(u.dim(), std::move(w));
}

BitVector bitwise_xor(const BitVector& u, const BitVector& v) {
  check_same_dim(u, v, "bitwise_xor");
  std::vector<BitVector::Word> w(u.words().begin(), u.words().end());
  const auto b = v.words();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] ^= b[i];
  return BitVector(u.dim(), std::move(w));
}

BitVector concat(std::span<const BitVector> parts) {
  std::size_t dim = 0;
  for (const auto& p : parts) dim += p.dim();
  std::vector<BitVector::Word> w(words_for(dim), 0);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto src = p.words();
    const std::size_t shift = offset % BitVector::kWordBits;
    const std::size_t base = offset / BitVector::kWordBits;
    for (std::size_t i = 0; i < src.size(); ++i) {
      w[base + i] |= src[i] << shift;
      if (shift != 0 && base + i + 1 < w.size()) w[base + i + 1] |= src[i] >> (BitVector::kWordBits - shift);
    }
    offset += p.dim();
  }
  return BitVector(dim, std::move(w));
}

BitVector gather(const BitVector& u, std::span<const std::uint32_t> indices) {
  BitVectorBuilder b(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= u.dim()) throw InputError("gather index out of range");
    if (u[indices[j]]) b.set(j);
  }
  return std::move(b).build();
}

}  // namespace polyham
