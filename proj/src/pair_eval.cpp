#include "polyham/pair_eval.hpp"

#include <algorithm>
#include <bit>

#include "polyham/errors.hpp"
#include "polyham/parallel.hpp"

namespace polyham {

std::vector<SplitMonomial> split_monomials(const Gf2Polynomial& p, std::size_t x_dim) {
  if (x_dim > p.nvars()) throw ParameterError("x block is larger than the polynomial's variable count");
  std::vector<SplitMonomial> out;
  out.reserve(p.size());
  for (const auto& m : p.sorted_terms()) {
    std::vector<std::uint32_t> xs, ys;
    for (auto v : m.vars()) {
      if (v >= p.nvars()) throw InputError("monomial variable out of range");
      if (v < x_dim) {
        xs.push_back(v);
      } else {
        ys.push_back(static_cast<std::uint32_t>(v - x_dim));
      }
    }
    out.push_back({Monomial(std::move(xs)), Monomial(std::move(ys))});
  }
  return out;
}

BitMatrix feature_matrix(std::span<const BitVector> points, std::span<const Monomial> monomials) {
  BitMatrix out(points.size(), monomials.size());
  for (std::size_t g = 0; g < points.size(); ++g) {
    for (std::size_t m = 0; m < monomials.size(); ++m) {
      if (monomials[m].eval(points[g])) out.set(g, m);
    }
  }
  return out;
}

namespace {

void product_tile_popcount(const BitMatrix& f, const BitMatrix& g, BitMatrix& out, std::size_t r0, std::size_t r1,
                           std::size_t c0, std::size_t c1) {
  const auto words = f.stride();
  for (std::size_t i = r0; i < r1; ++i) {
    const auto fi = f.row(i);
    auto oi = out.row(i);
    for (std::size_t j = c0; j < c1; ++j) {
      const auto gj = g.row(j);
      std::uint64_t acc = 0;
      for (std::size_t w = 0; w < words; ++w) acc ^= fi[w] & gj[w];
      if (std::popcount(acc) & 1) oi[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
}

// Four-Russians: for each chunk of 8 inner indices, tabulate the XOR of every
// subset of the corresponding rows of G^T (restricted to this column tile),
// then each output row adds one table entry per chunk.
void product_tile_m4rm(const BitMatrix& f, const BitMatrix& g, BitMatrix& out, std::size_t r0, std::size_t r1,
                       std::size_t c0, std::size_t c1) {
  const std::size_t inner = f.cols();
  const std::size_t width = c1 - c0;
  const std::size_t tw = (width + 63) / 64;
  // ht[m] = column m of g restricted to rows c0..c1, packed.
  std::vector<std::uint64_t> ht(inner * tw, 0);
  for (std::size_t j = c0; j < c1; ++j) {
    const auto gj = g.row(j);
    const auto bit = std::uint64_t{1} << ((j - c0) % 64);
    const auto word = (j - c0) / 64;
    for (std::size_t m = 0; m < inner; ++m) {
      if ((gj[m / 64] >> (m % 64)) & 1U) ht[m * tw + word] |= bit;
    }
  }
  std::vector<std::uint64_t> table(256 * tw);
  std::vector<std::uint64_t> acc((r1 - r0) * tw, 0);
  for (std::size_t c = 0; c * 8 < inner; ++c) {
    const std::size_t base = c * 8;
    const std::size_t bits = std::min<std::size_t>(8, inner - base);
    std::fill(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(tw), 0);
    // table[v] = table[v minus its top bit] ^ row(top bit).
    for (std::size_t v = 1; v < (std::size_t{1} << bits); ++v) {
      const auto top = static_cast<std::size_t>(std::bit_width(v)) - 1;
      const auto prev = v ^ (std::size_t{1} << top);
      for (std::size_t w = 0; w < tw; ++w) table[v * tw + w] = table[prev * tw + w] ^ ht[(base + top) * tw + w];
    }
    for (std::size_t i = r0; i < r1; ++i) {
      const auto v = (f.row(i)[base / 64] >> (base % 64)) & 0xffU;
      if (v == 0) continue;
      auto* a = acc.data() + (i - r0) * tw;
      const auto* t = table.data() + v * tw;
      for (std::size_t w = 0; w < tw; ++w) a[w] ^= t[w];
    }
  }
  // c0 is a multiple of 64, so tile words align with output words.
  for (std::size_t i = r0; i < r1; ++i) {
    auto oi = out.row(i);
    for (std::size_t w = 0; w < tw; ++w) oi[c0 / 64 + w] = acc[(i - r0) * tw + w];
  }
}

}  // namespace

BitMatrix gf2_product_transposed(const BitMatrix& f, const BitMatrix& g, const PairEvalOptions& options) {
  if (f.cols() != g.cols()) throw InputError("inner dimensions differ");
  BitMatrix out(f.rows(), g.rows());
  if (f.rows() == 0 || g.rows() == 0) return out;
  const std::size_t row_tile = std::max<std::size_t>(1, options.tile);
  // Column tiles cover whole words so concurrent tiles never share a word.
  const std::size_t col_tile = std::max<std::size_t>(64, (options.tile + 63) / 64 * 64);
  const std::size_t row_tiles = (f.rows() + row_tile - 1) / row_tile;
  const std::size_t col_tiles = (g.rows() + col_tile - 1) / col_tile;
  parallel_for(row_tiles * col_tiles, options.threads, [&](std::size_t t) {
    const std::size_t r0 = (t / col_tiles) * row_tile, c0 = (t % col_tiles) * col_tile;
    const std::size_t r1 = std::min(f.rows(), r0 + row_tile), c1 = std::min(g.rows(), c0 + col_tile);
    if (options.four_russians) {
      product_tile_m4rm(f, g, out, r0, r1, c0, c1);
    } else {
      product_tile_popcount(f, g, out, r0, r1, c0, c1);
    }
  });
  return out;
}

BitMatrix gf2_product_transposed_reference(const BitMatrix& f, const BitMatrix& g) {
  if (f.cols() != g.cols()) throw InputError("inner dimensions differ");
  BitMatrix out(f.rows(), g.rows());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < g.rows(); ++j) {
      bool v = false;
      for (std::size_t m = 0; m < f.cols(); ++m) v ^= f.get(i, m) && g.get(j, m);
      out.set(i, j, v);
    }
  }
  return out;
}

namespace {

std::size_t common_dim(std::span<const BitVector> points, const char* side) {
  if (points.empty()) return 0;
  const auto d = points[0].dim();
  for (const auto& p : points) {
    if (p.dim() != d) throw InputError(std::string(side) + " points have differing dimensions");
  }
  return d;
}

void check_shapes(const Gf2Polynomial& p, std::size_t x_dim, std::size_t y_dim, bool has_a, bool has_b) {
  if (has_a && has_b && x_dim + y_dim != p.nvars()) throw InputError("point dimensions do not match the polynomial");
  if (has_a && x_dim > p.nvars()) throw InputError("point dimensions do not match the polynomial");
  if (has_b && y_dim > p.nvars()) throw InputError("point dimensions do not match the polynomial");
}

}  // namespace

BitMatrix eval_all_pairs(const Gf2Polynomial& p, std::span<const BitVector> a, std::span<const BitVector> b,
                         const PairEvalOptions& options) {
  const auto x_dim = common_dim(a, "A");
  const auto y_dim = common_dim(b, "B");
  check_shapes(p, x_dim, y_dim, !a.empty(), !b.empty());
  if (p.size() > options.budget) {
    throw BudgetError("all-pairs evaluation exceeds the monomial budget", static_cast<double>(p.size()));
  }
  if (a.empty() || b.empty()) return BitMatrix(a.size(), b.size());
  const auto parts = split_monomials(p, x_dim);
  std::vector<Monomial> xs, ys;
  xs.reserve(parts.size());
  ys.reserve(parts.size());
  for (const auto& sm : parts) {
    xs.push_back(sm.x);
    ys.push_back(sm.y);
  }
  return gf2_product_transposed(feature_matrix(a, xs), feature_matrix(b, ys), options);
}

BitMatrix eval_all_pairs_pointwise(const Gf2Polynomial& p, std::span<const BitVector> a,
                                   std::span<const BitVector> b) {
  const auto x_dim = common_dim(a, "A");
  const auto y_dim = common_dim(b, "B");
  check_shapes(p, x_dim, y_dim, !a.empty(), !b.empty());
  BitMatrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const BitVector parts[] = {a[i], b[j]};
      out.set(i, j, p.eval(concat(parts)));
    }
  }
  return out;
}

}  // namespace polyham
