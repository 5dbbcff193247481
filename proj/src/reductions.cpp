#include "polyham/reductions.hpp"

#include <charconv>
#include <istream>
#include <string>
#include <tuple>

#include "polyham/errors.hpp"

namespace polyham {

void IntVectors::validate() const {
  for (const auto& r : rows) {
    if (r.size() != dim) throw InputError("integer vectors have differing dimensions");
    for (auto v : r) {
      if (v > m) throw InputError("entry " + std::to_string(v) + " exceeds m = " + std::to_string(m));
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint32_t parse_u32(std::string_view s, std::size_t line) {
  s = trim(s);
  std::uint32_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError(line, "expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

IntVectors load_int_vectors(std::istream& in) {
  IntVectors out;
  bool have_m = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    if (!have_m) {
      if (!s.starts_with("m=")) throw ParseError(line, "expected header m=<int>");
      out.m = parse_u32(s.substr(2), line);
      have_m = true;
      continue;
    }
    std::vector<std::uint32_t> row;
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      row.push_back(parse_u32(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start), line));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (out.rows.empty()) out.dim = row.size();
    if (row.size() != out.dim) {
      throw ParseError(line, "expected " + std::to_string(out.dim) + " entries, got " + std::to_string(row.size()));
    }
    for (auto v : row) {
      if (v > out.m) throw ParseError(line, "entry " + std::to_string(v) + " exceeds m = " + std::to_string(out.m));
    }
    out.rows.push_back(std::move(row));
  }
  if (!have_m) throw ParseError(line, "missing header m=<int>");
  return out;
}

BitVector unary_encode(std::span<const std::uint32_t> x, std::uint32_t m) {
  BitVectorBuilder b(x.size() * m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > m) throw InputError("entry " + std::to_string(x[i]) + " exceeds m = " + std::to_string(m));
    for (std::uint32_t j = 0; j < x[i]; ++j) b.set(i * m + j);
  }
  return std::move(b).build();
}

std::size_t l1_distance(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
  if (x.size() != y.size()) throw InputError("l1 distance of vectors with differing dimensions");
  std::size_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) total += x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
  return total;
}

namespace {

void check_compatible(const IntVectors& db, const IntVectors& queries) {
  db.validate();
  queries.validate();
  if (db.rows.empty()) throw EmptyInputError("database is empty");
  if (!queries.rows.empty() && (db.dim != queries.dim || db.m != queries.m)) {
    throw InputError("database and queries differ in dimension or m");
  }
}

std::vector<BitVector> encode_all(const IntVectors& v) {
  std::vector<BitVector> out;
  out.reserve(v.rows.size());
  for (const auto& r : v.rows) out.push_back(unary_encode(r, v.m));
  return out;
}

}  // namespace

NNResult l1_batch_nn(const IntVectors& db, const IntVectors& queries, const ClosestPairConfig& cfg, Rng& rng) {
  check_compatible(db, queries);
  const auto edb = encode_all(db);
  const auto eq = encode_all(queries);
  auto res = batch_nn(edb, eq, cfg, rng, db.dim * db.m);
  for (auto& e : res.entries) {
    // Unary encoding preserves distances; recheck on the original vectors.
    if (l1_distance(db.rows[e.nn], queries.rows[e.query]) != e.distance) {
      throw std::logic_error("unary encoding changed a distance");
    }
  }
  return res;
}

std::vector<NNEntry> l1_batch_nn_bruteforce(const IntVectors& db, const IntVectors& queries) {
  check_compatible(db, queries);
  std::vector<NNEntry> out;
  for (std::size_t q = 0; q < queries.rows.size(); ++q) {
    NNEntry best{q, 0, l1_distance(db.rows[0], queries.rows[q])};
    for (std::size_t i = 1; i < db.rows.size(); ++i) {
      const auto d = l1_distance(db.rows[i], queries.rows[q]);
      if (d < best.distance) best = {q, i, d};
    }
    out.push_back(best);
  }
  return out;
}

PairResult furthest_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng, PipelineStats* stats) {
  ds.validate();
  Dataset flipped{ds.dim, ds.red, {}};
  flipped.blue.reserve(ds.blue.size());
  for (const auto& b : ds.blue) flipped.blue.push_back(complement(b));
  const auto near = closest_pair(flipped, cfg, rng, stats);
  const PairResult out{near.red, near.blue, ds.dim - near.distance};
  if (hamming_distance(ds.red[out.red], ds.blue[out.blue]) != out.distance) {
    throw std::logic_error("complement identity violated");
  }
  return out;
}

PairResult furthest_pair_bruteforce(const Dataset& ds) {
  ds.validate();
  if (ds.red.empty() || ds.blue.empty()) throw EmptyInputError("both colors must be nonempty");
  PairResult best{0, 0, hamming_distance(ds.red[0], ds.blue[0])};
  for (std::size_t r = 0; r < ds.red.size(); ++r) {
    for (std::size_t b = 0; b < ds.blue.size(); ++b) {
      const auto d = hamming_distance(ds.red[r], ds.blue[b]);
      if (d > best.distance) best = {r, b, d};
    }
  }
  return best;
}

namespace {

// Members of each weight class, in index order.
std::vector<std::vector<std::size_t>> weight_buckets(std::span<const BitVector> vs, std::size_t dim) {
  std::vector<std::vector<std::size_t>> out(dim + 1);
  for (std::size_t i = 0; i < vs.size(); ++i) out[vs[i].weight()].push_back(i);
  return out;
}

Dataset bucket_dataset(const Dataset& ds, const std::vector<std::size_t>& ri, const std::vector<std::size_t>& bi) {
  Dataset sub{ds.dim, {}, {}};
  for (auto r : ri) sub.red.push_back(ds.red[r]);
  for (auto b : bi) sub.blue.push_back(ds.blue[b]);
  return sub;
}

bool better(const IpResult& a, const IpResult& b, IpMode mode) {
  if (a.value != b.value) return mode == IpMode::kMax ? a.value > b.value : a.value < b.value;
  return std::tie(a.red, a.blue) < std::tie(b.red, b.blue);
}

// Runs the per-bucket solver: max IP is the closest pair within a bucket pair,
// min IP the furthest. Calls visit(I, J, result in original indices).
template <class Visit>
void for_each_bucket_optimum(const Dataset& ds, IpMode mode, const ClosestPairConfig& cfg, Rng& rng,
                             PipelineStats* stats, Visit&& visit) {
  ds.validate();
  if (ds.red.empty() || ds.blue.empty()) throw EmptyInputError("both colors must be nonempty");
  const auto rb = weight_buckets(ds.red, ds.dim);
  const auto bb = weight_buckets(ds.blue, ds.dim);
  for (std::size_t i = 0; i <= ds.dim; ++i) {
    if (rb[i].empty()) continue;
    for (std::size_t j = 0; j <= ds.dim; ++j) {
      if (bb[j].empty()) continue;
      const auto sub = bucket_dataset(ds, rb[i], bb[j]);
      Rng bucket_rng = rng.split("bucket", i * (ds.dim + 1) + j);
      const auto pr = mode == IpMode::kMax ? closest_pair(sub, cfg, bucket_rng, stats)
                                           : furthest_pair(sub, cfg, bucket_rng, stats);
      const IpResult res{rb[i][pr.red], bb[j][pr.blue], (i + j - pr.distance) / 2};
      if (inner_product(ds.red[res.red], ds.blue[res.blue]) != res.value) {
        throw std::logic_error("bucket identity violated");
      }
      visit(i, j, res);
    }
  }
}

}  // namespace

IpResult extreme_inner_product(const Dataset& ds, IpMode mode, const ClosestPairConfig& cfg, Rng& rng,
                               PipelineStats* stats) {
  std::optional<IpResult> best;
  for_each_bucket_optimum(ds, mode, cfg, rng, stats, [&](std::size_t, std::size_t, const IpResult& r) {
    if (!best || better(r, *best, mode)) best = r;
  });
  return *best;
}

IpResult extreme_inner_product_bruteforce(const Dataset& ds, IpMode mode) {
  ds.validate();
  if (ds.red.empty() || ds.blue.empty()) throw EmptyInputError("both colors must be nonempty");
  IpResult best{0, 0, inner_product(ds.red[0], ds.blue[0])};
  for (std::size_t r = 0; r < ds.red.size(); ++r) {
    for (std::size_t b = 0; b < ds.blue.size(); ++b) {
      const IpResult cand{r, b, inner_product(ds.red[r], ds.blue[b])};
      if (better(cand, best, mode)) best = cand;
    }
  }
  return best;
}

std::optional<IpResult> find_orthogonal_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng,
                                             PipelineStats* stats) {
  const auto r = extreme_inner_product(ds, IpMode::kMin, cfg, rng, stats);
  if (r.value != 0 || inner_product(ds.red[r.red], ds.blue[r.blue]) != 0) return std::nullopt;
  return r;
}

std::optional<IpResult> find_orthogonal_pair_bruteforce(const Dataset& ds) {
  const auto r = extreme_inner_product_bruteforce(ds, IpMode::kMin);
  if (r.value != 0) return std::nullopt;
  return r;
}

Rational jaccard_from_counts(std::size_t d1, std::size_t d2, std::size_t ip) {
  if (ip > d1 || ip > d2) throw ParameterError("intersection larger than a set");
  const auto uni = static_cast<std::int64_t>(d1 + d2 - ip);
  if (uni == 0) return Rational(1);
  return Rational(static_cast<std::int64_t>(ip), uni);
}

Rational jaccard(const BitVector& a, const BitVector& b) {
  return jaccard_from_counts(a.weight(), b.weight(), inner_product(a, b));
}

namespace {

bool better_jaccard(const JaccardResult& a, const JaccardResult& b) {
  if (a.coefficient != b.coefficient) return a.coefficient > b.coefficient;
  return std::tie(a.red, a.blue) < std::tie(b.red, b.blue);
}

}  // namespace

JaccardResult max_jaccard_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng, PipelineStats* stats) {
  std::optional<JaccardResult> best;
  // Within a cardinality bucket pair the coefficient increases with the
  // intersection, so the bucket's max inner product pair is its best pair.
  for_each_bucket_optimum(ds, IpMode::kMax, cfg, rng, stats, [&](std::size_t i, std::size_t j, const IpResult& r) {
    const JaccardResult cand{r.red, r.blue, jaccard_from_counts(i, j, r.value)};
    if (!best || better_jaccard(cand, *best)) best = cand;
  });
  return *best;
}

JaccardResult max_jaccard_pair_bruteforce(const Dataset& ds) {
  ds.validate();
  if (ds.red.empty() || ds.blue.empty()) throw EmptyInputError("both colors must be nonempty");
  JaccardResult best{0, 0, jaccard(ds.red[0], ds.blue[0])};
  for (std::size_t r = 0; r < ds.red.size(); ++r) {
    for (std::size_t b = 0; b < ds.blue.size(); ++b) {
      const JaccardResult cand{r, b, jaccard(ds.red[r], ds.blue[b])};
      if (better_jaccard(cand, best)) best = cand;
    }
  }
  return best;
}

}  // namespace polyham
