#include "polyham/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "polyham/errors.hpp"
#include "polyham/hamming_poly.hpp"
#include "polyham/parallel.hpp"
#include "polyham/threshold.hpp"

namespace polyham {

std::string to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kBruteForce:
      return "brute-force";
    case PipelineMode::kMatrix:
      return "matrix";
    case PipelineMode::kStructural:
      return "structural";
  }
  return "unknown";
}

void PipelineStats::merge(const PipelineStats& other) {
  group_size = std::max(group_size, other.group_size);
  rounds = std::max(rounds, other.rounds);
  mode = std::max(mode, other.mode);
  oracle_calls += other.oracle_calls;
  flagged_group_pairs += other.flagged_group_pairs;
  rejected_group_pairs += other.rejected_group_pairs;
  fallback_group_pairs += other.fallback_group_pairs;
}

namespace {

void check_sides(const Dataset& ds) {
  ds.validate();
  if (ds.red.empty() || ds.blue.empty()) throw EmptyInputError("both colors must be nonempty");
}

double log2_size(std::size_t n) { return std::log2(static_cast<double>(std::max<std::size_t>(n, 1))); }

using Index = std::uint32_t;

// Decides "is some red[i] x blue[j] pair within k" on index subsets.
class CloseOracle {
 public:
  CloseOracle(std::span<const BitVector> red, std::span<const BitVector> blue, std::size_t dim,
              const ClosestPairConfig& cfg, std::size_t global_n)
      : red_(red), blue_(blue), dim_(dim), cfg_(cfg), rounds_(cfg.rounds.value_or(auto_rounds(global_n))) {
    if (rounds_ == 0) throw ParameterError("rounds must be positive");
    if (cfg.group_size && *cfg.group_size == 0) throw ParameterError("group size must be positive");
  }

  std::optional<PairResult> find(std::span<const Index> ri, std::span<const Index> bi, std::size_t k, Rng& rng,
                                 PipelineStats& stats) {
    ++stats.oracle_calls;
    if (ri.empty() || bi.empty()) return std::nullopt;
    const std::size_t s = choose_group_size(std::max(ri.size(), bi.size()), k);
    stats.group_size = std::max(stats.group_size, s);
    if (s <= 1) return brute(ri, bi, k);
    stats.rounds = std::max(stats.rounds, rounds_);
    return pipeline(ri, bi, k, s, rng, stats);
  }

 private:
  std::optional<PairResult> brute(std::span<const Index> ri, std::span<const Index> bi, std::size_t k) const {
    std::optional<PairResult> best;
    for (auto r : ri) {
      if (best && r > best->red) continue;
      for (auto b : bi) {
        const auto d = hamming_distance(red_[r], blue_[b]);
        if (d > k) continue;
        const PairResult cand{r, b, d};
        if (!best || std::tie(cand.red, cand.blue) < std::tie(best->red, best->blue)) best = cand;
      }
    }
    return best;
  }

  std::size_t choose_group_size(std::size_t n, std::size_t k) {
    if (cfg_.brute_force || cfg_.budget == 0) return 1;
    if (cfg_.group_size) return std::min(*cfg_.group_size, n);
    std::size_t s = std::min(auto_group_size(n, dim_, cfg_.u_param), n);
    while (s > 1 && !fits(s, k)) s /= 2;
    return s;
  }

  // Worst-case expansion size (s^2 P + 1)^2; -1 when the inner polynomial
  // itself cannot be expanded within the budget.
  BigInt worst_case(std::size_t s, std::size_t k) {
    const std::lock_guard lock(mu_);
    const auto key = std::make_pair(s, k);
    if (auto it = worst_.find(key); it != worst_.end()) return it->second;
    BigInt out = -1;
    try {
      Rng probe(0);
      const auto hp = HammingPolynomial::sample({s, dim_, k}, probe, sampler_);
      const BigInt per_side = hp.per_pair_monomials() * static_cast<unsigned long>(s * s) + 1;
      out = per_side * per_side;
    } catch (const BudgetError&) {
    }
    worst_.emplace(key, out);
    return out;
  }

  bool fits(std::size_t s, std::size_t k) {
    const auto w = worst_case(s, k);
    return w >= 0 && w <= BigInt(static_cast<unsigned long>(cfg_.budget));
  }

  struct Groups {
    std::vector<std::vector<Index>> members;  // padded to s when complete
    std::vector<bool> ragged;
  };

  Groups make_groups(std::span<const Index> idx, std::size_t s) const {
    Groups g;
    for (std::size_t start = 0; start < idx.size(); start += s) {
      std::vector<Index> m(idx.begin() + static_cast<std::ptrdiff_t>(start),
                           idx.begin() + static_cast<std::ptrdiff_t>(std::min(idx.size(), start + s)));
      bool ragged = m.size() < s;
      if (ragged && cfg_.pad_groups) {
        m.resize(s, m.front());
        ragged = false;
      }
      g.members.push_back(std::move(m));
      g.ragged.push_back(ragged);
    }
    return g;
  }

  std::optional<PairResult> pipeline(std::span<const Index> ri, std::span<const Index> bi, std::size_t k,
                                     std::size_t s, Rng& rng, PipelineStats& stats) {
    const auto rg = make_groups(ri, s);
    const auto bg = make_groups(bi, s);
    const std::size_t nr = rg.members.size(), nb = bg.members.size();

    std::vector<HammingPolynomial> polys;
    polys.reserve(rounds_);
    for (std::size_t r = 0; r < rounds_; ++r) {
      Rng round = rng.split("round", r);
      polys.push_back(HammingPolynomial::sample({s, dim_, k}, round, sampler_));
    }
    // Expand only when the worst case for this (s, k) fits the budget.
    bool expand = cfg_.strategy != EvalStrategy::kStructural && fits(s, k);
    if (expand && cfg_.strategy == EvalStrategy::kAuto) {
      expand = worst_case(s, k) <= BigInt(static_cast<unsigned long>(s * s)) * static_cast<unsigned long>(std::min(nr, nb));
    }
    const auto mode = expand ? PipelineMode::kMatrix : PipelineMode::kStructural;
    stats.mode = std::max(stats.mode, mode);

    std::vector<std::uint32_t> votes(nr * nb, 0);
    std::vector<std::uint8_t> direct(nr * nb, 0);
    for (std::size_t g = 0; g < nr; ++g) {
      for (std::size_t h = 0; h < nb; ++h) direct[g * nb + h] = rg.ragged[g] || bg.ragged[h];
    }

    if (mode == PipelineMode::kMatrix) {
      // Complete groups as points of dimension s * dim on each side.
      std::vector<std::size_t> ra, ba;
      std::vector<BitVector> a, b;
      const auto points = [&](const Groups& gs, std::span<const BitVector> vecs, std::vector<std::size_t>& ids,
                              std::vector<BitVector>& out) {
        std::vector<BitVector> parts;
        for (std::size_t g = 0; g < gs.members.size(); ++g) {
          if (gs.ragged[g]) continue;
          parts.clear();
          for (auto i : gs.members[g]) parts.push_back(vecs[i]);
          ids.push_back(g);
          out.push_back(concat(parts));
        }
      };
      points(rg, red_, ra, a);
      points(bg, blue_, ba, b);
      PairEvalOptions opt = cfg_.eval;
      opt.budget = cfg_.budget;
      for (const auto& hp : polys) {
        const auto m = eval_all_pairs(hp.expand(cfg_.budget), a, b, opt);
        for (std::size_t i = 0; i < a.size(); ++i) {
          for (std::size_t j = 0; j < b.size(); ++j) votes[ra[i] * nb + ba[j]] += m.get(i, j);
        }
      }
    } else {
      // All symmetric inner polynomials of one draw share their weight table
      // when they are exact, so the inner bits are computed once per pair.
      bool shared_table = true;
      for (const auto& hp : polys) {
        shared_table = shared_table && hp.inner_is_symmetric() && &hp.weight_table() == &polys.front().weight_table();
      }
      parallel_for(nr, cfg_.eval.threads, [&](std::size_t g) {
        std::vector<std::uint64_t> bits((s * s + 63) / 64);
        for (std::size_t h = 0; h < nb; ++h) {
          if (direct[g * nb + h]) continue;
          const auto& xs = rg.members[g];
          const auto& ys = bg.members[h];
          const auto fill = [&](const HammingPolynomial& hp) {
            std::fill(bits.begin(), bits.end(), 0);
            for (std::size_t i = 0; i < s; ++i) {
              for (std::size_t j = 0; j < s; ++j) {
                const bool v = hp.inner_is_symmetric()
                                   ? hp.weight_table()[hamming_distance(red_[xs[i]], blue_[ys[j]])] != 0
                                   : hp.inner_bit(bitwise_xor(red_[xs[i]], blue_[ys[j]]));
                if (v) bits[(i * s + j) / 64] |= std::uint64_t{1} << ((i * s + j) % 64);
              }
            }
          };
          if (shared_table) fill(polys.front());
          std::uint32_t count = 0;
          for (const auto& hp : polys) {
            if (!shared_table) fill(hp);
            count += hp.combine(bits);
          }
          votes[g * nb + h] = count;
        }
      });
    }

    std::optional<PairResult> best;
    for (std::size_t g = 0; g < nr; ++g) {
      for (std::size_t h = 0; h < nb; ++h) {
        const bool flagged = 2 * votes[g * nb + h] > rounds_;
        if (direct[g * nb + h]) {
          ++stats.fallback_group_pairs;
        } else if (flagged) {
          ++stats.flagged_group_pairs;
        } else {
          continue;
        }
        const auto found = brute(rg.members[g], bg.members[h], k);
        if (!found) {
          if (!direct[g * nb + h]) ++stats.rejected_group_pairs;
          continue;
        }
        if (!best || std::tie(found->red, found->blue) < std::tie(best->red, best->blue)) best = found;
      }
    }
    return best;
  }

  std::span<const BitVector> red_;
  std::span<const BitVector> blue_;
  std::size_t dim_;
  const ClosestPairConfig& cfg_;
  std::size_t rounds_;
  ThresholdSampler sampler_;
  std::mutex mu_;
  std::map<std::pair<std::size_t, std::size_t>, BigInt> worst_;
};

std::vector<Index> iota_indices(std::size_t n) {
  std::vector<Index> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Index>(i);
  return v;
}

}  // namespace

PairResult closest_pair_bruteforce(const Dataset& ds) {
  check_sides(ds);
  PairResult best{0, 0, std::numeric_limits<std::size_t>::max()};
  for (std::size_t r = 0; r < ds.red.size(); ++r) {
    for (std::size_t b = 0; b < ds.blue.size(); ++b) {
      const auto d = hamming_distance(ds.red[r], ds.blue[b]);
      if (d < best.distance) best = {r, b, d};
    }
  }
  return best;
}

std::size_t auto_group_size(std::size_t n, std::size_t dim, double u_param) {
  const double logn = log2_size(n);
  const double c = logn > 0 ? std::max(2.0, static_cast<double>(dim) / logn) : 2.0;
  const double exponent = 1.0 / (u_param * c * std::log2(c) * std::log2(c));
  const double s = std::floor(std::pow(static_cast<double>(n), exponent));
  if (s >= static_cast<double>(n)) return std::max<std::size_t>(2, n);
  return std::max<std::size_t>(2, static_cast<std::size_t>(s));
}

std::size_t auto_rounds(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(10.0 * log2_size(n))));
}

std::optional<PairResult> bichromatic_close_pair(const Dataset& ds, std::size_t k, const ClosestPairConfig& cfg,
                                                 Rng& rng, PipelineStats* stats) {
  check_sides(ds);
  if (k >= ds.dim) throw ParameterError("k must be smaller than the dimension");
  const std::size_t n = std::max(ds.red.size(), ds.blue.size());
  CloseOracle oracle(ds.red, ds.blue, ds.dim, cfg, n);
  const auto ri = iota_indices(ds.red.size());
  const auto bi = iota_indices(ds.blue.size());
  PipelineStats local;
  auto out = oracle.find(ri, bi, k, rng, local);
  if (stats) stats->merge(local);
  return out;
}

PairResult closest_pair(const Dataset& ds, const ClosestPairConfig& cfg, Rng& rng, PipelineStats* stats) {
  check_sides(ds);
  if (cfg.brute_force || ds.dim == 0) return closest_pair_bruteforce(ds);
  const std::size_t n = std::max(ds.red.size(), ds.blue.size());
  CloseOracle oracle(ds.red, ds.blue, ds.dim, cfg, n);
  const auto ri = iota_indices(ds.red.size());
  const auto bi = iota_indices(ds.blue.size());
  PipelineStats local;
  const auto probe = [&](std::size_t k) {
    Rng level = rng.split("level", k);
    return oracle.find(ri, bi, k, level, local);
  };
  // Gallop k = 0, 1, 3, 7, ... then binary search in (last miss, first hit].
  std::optional<PairResult> best;
  std::int64_t miss = -1;
  std::size_t hit = 0;
  for (std::size_t k = 0;; k = std::min(ds.dim - 1, 2 * k + 1)) {
    if (auto r = probe(k)) {
      best = r;
      hit = k;
      break;
    }
    miss = static_cast<std::int64_t>(k);
    if (k == ds.dim - 1) break;
  }
  if (!best) {
    // Every pair is at distance dim (or the search missed); report a real pair.
    if (stats) stats->merge(local);
    return {0, 0, hamming_distance(ds.red[0], ds.blue[0])};
  }
  while (miss + 1 < static_cast<std::int64_t>(hit)) {
    const auto mid = static_cast<std::size_t>((miss + static_cast<std::int64_t>(hit)) / 2);
    if (auto r = probe(mid)) {
      best = r;
      hit = mid;
    } else {
      miss = static_cast<std::int64_t>(mid);
    }
  }
  if (stats) stats->merge(local);
  return *best;
}

std::vector<NNEntry> batch_nn_bruteforce(std::span<const BitVector> db, std::span<const BitVector> queries) {
  if (db.empty()) throw EmptyInputError("database is empty");
  std::vector<NNEntry> out;
  out.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    NNEntry e{q, 0, std::numeric_limits<std::size_t>::max()};
    for (std::size_t i = 0; i < db.size(); ++i) {
      const auto d = hamming_distance(db[i], queries[q]);
      if (d < e.distance) {
        e.nn = i;
        e.distance = d;
      }
    }
    out.push_back(e);
  }
  return out;
}

NNResult batch_nn(std::span<const BitVector> db, std::span<const BitVector> queries, const ClosestPairConfig& cfg,
                  Rng& rng, std::optional<std::size_t> max_distance) {
  if (db.empty()) throw EmptyInputError("database is empty");
  const std::size_t dim = db.front().dim();
  for (const auto& v : db) {
    if (v.dim() != dim) throw InputError("database vectors have differing dimensions");
  }
  for (const auto& v : queries) {
    if (v.dim() != dim) throw InputError("query dimension does not match the database");
  }
  const std::size_t max_d = max_distance.value_or(dim);
  if (max_d > dim) throw ParameterError("max distance exceeds the dimension");

  NNResult result;
  result.max_distance = max_d;
  const std::size_t n = std::max(db.size(), queries.size());
  const auto outer = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  result.outer_group_size = outer;
  if (cfg.brute_force || queries.empty()) {
    result.entries = batch_nn_bruteforce(db, queries);
    return result;
  }

  CloseOracle oracle(db, queries, dim, cfg, n);
  std::vector<std::vector<Index>> db_groups;
  for (std::size_t start = 0; start < db.size(); start += outer) {
    std::vector<Index> g;
    for (std::size_t i = start; i < std::min(db.size(), start + outer); ++i) g.push_back(static_cast<Index>(i));
    db_groups.push_back(std::move(g));
  }

  // table[q] ends as the smallest level at which q met a database vector.
  std::vector<std::size_t> table(queries.size(), max_d);
  // Smallest verified distance seen per query; such a query needs no search at
  // levels at or above it.
  std::vector<std::size_t> known(queries.size(), std::numeric_limits<std::size_t>::max());
  std::vector<Index> candidates = iota_indices(queries.size());

  for (std::size_t level = max_d; level-- > 0 && !candidates.empty();) {
    std::vector<Index> pending, matched;
    for (auto q : candidates) (known[q] <= level ? matched : pending).push_back(q);
    std::vector<std::vector<Index>> query_groups;
    for (std::size_t start = 0; start < pending.size(); start += outer) {
      query_groups.emplace_back(pending.begin() + static_cast<std::ptrdiff_t>(start),
                                pending.begin() + static_cast<std::ptrdiff_t>(std::min(pending.size(), start + outer)));
    }
    const Rng level_rng = rng.split("level", level);
    std::vector<std::vector<Index>> found(query_groups.size());
    std::vector<PipelineStats> task_stats(query_groups.size());
    parallel_for(query_groups.size(), cfg.eval.threads, [&](std::size_t h) {
      std::vector<Index> remaining = query_groups[h];
      for (std::size_t g = 0; g < db_groups.size() && !remaining.empty(); ++g) {
        const Rng pair_rng = level_rng.split("group-pair", h * db_groups.size() + g);
        // Retire one query per successful call until the group pair is exhausted.
        for (std::uint64_t call = 0;; ++call) {
          Rng r = pair_rng.split("call", call);
          const auto hit = oracle.find(db_groups[g], remaining, level, r, task_stats[h]);
          if (!hit) break;
          known[hit->blue] = std::min(known[hit->blue], hit->distance);
          found[h].push_back(static_cast<Index>(hit->blue));
          std::erase(remaining, static_cast<Index>(hit->blue));
          if (remaining.empty()) break;
        }
      }
    });
    for (std::size_t h = 0; h < found.size(); ++h) {
      matched.insert(matched.end(), found[h].begin(), found[h].end());
      result.stats.merge(task_stats[h]);
    }
    std::sort(matched.begin(), matched.end());
    for (auto q : matched) table[q] = level;
    candidates = std::move(matched);
  }

  // Witness: the first database vector within the final level.
  result.entries.resize(queries.size());
  parallel_for(queries.size(), cfg.eval.threads, [&](std::size_t q) {
    NNEntry e{q, 0, std::numeric_limits<std::size_t>::max()};
    for (std::size_t i = 0; i < db.size(); ++i) {
      const auto d = hamming_distance(db[i], queries[q]);
      if (d <= table[q]) {
        e = {q, i, d};
        break;
      }
    }
    // Only reachable when max_distance understates the true distances.
    if (e.distance == std::numeric_limits<std::size_t>::max()) e = batch_nn_bruteforce(db, queries.subspan(q, 1))[0];
    e.query = q;
    result.entries[q] = e;
  });
  return result;
}

}  // namespace polyham
