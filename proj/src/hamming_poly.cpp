#include "polyham/hamming_poly.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "polyham/errors.hpp"

namespace polyham {

void GroupPredicateSpec::validate() const {
  if (s == 0) throw ParameterError("group size must be positive");
  if (d == 0) throw ParameterError("dimension must be positive");
  if (k >= d) throw ParameterError("distance threshold k must satisfy k < d");
}

Rational GroupPredicateSpec::inner_eps() const {
  const auto s3 = static_cast<std::int64_t>(s) * static_cast<std::int64_t>(s) * static_cast<std::int64_t>(s);
  return Rational(1, s3);
}

PairSet PairSet::random(std::size_t s, Rng& rng) {
  // One fair coin per pair, 64 at a time.
  PairSet out(s);
  for (auto& w : out.words_) w = rng.next_u64();
  if (const auto tail = (s * s) % 64; tail != 0) out.words_.back() &= (std::uint64_t{1} << tail) - 1;
  return out;
}

PairSet PairSet::full(std::size_t s) {
  PairSet out(s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) out.set(i, j);
  }
  return out;
}

void PairSet::set(std::size_t i, std::size_t j, bool v) {
  const auto b = i * s_ + j;
  const auto mask = std::uint64_t{1} << (b % 64);
  if (v) {
    words_[b / 64] |= mask;
  } else {
    words_[b / 64] &= ~mask;
  }
}

std::size_t PairSet::size() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool PairSet::intersect_parity(std::span<const std::uint64_t> other) const {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other[i];
  return std::popcount(acc) & 1;
}

namespace {

// An exact base is determined by (d, cutoff), so its parity table is cached.
std::shared_ptr<const std::vector<std::uint8_t>> parity_table(const ThresholdCircuit& inner, std::size_t d) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::int64_t>, std::shared_ptr<const std::vector<std::uint8_t>>> cache;
  const auto key = std::make_pair(d, inner.cutoff());
  const std::lock_guard lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto table = std::make_shared<std::vector<std::uint8_t>>(d + 1);
  const auto& base = inner.base_poly();
  for (std::size_t w = 0; w <= d; ++w) {
    const auto v = base.stored_value(w);
    (*table)[w] = static_cast<std::uint8_t>(v ? (*v & 1) != 0 : mpz_odd_p(base.eval_weight(w).get_mpz_t()) != 0);
  }
  cache.emplace(key, table);
  return table;
}

}  // namespace

HammingPolynomial::HammingPolynomial(GroupPredicateSpec spec, ThresholdCircuit inner, PairSet r1, PairSet r2)
    : spec_(spec), inner_(std::move(inner)), r1_(std::move(r1)), r2_(std::move(r2)) {
  if (inner_.is_symmetric()) weight_table_ = parity_table(inner_, spec_.d);
}

HammingPolynomial HammingPolynomial::sample(const GroupPredicateSpec& spec, Rng& rng, ThresholdSampler& sampler) {
  spec.validate();
  const Rational theta(static_cast<std::int64_t>(spec.k + 1), static_cast<std::int64_t>(spec.d));
  Rng inner_rng = rng.split("hamming-inner");
  auto inner = spec.s == 1 ? sampler.exact_circuit(spec.d, theta)
                           : sampler.sample(ThresholdSpec{spec.d, theta, spec.inner_eps()}, inner_rng);
  Rng subsets = rng.split("hamming-subsets");
  auto r1 = PairSet::random(spec.s, subsets);
  auto r2 = PairSet::random(spec.s, subsets);
  return HammingPolynomial(spec, std::move(inner), std::move(r1), std::move(r2));
}

HammingPolynomial HammingPolynomial::with_exact_inner(const GroupPredicateSpec& spec, PairSet r1, PairSet r2,
                                                      ThresholdSampler& sampler) {
  spec.validate();
  if (r1.s() != spec.s || r2.s() != spec.s) throw ParameterError("pair sets do not match the group size");
  const Rational theta(static_cast<std::int64_t>(spec.k + 1), static_cast<std::int64_t>(spec.d));
  return HammingPolynomial(spec, sampler.exact_circuit(spec.d, theta), std::move(r1), std::move(r2));
}

bool HammingPolynomial::inner_bit(const BitVector& z) const {
  if (z.dim() != spec_.d) throw InputError("inner input has the wrong dimension");
  if (weight_table_) return (*weight_table_)[z.weight()] != 0;
  return mpz_odd_p(inner_.eval(z).get_mpz_t()) != 0;
}

bool HammingPolynomial::combine(std::span<const std::uint64_t> inner_bits) const {
  // Each factor is 1 + |R_t| + sum_{R_t} p over GF(2).
  const bool l1 = ((1 + r1_.size()) & 1) ^ r1_.intersect_parity(inner_bits);
  const bool l2 = ((1 + r2_.size()) & 1) ^ r2_.intersect_parity(inner_bits);
  return !(l1 && l2);
}

bool HammingPolynomial::eval(std::span<const BitVector> xs, std::span<const BitVector> ys) const {
  const auto s = spec_.s;
  if (xs.size() != s || ys.size() != s) throw InputError("group sizes do not match s");
  std::vector<std::uint64_t> bits((s * s + 63) / 64, 0);
  for (std::size_t i = 0; i < s; ++i) {
    if (xs[i].dim() != spec_.d) throw InputError("group vector has the wrong dimension");
    for (std::size_t j = 0; j < s; ++j) {
      if (ys[j].dim() != spec_.d) throw InputError("group vector has the wrong dimension");
      if (!r1_.contains(i, j) && !r2_.contains(i, j)) continue;
      const bool b = weight_table_ ? (*weight_table_)[hamming_distance(xs[i], ys[j])] != 0
                                   : inner_bit(bitwise_xor(xs[i], ys[j]));
      if (b) bits[(i * s + j) / 64] |= std::uint64_t{1} << ((i * s + j) % 64);
    }
  }
  return combine(bits);
}

Gf2Polynomial HammingPolynomial::inner_gf2(std::size_t budget) const {
  if (inner_.is_symmetric()) return inner_.base_poly().mod2(budget);
  return inner_.expand(budget).mod2(budget);
}

BigInt substituted_monomial_count(const Gf2Polynomial& p) {
  BigInt total = 0;
  for (const auto& m : p.terms()) {
    BigInt term = 1;
    mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), m.degree());
    total += term;
  }
  return total;
}

namespace {

// sum over odd coefficients of C(d, i) 2^i, without listing monomials.
BigInt symmetric_substituted_count(const IntPolynomial& p, std::size_t d) {
  const auto& a = p.symmetric_coefficients();
  BigInt total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!mpz_odd_p(a[i].get_mpz_t())) continue;
    BigInt term = binomial(d, i);
    mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), i);
    total += term;
  }
  return total;
}

}  // namespace

BigInt HammingPolynomial::per_pair_monomials() const {
  return inner_.is_symmetric() ? symmetric_substituted_count(inner_.base_poly(), spec_.d)
                               : substituted_monomial_count(inner_gf2());
}

BigInt HammingPolynomial::projected_monomials() const {
  const BigInt per_pair = per_pair_monomials();
  const BigInt f1 = per_pair * static_cast<unsigned long>(r1_.size());
  const BigInt f2 = per_pair * static_cast<unsigned long>(r2_.size());
  return (f1 + 1) * (f2 + 1);
}

Gf2Polynomial HammingPolynomial::expand(std::size_t budget) const {
  const auto projected = projected_monomials();
  if (projected > BigInt(static_cast<unsigned long>(budget))) {
    throw BudgetError("Hamming polynomial expansion exceeds budget", projected.get_d());
  }
  const auto p = inner_gf2(budget).sorted_terms();
  const auto n = spec_.nvars();
  const auto factor = [&](const PairSet& r) {
    Gf2Polynomial f = Gf2Polynomial::constant(n, ((1 + r.size()) & 1) != 0);
    std::vector<std::uint32_t> vars;
    for (std::size_t i = 0; i < spec_.s; ++i) {
      for (std::size_t j = 0; j < spec_.s; ++j) {
        if (!r.contains(i, j)) continue;
        // p(x_i + y_j): each monomial prod_t z_t becomes prod_t (x_{i,t} + y_{j,t}).
        for (const auto& m : p) {
          const auto zs = m.vars();
          const std::uint64_t subsets = std::uint64_t{1} << zs.size();
          for (std::uint64_t u = 0; u < subsets; ++u) {
            vars.clear();
            for (std::size_t b = 0; b < zs.size(); ++b) {
              vars.push_back((u >> b) & 1 ? spec_.x_var(i, zs[b]) : spec_.y_var(j, zs[b]));
            }
            f.toggle(Monomial(vars));
          }
        }
      }
    }
    return f;
  };
  auto q = Gf2Polynomial::multiply(factor(r1_), factor(r2_), budget);
  q.toggle(Monomial{});
  return q;
}

bool HammingPolynomial::dimension_advisory_ok() const {
  const double e2 = std::numbers::e * std::numbers::e;
  return static_cast<double>(spec_.d) > e2 * std::log(static_cast<double>(spec_.s));
}

}  // namespace polyham
