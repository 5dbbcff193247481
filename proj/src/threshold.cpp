#include "polyham/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyham/errors.hpp"
#include "polyham/interpolation.hpp"

namespace polyham {

void ThresholdSpec::validate() const {
  if (n == 0) throw ParameterError("threshold needs n >= 1");
  if (theta < Rational(0) || theta > Rational(1)) throw ParameterError("theta must lie in [0, 1]");
  if (eps <= Rational(0) || eps >= Rational(1)) throw ParameterError("eps must lie in (0, 1)");
}

void SymmetricFunctionSpec::validate() const {
  if (n == 0) throw ParameterError("symmetric function needs n >= 1");
  if (values.size() != n + 1) {
    throw ParameterError("symmetric function needs n+1 = " + std::to_string(n + 1) + " values, got " +
                         std::to_string(values.size()));
  }
}

JumpSets jump_sets(const SymmetricFunctionSpec& f) {
  f.validate();
  JumpSets j;
  for (std::size_t i = 1; i <= f.n; ++i) {
    if (f(i) && !f(i - 1)) j.up.push_back(i);
    if (!f(i) && f(i - 1)) j.down.push_back(i);
  }
  return j;
}

double threshold_degree_bound(std::size_t n, double eps, double constant) {
  const double raw = constant * std::sqrt(static_cast<double>(n) * std::log(1.0 / eps));
  return std::min(static_cast<double>(n), raw);
}

// ------------------------------------------------------------ SampleChain

SampleChain::SampleChain(std::size_t n, Rng rng) : n_(n), rng_(rng) {
  if (n == 0) throw ParameterError("sample chain needs n >= 1");
}

std::size_t SampleChain::size_at(std::size_t level) const {
  std::size_t m = n_;
  for (std::size_t l = 0; l < level; ++l) m = std::max<std::size_t>(1, m / 10);
  return m;
}

std::shared_ptr<const std::vector<std::uint32_t>> SampleChain::map(std::size_t level) const {
  std::lock_guard lock(mu_);
  if (maps_.size() <= level) maps_.resize(level + 1);
  if (!maps_[level]) {
    const std::size_t from = size_at(level);
    const std::size_t to = size_at(level + 1);
    Rng r = rng_.split("sample-map", level);
    auto m = std::make_shared<std::vector<std::uint32_t>>(to);
    for (auto& idx : *m) idx = static_cast<std::uint32_t>(r.below(from));
    maps_[level] = std::move(m);
  }
  return maps_[level];
}

std::vector<BitVector> SampleChain::project(const BitVector& x, std::size_t levels) const {
  if (x.dim() != n_) throw InputError("input dimension does not match the sampled polynomial");
  std::vector<BitVector> out;
  out.reserve(levels + 1);
  out.push_back(x);
  for (std::size_t l = 0; l < levels; ++l) {
    const auto m = map(l);
    out.push_back(gather(out.back(), *m));
  }
  return out;
}

// --------------------------------------------------------- InterpolantCache

std::shared_ptr<const IntPolynomial> InterpolantCache::step(std::size_t nvars, std::size_t first, std::size_t count,
                                                            std::int64_t cutoff) {
  const Key key{nvars, first, count, cutoff};
  std::lock_guard lock(mu_);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  std::vector<std::int64_t> values(count);
  for (std::size_t j = 0; j < count; ++j) values[j] = static_cast<std::int64_t>(first + j) >= cutoff ? 1 : 0;
  auto poly = std::make_shared<const IntPolynomial>(
      interpolate_weights(nvars, static_cast<std::int64_t>(first) - 1, count, values));
  entries_.emplace(key, poly);
  return poly;
}

std::size_t InterpolantCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ----------------------------------------------------------- circuit nodes

struct ThresholdCircuit::Node {
  Kind kind = Kind::kExactBase;
  std::size_t n = 0;
  std::size_t level = 0;
  double eps = 0;
  long double theta = 0;
  std::int64_t cutoff = 0;
  std::size_t depth = 1;

  std::shared_ptr<const IntPolynomial> base;

  std::shared_ptr<const std::vector<std::uint32_t>> sample_map;
  double a = 0;
  std::size_t band_lo = 0;
  std::size_t band_hi = 0;
  std::shared_ptr<InterpolantCache> cache;
  mutable std::once_flag band_once;
  mutable std::shared_ptr<const IntPolynomial> band;
  std::shared_ptr<const Node> hi, lo, in;

  mutable std::once_flag degree_once;
  mutable std::size_t degree = 0;

  const IntPolynomial& band_poly() const {
    std::call_once(band_once, [this] { band = cache->step(n, band_lo, band_hi - band_lo + 1, cutoff); });
    return *band;
  }

  std::size_t structural_degree() const {
    std::call_once(degree_once, [this] {
      if (kind == Kind::kExactBase) {
        degree = base->degree();
      } else {
        const std::size_t s = hi->structural_degree() + lo->structural_degree();
        degree = std::min(n, s + std::max(band_poly().degree(), in->structural_degree()));
      }
    });
    return degree;
  }

  BigInt eval(std::span<const std::size_t> w) const {
    if (kind == Kind::kExactBase) return base->eval_weight(w[0]);
    const auto rest = w.subspan(1);
    const BigInt s = (1 - hi->eval(rest)) * lo->eval(rest);
    if (s == 0) return in->eval(rest);
    if (s == 1) return band_poly().eval_weight(w[0]);
    return band_poly().eval_weight(w[0]) * s + in->eval(rest) * (1 - s);
  }

  // Word-sized evaluation; nullopt when some value leaves the stored
  // interpolation data or overflows, in which case the caller uses eval().
  std::optional<std::int64_t> eval_small(std::span<const std::size_t> w) const {
    if (kind == Kind::kExactBase) return base->stored_value(w[0]);
    const auto rest = w.subspan(1);
    const auto h = hi->eval_small(rest);
    const auto l = lo->eval_small(rest);
    if (!h || !l) return std::nullopt;
    std::int64_t s = 0;
    if (__builtin_mul_overflow(1 - *h, *l, &s)) return std::nullopt;
    if (s == 0) return in->eval_small(rest);
    if (s == 1) return band_poly().stored_value(w[0]);
    return std::nullopt;
  }

  IntPolynomial expand(std::size_t budget) const {
    if (kind == Kind::kExactBase) return base->to_explicit(budget);
    const auto& map = *sample_map;
    const auto lift = [&](const Node& child) { return child.expand(budget).substitute(map, n, budget); };
    const IntPolynomial h = lift(*hi);
    const IntPolynomial l = lift(*lo);
    const IntPolynomial i = lift(*in);
    const IntPolynomial one = IntPolynomial::constant(n, 1);
    const IntPolynomial s = IntPolynomial::multiply(one - h, l, budget);
    const IntPolynomial a = band_poly().to_explicit(budget);
    return IntPolynomial::multiply(a, s, budget) + IntPolynomial::multiply(i, one - s, budget);
  }
};

namespace {

const ThresholdCircuit::Node& require_recursive(const ThresholdCircuit::Node& n, const char* what) {
  if (n.kind != ThresholdCircuit::Kind::kRecursive) {
    throw ParameterError(std::string(what) + " is only defined for recursive circuits");
  }
  return n;
}

}  // namespace

ThresholdCircuit::Kind ThresholdCircuit::kind() const noexcept { return node_->kind; }
std::size_t ThresholdCircuit::n() const noexcept { return node_->n; }
std::size_t ThresholdCircuit::level() const noexcept { return node_->level; }
double ThresholdCircuit::eps() const noexcept { return node_->eps; }
long double ThresholdCircuit::theta() const noexcept { return node_->theta; }
std::int64_t ThresholdCircuit::cutoff() const noexcept { return node_->cutoff; }

const std::vector<std::uint32_t>& ThresholdCircuit::sample_map() const {
  return *require_recursive(*node_, "sample_map").sample_map;
}
std::shared_ptr<const std::vector<std::uint32_t>> ThresholdCircuit::shared_sample_map() const {
  return require_recursive(*node_, "sample_map").sample_map;
}
double ThresholdCircuit::a_param() const { return require_recursive(*node_, "a_param").a; }
std::pair<std::size_t, std::size_t> ThresholdCircuit::band() const {
  const auto& n = require_recursive(*node_, "band");
  return {n.band_lo, n.band_hi};
}
const IntPolynomial& ThresholdCircuit::band_poly() const { return require_recursive(*node_, "band_poly").band_poly(); }
ThresholdCircuit ThresholdCircuit::near_hi() const { return {require_recursive(*node_, "near_hi").hi, chain_}; }
ThresholdCircuit ThresholdCircuit::near_lo() const { return {require_recursive(*node_, "near_lo").lo, chain_}; }
ThresholdCircuit ThresholdCircuit::inner() const { return {require_recursive(*node_, "inner").in, chain_}; }

const IntPolynomial& ThresholdCircuit::base_poly() const {
  if (node_->kind != Kind::kExactBase) throw ParameterError("base_poly is only defined for exact-base circuits");
  return *node_->base;
}

std::size_t ThresholdCircuit::depth() const { return node_->depth; }
std::size_t ThresholdCircuit::degree() const { return node_->structural_degree(); }

BigInt ThresholdCircuit::eval(const BitVector& x) const {
  if (x.dim() != n()) throw InputError("eval_circuit: input dimension does not match n");
  if (kind() == Kind::kExactBase) return node_->base->eval_weight(x.weight());
  // Project through the chain from this node's level downwards.
  std::vector<std::size_t> weights{x.weight()};
  BitVector cur = x;
  for (std::size_t l = 0; l + 1 < depth(); ++l) {
    cur = gather(cur, *chain_->map(level() + l));
    weights.push_back(cur.weight());
  }
  return eval_weights(weights);
}

BigInt ThresholdCircuit::eval_weights(std::span<const std::size_t> weights) const {
  if (weights.size() < depth()) throw InputError("eval_weights: chain shorter than circuit depth");
  if (auto v = node_->eval_small(weights)) return BigInt(static_cast<long>(*v));
  return node_->eval(weights);
}

IntPolynomial ThresholdCircuit::expand(std::size_t budget) const { return node_->expand(budget); }

// ----------------------------------------------------------------- sampler

ThresholdSampler::ThresholdSampler(SamplerOptions options)
    : options_(options), cache_(std::make_shared<InterpolantCache>()) {}

std::shared_ptr<const IntPolynomial> ThresholdSampler::exact_threshold(std::size_t n, std::int64_t cutoff) {
  // Clamp so all out-of-range thresholds share the constant polynomials.
  cutoff = std::clamp<std::int64_t>(cutoff, 0, static_cast<std::int64_t>(n) + 1);
  return cache_->step(n, 0, n + 1, cutoff);
}

std::shared_ptr<const ThresholdCircuit::Node> ThresholdSampler::build(std::size_t n, std::size_t level,
                                                                      long double theta,
                                                                      std::optional<Rational> exact_theta, double eps,
                                                                      const std::shared_ptr<const SampleChain>& chain) {
  auto node = std::make_shared<ThresholdCircuit::Node>();
  node->n = n;
  node->level = level;
  node->eps = eps;
  node->theta = theta;
  node->cutoff = exact_theta ? exact_theta->ceil_times(static_cast<std::int64_t>(n))
                             : static_cast<std::int64_t>(std::ceil(theta * static_cast<long double>(n)));
  const bool base = n <= options_.base_size ||
                    options_.degree_constant * std::sqrt(static_cast<double>(n) * std::log(1.0 / eps)) >=
                        static_cast<double>(n);
  if (base) {
    node->kind = ThresholdCircuit::Kind::kExactBase;
    node->base = exact_threshold(n, node->cutoff);
    return node;
  }
  node->kind = ThresholdCircuit::Kind::kRecursive;
  node->cache = cache_;
  node->a = std::sqrt(10.0) * std::sqrt(std::log(1.0 / eps));
  node->sample_map = chain->map(level);
  const std::size_t m = node->sample_map->size();
  const long double root_n = std::sqrt(static_cast<long double>(n));
  const long double delta = node->a / root_n;
  const long double center = theta * static_cast<long double>(n);
  const long double radius = 2.0L * node->a * root_n;
  const long double lo = std::max(0.0L, std::ceil(center - radius));
  const long double hi = std::min(static_cast<long double>(n), std::floor(center + radius));
  if (lo <= hi) {
    node->band_lo = static_cast<std::size_t>(lo);
    node->band_hi = static_cast<std::size_t>(hi);
  } else {
    // The band misses [0, n] entirely; keep the nearest single weight.
    const auto w = static_cast<std::size_t>(std::clamp(center, 0.0L, static_cast<long double>(n)));
    node->band_lo = node->band_hi = w;
  }
  const double child_eps = eps / 4.0;
  node->hi = build(m, level + 1, theta + delta, std::nullopt, child_eps, chain);
  node->lo = build(m, level + 1, theta - delta, std::nullopt, child_eps, chain);
  node->in = build(m, level + 1, theta, exact_theta, child_eps, chain);
  node->depth = 1 + std::max({node->hi->depth, node->lo->depth, node->in->depth});
  return node;
}

ThresholdCircuit ThresholdSampler::sample(const ThresholdSpec& spec, std::shared_ptr<const SampleChain> chain) {
  spec.validate();
  if (chain->size_at(0) != spec.n) throw ParameterError("sample chain dimension does not match spec");
  auto node = build(spec.n, 0, spec.theta.to_long_double(), spec.theta, spec.eps.to_double(), chain);
  return ThresholdCircuit(std::move(node), std::move(chain));
}

ThresholdCircuit ThresholdSampler::exact_circuit(std::size_t n, const Rational& theta) {
  ThresholdSpec{n, theta, Rational(1, 2)}.validate();
  auto node = std::make_shared<ThresholdCircuit::Node>();
  node->n = n;
  node->theta = theta.to_long_double();
  node->cutoff = theta.ceil_times(static_cast<std::int64_t>(n));
  node->base = exact_threshold(n, node->cutoff);
  // The chain is never consulted by an exact base.
  return ThresholdCircuit(std::move(node), std::make_shared<const SampleChain>(n, Rng(0)));
}

ThresholdCircuit ThresholdSampler::sample(const ThresholdSpec& spec, Rng& rng) {
  spec.validate();
  return sample(spec, std::make_shared<const SampleChain>(spec.n, rng.split("threshold-chain")));
}

SymmetricCircuit ThresholdSampler::sample_symmetric(const SymmetricFunctionSpec& f, const Rational& eps, Rng& rng) {
  const auto jumps = jump_sets(f);
  if (eps <= Rational(0) || eps >= Rational(1)) throw ParameterError("eps must lie in (0, 1)");
  SymmetricCircuit out;
  out.n_ = f.n;
  out.f0_ = f(0) ? 1 : 0;
  out.chain_ = std::make_shared<const SampleChain>(f.n, rng.split("symmetric-chain"));
  const Rational half_eps(eps.num, eps.den * 2);
  const auto add = [&](std::size_t i, int sign) {
    const ThresholdSpec spec{f.n, Rational(static_cast<std::int64_t>(i), static_cast<std::int64_t>(f.n)), half_eps};
    out.terms_.push_back({sign, i, sample(spec, out.chain_)});
  };
  // f(x) = f_0 + sum over upward jumps of TH_{i/n} - sum over downward jumps.
  for (auto i : jumps.up) add(i, +1);
  for (auto i : jumps.down) add(i, -1);
  std::sort(out.terms_.begin(), out.terms_.end(), [](const auto& a, const auto& b) { return a.jump < b.jump; });
  return out;
}

ThresholdCircuit sample_threshold(const ThresholdSpec& spec, Rng& rng, SamplerOptions options) {
  ThresholdSampler sampler(options);
  return sampler.sample(spec, rng);
}

SymmetricCircuit sample_symmetric(const SymmetricFunctionSpec& f, const Rational& eps, Rng& rng,
                                  SamplerOptions options) {
  ThresholdSampler sampler(options);
  return sampler.sample_symmetric(f, eps, rng);
}

// ------------------------------------------------------- SymmetricCircuit

std::size_t SymmetricCircuit::degree() const {
  std::size_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.circuit.degree());
  return d;
}

BigInt SymmetricCircuit::eval(const BitVector& x) const {
  if (x.dim() != n_) throw InputError("symmetric circuit: input dimension does not match n");
  std::size_t depth = 1;
  for (const auto& t : terms_) depth = std::max(depth, t.circuit.depth());
  const auto chain = chain_->project(x, depth - 1);
  std::vector<std::size_t> weights(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) weights[i] = chain[i].weight();
  std::int64_t small = f0_;
  std::size_t t = 0;
  for (; t < terms_.size(); ++t) {
    const auto v = terms_[t].circuit.eval_weights(weights);
    if (!v.fits_slong_p() || __builtin_add_overflow(small, terms_[t].sign * v.get_si(), &small)) break;
  }
  if (t == terms_.size()) return BigInt(static_cast<long>(small));
  BigInt acc = f0_;
  for (const auto& term : terms_) acc += term.sign * term.circuit.eval_weights(weights);
  return acc;
}

IntPolynomial SymmetricCircuit::expand(std::size_t budget) const {
  IntPolynomial acc = IntPolynomial::constant(n_, f0_);
  for (const auto& t : terms_) {
    const auto p = t.circuit.expand(budget);
    acc = t.sign > 0 ? acc + p : acc - p;
  }
  return acc;
}

// --------------------------------------------------------- error harness

std::vector<InputAgreement> measure_error(const std::function<PolynomialEvaluator(Rng&)>& draw,
                                          const std::function<int(const BitVector&)>& reference,
                                          std::span<const BitVector> inputs, std::size_t trials, Rng& rng) {
  if (trials == 0) throw ParameterError("measure_error needs trials >= 1");
  std::vector<InputAgreement> rows;
  rows.reserve(inputs.size());
  std::vector<int> expected;
  for (const auto& x : inputs) {
    rows.push_back({x, x.weight(), 0, trials});
    expected.push_back(reference(x));
  }
  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial_rng = rng.split("trial", t);
    const auto eval = draw(trial_rng);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (eval(inputs[i]) == expected[i]) ++rows[i].agree;
    }
  }
  return rows;
}

BitVector random_vector_of_weight(std::size_t n, std::size_t weight, Rng& rng) {
  if (weight > n) throw ParameterError("weight exceeds dimension");
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0U);
  BitVectorBuilder b(n);
  // Partial Fisher-Yates: the first `weight` slots become a uniform subset.
  for (std::size_t i = 0; i < weight; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
    b.set(idx[i]);
  }
  return std::move(b).build();
}

BitVector random_vector(std::size_t n, Rng& rng) {
  std::vector<BitVector::Word> words((n + 63) / 64);
  for (auto& w : words) w = rng.next_u64();
  return BitVector(n, std::move(words));
}

std::vector<BitVector> threshold_test_inputs(std::size_t n, std::int64_t cutoff, std::size_t random_count, Rng& rng) {
  std::vector<BitVector> out;
  for (const std::int64_t w : {cutoff, cutoff - 1}) {
    if (w >= 0 && w <= static_cast<std::int64_t>(n)) {
      out.push_back(random_vector_of_weight(n, static_cast<std::size_t>(w), rng));
    }
  }
  for (std::size_t i = 0; i < random_count; ++i) out.push_back(random_vector(n, rng));
  return out;
}

}  // namespace polyham
