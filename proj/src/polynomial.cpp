#include "polyham/polynomial.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "polyham/errors.hpp"
#include "polyham/interpolation.hpp"

namespace polyham {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<std::uint32_t> vars) : vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

bool Monomial::eval(const BitVector& x) const {
  for (auto v : vars_) {
    if (v >= x.dim()) throw InputError("monomial variable " + std::to_string(v) + " out of range");
    if (!x[v]) return false;
  }
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.vars_.size() + b.vars_.size());
  std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(), std::back_inserter(out));
  return Monomial(Monomial::Sorted{}, std::move(out));
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ m.degree();
  for (auto v : m.vars()) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

std::string BudgetError::format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------- symmetric form

struct IntPolynomial::SymmetricForm {
  std::size_t nvars = 0;
  // Interpolation form (used when has_values): values on weights first_weight...
  bool has_values = false;
  std::size_t first_weight = 0;
  std::vector<std::int64_t> values;

  mutable std::once_flag coeff_once;
  mutable std::vector<BigInt> coeffs;  // trailing zeros trimmed
  mutable std::once_flag diff_once;
  mutable std::vector<BigInt> diffs;  // Newton differences at first_weight
  mutable std::size_t newton_degree = 0;

  const std::vector<BigInt>& coefficients() const {
    std::call_once(coeff_once, [this] {
      if (has_values) {
        coeffs = interpolation_coefficients(static_cast<std::int64_t>(first_weight) - 1, values);
      }
      while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    });
    return coeffs;
  }

  void ensure_differences() const {
    std::call_once(diff_once, [this] {
      diffs = forward_differences(values);
      newton_degree = 0;
      for (std::size_t m = diffs.size(); m-- > 0;) {
        if (diffs[m] != 0) {
          newton_degree = m;
          break;
        }
      }
    });
  }

  std::size_t degree() const {
    if (has_values) {
      ensure_differences();
      return newton_degree;
    }
    const auto& a = coefficients();
    return a.empty() ? 0 : a.size() - 1;
  }

  BigInt eval_weight(std::size_t w) const {
    if (w > nvars) throw InputError("weight exceeds variable count");
    if (has_values) {
      if (w >= first_weight && w - first_weight < values.size()) {
        return BigInt(static_cast<long>(values[w - first_weight]));
      }
      // Newton extrapolation: sum_m b_m C(w - s, m).
      ensure_differences();
      const auto shift = static_cast<long>(w) - static_cast<long>(first_weight);
      BigInt acc = 0;
      BigInt g = 1;
      for (std::size_t m = 0; m <= newton_degree; ++m) {
        if (m > 0) {
          g *= BigInt(shift - static_cast<long>(m) + 1);
          mpz_divexact_ui(g.get_mpz_t(), g.get_mpz_t(), m);
          if (g == 0) break;
        }
        if (diffs[m] != 0) acc += diffs[m] * g;
      }
      return acc;
    }
    const auto& a = coefficients();
    BigInt acc = 0;
    BigInt c = 1;  // C(w, i)
    for (std::size_t i = 0; i < a.size() && i <= w; ++i) {
      if (i > 0) {
        c *= static_cast<unsigned long>(w - i + 1);
        mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), i);
      }
      if (a[i] != 0) acc += a[i] * c;
    }
    return acc;
  }
};

namespace {

void check_nvars(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw InputError(std::string(op) + ": variable count mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

// Visits every subset of {0..n-1} of size k in lexicographic order.
template <class F>
void for_each_combination(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::uint32_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<std::uint32_t>(i);
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double as_double(const BigInt& v) { return v.get_d(); }

}  // namespace

// ----------------------------------------------------------- IntPolynomial

IntPolynomial::IntPolynomial(std::size_t nvars) : nvars_(nvars) {}

IntPolynomial IntPolynomial::constant(std::size_t nvars, const BigInt& c) {
  IntPolynomial p(nvars);
  if (c != 0) p.terms_.emplace(Monomial{}, c);
  return p;
}

IntPolynomial IntPolynomial::variable(std::size_t nvars, std::uint32_t index) {
  if (index >= nvars) throw InputError("variable index out of range");
  IntPolynomial p(nvars);
  p.terms_.emplace(Monomial{index}, BigInt(1));
  return p;
}

IntPolynomial IntPolynomial::from_terms(std::size_t nvars, Terms terms) {
  IntPolynomial p(nvars);
  for (auto& [m, c] : terms) {
    if (m.span_end() > nvars) throw InputError("monomial variable out of range");
    if (c != 0) p.terms_.emplace(m, std::move(c));
  }
  return p;
}

IntPolynomial IntPolynomial::symmetric_from_coefficients(std::size_t nvars, std::vector<BigInt> coeffs) {
  if (coeffs.size() > nvars + 1) coeffs.resize(nvars + 1);  // e_i = 0 for i > nvars
  auto form = std::make_shared<SymmetricForm>();
  form->nvars = nvars;
  form->coeffs = std::move(coeffs);
  IntPolynomial p(nvars);
  p.sym_ = std::move(form);
  return p;
}

IntPolynomial IntPolynomial::symmetric_from_values(std::size_t nvars, std::size_t first_weight,
                                                   std::vector<std::int64_t> values) {
  if (values.empty()) throw ParameterError("symmetric_from_values: no values");
  if (first_weight + values.size() > nvars + 1) throw ParameterError("symmetric_from_values: weights exceed nvars");
  auto form = std::make_shared<SymmetricForm>();
  form->nvars = nvars;
  form->has_values = true;
  form->first_weight = first_weight;
  form->values = std::move(values);
  IntPolynomial p(nvars);
  p.sym_ = std::move(form);
  return p;
}

bool IntPolynomial::is_zero() const {
  if (!sym_) return terms_.empty();
  if (sym_->has_values) {
    return std::all_of(sym_->values.begin(), sym_->values.end(), [](auto v) { return v == 0; });
  }
  return sym_->coefficients().empty();
}

std::size_t IntPolynomial::degree() const {
  if (sym_) return sym_->degree();
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

BigInt IntPolynomial::monomial_count() const {
  if (!sym_) return BigInt(static_cast<unsigned long>(terms_.size()));
  const auto& a = sym_->coefficients();
  BigInt total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) total += binomial(nvars_, i);
  }
  return total;
}

const std::vector<BigInt>& IntPolynomial::symmetric_coefficients() const {
  if (!sym_) throw ParameterError("symmetric_coefficients: polynomial is in explicit mode");
  return sym_->coefficients();
}

BigInt IntPolynomial::eval(const BitVector& x) const {
  check_nvars(nvars_, x.dim(), "IntPolynomial::eval");
  if (sym_) return sym_->eval_weight(x.weight());
  BigInt acc = 0;
  for (const auto& [m, c] : terms_) {
    if (m.eval(x)) acc += c;
  }
  return acc;
}

BigInt IntPolynomial::eval_weight(std::size_t w) const {
  if (!sym_) throw ParameterError("eval_weight: polynomial is in explicit mode");
  return sym_->eval_weight(w);
}

IntPolynomial::Terms IntPolynomial::expand(std::size_t budget) const {
  if (!sym_) return terms_;
  const BigInt count = monomial_count();
  if (count > BigInt(static_cast<unsigned long>(budget))) {
    throw BudgetError("symmetric polynomial expansion exceeds budget", as_double(count));
  }
  Terms out;
  const auto& a = sym_->coefficients();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for_each_combination(nvars_, i, [&](const std::vector<std::uint32_t>& idx) {
      out.emplace_hint(out.end(), Monomial(idx), a[i]);
    });
  }
  return out;
}

IntPolynomial IntPolynomial::to_explicit(std::size_t budget) const {
  if (!sym_) return *this;
  IntPolynomial p(nvars_);
  p.terms_ = expand(budget);
  return p;
}

const IntPolynomial::Terms& IntPolynomial::terms_or_expand(std::size_t budget, Terms& scratch) const {
  if (!sym_) return terms_;
  scratch = expand(budget);
  return scratch;
}

IntPolynomial IntPolynomial::substitute(std::span<const std::uint32_t> mapping, std::size_t ambient_nvars,
                                        std::size_t budget) const {
  check_nvars(nvars_, mapping.size(), "IntPolynomial::substitute");
  for (auto v : mapping) {
    if (v >= ambient_nvars) throw InputError("substitution target out of range");
  }
  Terms scratch;
  const auto& src = terms_or_expand(budget, scratch);
  IntPolynomial out(ambient_nvars);
  for (const auto& [m, c] : src) {
    std::vector<std::uint32_t> vars;
    vars.reserve(m.degree());
    for (auto v : m.vars()) vars.push_back(mapping[v]);
    auto [it, inserted] = out.terms_.try_emplace(Monomial(std::move(vars)), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) out.terms_.erase(it);
    }
  }
  return out;
}

Gf2Polynomial IntPolynomial::mod2(std::size_t budget) const {
  Gf2Polynomial out(nvars_);
  if (sym_) {
    const auto& a = sym_->coefficients();
    BigInt count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mpz_odd_p(a[i].get_mpz_t())) count += binomial(nvars_, i);
    }
    if (count > BigInt(static_cast<unsigned long>(budget))) {
      throw BudgetError("GF(2) reduction exceeds budget", as_double(count));
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!mpz_odd_p(a[i].get_mpz_t())) continue;
      for_each_combination(nvars_, i, [&](const std::vector<std::uint32_t>& idx) { out.toggle(Monomial(idx)); });
    }
    return out;
  }
  for (const auto& [m, c] : terms_) {
    if (mpz_odd_p(c.get_mpz_t())) out.toggle(m);
  }
  return out;
}

IntPolynomial operator+(const IntPolynomial& p, const IntPolynomial& q) {
  check_nvars(p.nvars_, q.nvars_, "IntPolynomial::add");
  if (p.sym_ && q.sym_ && !p.sym_->has_values && !q.sym_->has_values) {
    auto a = p.sym_->coefficients();
    const auto& b = q.sym_->coefficients();
    if (a.size() < b.size()) a.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return IntPolynomial::symmetric_from_coefficients(p.nvars_, std::move(a));
  }
  IntPolynomial::Terms s1, s2;
  IntPolynomial out(p.nvars_);
  out.terms_ = p.terms_or_expand(IntPolynomial::kDefaultBudget, s1);
  for (const auto& [m, c] : q.terms_or_expand(IntPolynomial::kDefaultBudget, s2)) {
    auto [it, inserted] = out.terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) out.terms_.erase(it);
    }
  }
  return out;
}

IntPolynomial IntPolynomial::operator-() const {
  if (sym_) {
    auto a = sym_->coefficients();
    for (auto& v : a) v = -v;
    return symmetric_from_coefficients(nvars_, std::move(a));
  }
  IntPolynomial out(nvars_);
  for (const auto& [m, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, -c);
  return out;
}

IntPolynomial operator-(const IntPolynomial& p, const IntPolynomial& q) { return p + (-q); }

IntPolynomial operator*(const IntPolynomial& p, const IntPolynomial& q) {
  return IntPolynomial::multiply(p, q, static_cast<std::size_t>(-1));
}

std::optional<std::int64_t> IntPolynomial::stored_value(std::size_t w) const {
  if (!sym_ || !sym_->has_values || w < sym_->first_weight || w - sym_->first_weight >= sym_->values.size()) {
    return std::nullopt;
  }
  return sym_->values[w - sym_->first_weight];
}

IntPolynomial IntPolynomial::multiply(const IntPolynomial& p, const IntPolynomial& q, std::size_t budget) {
  check_nvars(p.nvars_, q.nvars_, "IntPolynomial::mul");
  IntPolynomial::Terms s1, s2;
  const auto& a = p.terms_or_expand(budget, s1);
  const auto& b = q.terms_or_expand(budget, s2);
  const double projected = static_cast<double>(a.size()) * static_cast<double>(b.size());
  if (projected > static_cast<double>(budget)) throw BudgetError("integer polynomial product exceeds budget", projected);
  IntPolynomial out(p.nvars_);
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      BigInt prod = ca * cb;
      auto [it, inserted] = out.terms_.try_emplace(ma * mb, prod);
      if (!inserted) {
        it->second += prod;
        if (it->second == 0) out.terms_.erase(it);
      }
    }
  }
  return out;
}

void IntPolynomial::serialize(std::ostream& out) const {
  if (sym_) {
    const auto& a = sym_->coefficients();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != 0) out << "sym " << i << ' ' << a[i].get_str() << '\n';
    }
    return;
  }
  for (const auto& [m, c] : terms_) {
    out << c.get_str() << " : ";
    bool first = true;
    for (auto v : m.vars()) {
      if (!first) out << ',';
      out << v;
      first = false;
    }
    out << '\n';
  }
}

// ----------------------------------------------------------- Gf2Polynomial

Gf2Polynomial Gf2Polynomial::constant(std::size_t nvars, bool one) {
  Gf2Polynomial p(nvars);
  if (one) p.terms_.insert(Monomial{});
  return p;
}

Gf2Polynomial Gf2Polynomial::variable(std::size_t nvars, std::uint32_t index) {
  if (index >= nvars) throw InputError("variable index out of range");
  Gf2Polynomial p(nvars);
  p.terms_.insert(Monomial{index});
  return p;
}

Gf2Polynomial Gf2Polynomial::from_monomials(std::size_t nvars, std::span<const Monomial> monomials) {
  Gf2Polynomial p(nvars);
  for (const auto& m : monomials) {
    if (m.span_end() > nvars) throw InputError("monomial variable out of range");
    p.toggle(m);
  }
  return p;
}

std::size_t Gf2Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& m : terms_) d = std::max(d, m.degree());
  return d;
}

std::vector<Monomial> Gf2Polynomial::sorted_terms() const {
  std::vector<Monomial> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end());
  return out;
}

void Gf2Polynomial::toggle(const Monomial& m) {
  if (auto it = terms_.find(m); it != terms_.end()) {
    terms_.erase(it);
  } else {
    terms_.insert(m);
  }
}

void Gf2Polynomial::toggle(Monomial&& m) {
  if (auto it = terms_.find(m); it != terms_.end()) {
    terms_.erase(it);
  } else {
    terms_.insert(std::move(m));
  }
}

bool Gf2Polynomial::eval(const BitVector& x) const {
  check_nvars(nvars_, x.dim(), "Gf2Polynomial::eval");
  bool acc = false;
  for (const auto& m : terms_) acc ^= m.eval(x);
  return acc;
}

Gf2Polynomial& Gf2Polynomial::operator+=(const Gf2Polynomial& q) {
  check_nvars(nvars_, q.nvars_, "Gf2Polynomial::add");
  for (const auto& m : q.terms_) toggle(m);
  return *this;
}

Gf2Polynomial operator+(const Gf2Polynomial& p, const Gf2Polynomial& q) {
  Gf2Polynomial out = p;
  out += q;
  return out;
}

Gf2Polynomial Gf2Polynomial::multiply(const Gf2Polynomial& p, const Gf2Polynomial& q, std::size_t budget) {
  check_nvars(p.nvars_, q.nvars_, "Gf2Polynomial::mul");
  const double projected = static_cast<double>(p.size()) * static_cast<double>(q.size());
  if (projected > static_cast<double>(budget)) throw BudgetError("GF(2) product exceeds budget", projected);
  Gf2Polynomial out(p.nvars_);
  out.terms_.reserve(static_cast<std::size_t>(projected));
  for (const auto& a : p.terms_) {
    for (const auto& b : q.terms_) out.toggle(a * b);
  }
  return out;
}

Gf2Polynomial operator*(const Gf2Polynomial& p, const Gf2Polynomial& q) {
  return Gf2Polynomial::multiply(p, q, static_cast<std::size_t>(-1));
}

void Gf2Polynomial::serialize(std::ostream& out) const {
  for (const auto& m : sorted_terms()) {
    bool first = true;
    for (auto v : m.vars()) {
      if (!first) out << ',';
      out << v;
      first = false;
    }
    out << '\n';
  }
}

}  // namespace polyham
