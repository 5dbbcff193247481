#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "polyham/bitvector.hpp"

namespace polyham {

using BigInt = mpz_class;

/// Multilinear monomial: a strictly increasing list of 0-based variable
/// indices. The empty list is the constant monomial.
class Monomial {
 public:
  Monomial() = default;
  /// Sorts and deduplicates (x_i^2 = x_i on Boolean points).
  explicit Monomial(std::vector<std::uint32_t> vars);
  Monomial(std::initializer_list<std::uint32_t> vars) : Monomial(std::vector<std::uint32_t>(vars)) {}

  std::span<const std::uint32_t> vars() const noexcept { return vars_; }
  std::size_t degree() const noexcept { return vars_.size(); }
  bool is_constant() const noexcept { return vars_.empty(); }
  /// Largest index + 1, or 0 for the constant monomial.
  std::uint32_t span_end() const noexcept { return vars_.empty() ? 0 : vars_.back() + 1; }

  /// 1 iff every variable of the monomial is set in x.
  bool eval(const BitVector& x) const;
  /// Multilinear product (union of variable sets).
  friend Monomial operator*(const Monomial& a, const Monomial& b);

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  struct Sorted {};
  Monomial(Sorted, std::vector<std::uint32_t> vars) : vars_(std::move(vars)) {}
  std::vector<std::uint32_t> vars_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

class Gf2Polynomial;

/// Multilinear polynomial over the integers.
///
/// Two storage modes. Explicit mode maps monomials to nonzero coefficients.
/// Symmetric mode stands for sum_i a_i * e_i(x), e_i the elementary symmetric
/// polynomial of degree i; it is stored either by the a_i or by its values on
/// a run of consecutive Hamming weights (interpolation form), in which case the
/// a_i are derived on first use. Symmetric polynomials are evaluated through
/// |x| only and expanded to monomials only on request.
class IntPolynomial {
 public:
  using Terms = std::map<Monomial, BigInt>;

  IntPolynomial() : IntPolynomial(0) {}
  explicit IntPolynomial(std::size_t nvars);

  static IntPolynomial constant(std::size_t nvars, const BigInt& c);
  static IntPolynomial variable(std::size_t nvars, std::uint32_t index);
  static IntPolynomial from_terms(std::size_t nvars, Terms terms);
  /// sum_i coeffs[i] * e_i(x).
  static IntPolynomial symmetric_from_coefficients(std::size_t nvars, std::vector<BigInt> coeffs);
  /// The unique symmetric polynomial of degree < values.size() taking
  /// values[j] on weight first_weight + j.
  static IntPolynomial symmetric_from_values(std::size_t nvars, std::size_t first_weight,
                                             std::vector<std::int64_t> values);

  std::size_t nvars() const noexcept { return nvars_; }
  bool is_symmetric() const noexcept { return sym_ != nullptr; }
  bool is_zero() const;
  std::size_t degree() const;
  /// Number of monomials with nonzero coefficient (exact, may be astronomically large).
  BigInt monomial_count() const;

  /// Symmetric-mode coefficients a_0..a_deg; throws if explicit mode.
  const std::vector<BigInt>& symmetric_coefficients() const;

  BigInt eval(const BitVector& x) const;
  /// Value on any input of Hamming weight w; symmetric mode only.
  BigInt eval_weight(std::size_t w) const;

  /// Explicit monomial map; symmetric polynomials are expanded if the
  /// monomial count is within budget, otherwise BudgetError.
  Terms expand(std::size_t budget) const;
  /// Explicit-mode copy (same budget rule).
  IntPolynomial to_explicit(std::size_t budget) const;

  /// Replaces variable j with ambient variable mapping[j] (repeats merge).
  IntPolynomial substitute(std::span<const std::uint32_t> mapping, std::size_t ambient_nvars,
                           std::size_t budget) const;

  Gf2Polynomial mod2(std::size_t budget) const;

  /// Product with a guard: BudgetError if |p| * |q| exceeds budget.
  static IntPolynomial multiply(const IntPolynomial& p, const IntPolynomial& q, std::size_t budget);
  /// Value on weight w when it is one of the stored interpolation values.
  std::optional<std::int64_t> stored_value(std::size_t w) const;

  friend IntPolynomial operator+(const IntPolynomial& p, const IntPolynomial& q);
  friend IntPolynomial operator-(const IntPolynomial& p, const IntPolynomial& q);
  friend IntPolynomial operator*(const IntPolynomial& p, const IntPolynomial& q);
  IntPolynomial operator-() const;

  /// Debug serialization: `<coeff> : i1,i2,...` per term, or `sym <degree> <coeff>`.
  void serialize(std::ostream& out) const;

  static constexpr std::size_t kDefaultBudget = std::size_t{1} << 20;

 private:
  struct SymmetricForm;
  const Terms& terms_or_expand(std::size_t budget, Terms& scratch) const;

  std::size_t nvars_;
  Terms terms_;
  std::shared_ptr<const SymmetricForm> sym_;
};

/// Multilinear polynomial over GF(2): a set of monomials, each with coefficient 1.
class Gf2Polynomial {
 public:
  using TermSet = std::unordered_set<Monomial, MonomialHash>;

  Gf2Polynomial() : Gf2Polynomial(0) {}
  explicit Gf2Polynomial(std::size_t nvars) : nvars_(nvars) {}
  static Gf2Polynomial constant(std::size_t nvars, bool one);
  static Gf2Polynomial variable(std::size_t nvars, std::uint32_t index);
  static Gf2Polynomial from_monomials(std::size_t nvars, std::span<const Monomial> monomials);

  std::size_t nvars() const noexcept { return nvars_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t degree() const;
  const TermSet& terms() const noexcept { return terms_; }
  /// Terms in ascending order (deterministic output).
  std::vector<Monomial> sorted_terms() const;
  bool contains(const Monomial& m) const { return terms_.contains(m); }

  /// Adds m (toggles it in the term set).
  void toggle(const Monomial& m);
  void toggle(Monomial&& m);

  bool eval(const BitVector& x) const;

  friend Gf2Polynomial operator+(const Gf2Polynomial& p, const Gf2Polynomial& q);
  friend Gf2Polynomial operator*(const Gf2Polynomial& p, const Gf2Polynomial& q);
  Gf2Polynomial& operator+=(const Gf2Polynomial& q);
  /// Product with a guard: throws BudgetError if |p|*|q| exceeds budget.
  static Gf2Polynomial multiply(const Gf2Polynomial& p, const Gf2Polynomial& q, std::size_t budget);

  friend bool operator==(const Gf2Polynomial& a, const Gf2Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  void serialize(std::ostream& out) const;

 private:
  std::size_t nvars_;
  TermSet terms_;
};

/// Binomial coefficient C(n, k) for n >= 0 (0 when k > n).
BigInt binomial(std::size_t n, std::size_t k);

}  // namespace polyham
