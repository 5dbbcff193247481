#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyham/polynomial.hpp"

namespace polyham {

/// Integer-coefficient symmetric polynomial p on n variables of degree <= r-1
/// with p(x) = c[i-1] whenever |x| = k + i, 1 <= i <= r. Requires k >= -1,
/// r >= 1 and n >= k + r; otherwise ParameterError.
///
/// The result is kept in symmetric interpolation form; its coefficients a_i
/// (p = sum a_i e_i) are produced on demand by interpolation_coefficients().
IntPolynomial interpolate_weights(std::size_t n, std::int64_t k, std::size_t r, std::span<const std::int64_t> c);

/// Coefficients a_0..a_{r-1} of the weight interpolant through (k+1+j, c[j]),
/// computed through Newton forward differences and a change of binomial basis.
/// Exact integers for any integer data.
std::vector<BigInt> interpolation_coefficients(std::int64_t k, std::span<const std::int64_t> c);

/// Forward differences Delta^m c at the first knot, m = 0..r-1.
std::vector<BigInt> forward_differences(std::span<const std::int64_t> c);

/// The r x r matrix with entries C(k + row + 1, col), rows/cols 0-based.
std::vector<std::vector<BigInt>> binomial_matrix(std::int64_t k, std::size_t r);

/// Exact determinant of binomial_matrix(k, r) by fraction-free (Bareiss) elimination.
BigInt binomial_matrix_det(std::int64_t k, std::size_t r);

/// Solves binomial_matrix(k, r) * a = c exactly by fraction-free elimination
/// with a final exact division by the determinant. Independent of
/// interpolation_coefficients; cubic in r.
std::vector<BigInt> solve_binomial_system(std::int64_t k, std::span<const BigInt> c);

}  // namespace polyham
