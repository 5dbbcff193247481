#pragma once

#include <iosfwd>
#include <vector>

#include "polyham/bitvector.hpp"

namespace polyham {

enum class VectorFormat { kText01, kHex };

/// Red/blue collections of equal-dimension vectors. Results refer to members
/// by (color, 0-based index) so member order is never changed after loading.
struct Dataset {
  std::size_t dim = 0;
  std::vector<BitVector> red;
  std::vector<BitVector> blue;

  /// Throws InputError unless every member has dimension dim.
  void validate() const;
};

/// Parses a dataset file. text01: a line `R`, one 0/1 string per line, a line
/// `B`, then the blue vectors. hex: the same with a leading `dim=<d>` header
/// and lowercase hex vectors. Lines starting with `#` and blank lines are skipped.
Dataset load_dataset(std::istream& in, VectorFormat format);
void write_dataset(std::ostream& out, const Dataset& ds, VectorFormat format);

/// A flat vector list in either format. Section markers are optional; when
/// present their contents are concatenated red first.
std::vector<BitVector> load_vectors(std::istream& in, VectorFormat format);

}  // namespace polyham
