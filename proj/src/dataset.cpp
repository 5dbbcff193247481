#include "polyham/dataset.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "polyham/errors.hpp"

namespace polyham {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Parsed {
  std::optional<std::size_t> dim;
  std::vector<BitVector> red;
  std::vector<BitVector> blue;
  bool saw_red = false;
  bool saw_blue = false;
};

Parsed parse(std::istream& in, VectorFormat format, bool require_sections) {
  Parsed p;
  std::string raw;
  std::size_t lineno = 0;
  enum class Section { kNone, kRed, kBlue } section = Section::kNone;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "R") {
      if (p.saw_red || p.saw_blue) throw ParseError(lineno, "unexpected section header R");
      p.saw_red = true;
      section = Section::kRed;
      continue;
    }
    if (line == "B") {
      if (p.saw_blue) throw ParseError(lineno, "duplicate section header B");
      if (require_sections && !p.saw_red) throw ParseError(lineno, "section B before section R");
      p.saw_blue = true;
      section = Section::kBlue;
      continue;
    }
    if (line.starts_with("dim=")) {
      if (format != VectorFormat::kHex) throw ParseError(lineno, "dim header only valid in hex format");
      if (p.dim) throw ParseError(lineno, "duplicate dim header");
      try {
        std::size_t used = 0;
        const std::string num(line.substr(4));
        const auto d = std::stoull(num, &used);
        if (used != num.size() || d == 0) throw std::invalid_argument("dim");
        p.dim = d;
      } catch (const std::logic_error&) {
        throw ParseError(lineno, "malformed dim header");
      }
      continue;
    }
    if (section == Section::kNone && require_sections) throw ParseError(lineno, "missing section header");
    if (format == VectorFormat::kHex && !p.dim) throw ParseError(lineno, "missing dim header");
    BitVector v;
    try {
      v = format == VectorFormat::kText01 ? BitVector::from_string(line) : BitVector::from_hex(line, *p.dim);
    } catch (const InputError& e) {
      throw ParseError(lineno, e.what());
    }
    if (!p.dim) p.dim = v.dim();
    if (v.dim() != *p.dim) {
      throw ParseError(lineno, "ragged line: length " + std::to_string(v.dim()) + ", expected " +
                                   std::to_string(*p.dim));
    }
    if (v.dim() == 0) throw ParseError(lineno, "empty vector");
    (section == Section::kBlue ? p.blue : p.red).push_back(std::move(v));
  }
  if (require_sections && !p.saw_red) throw ParseError(lineno, "missing section header R");
  if (require_sections && !p.saw_blue) throw ParseError(lineno, "missing section header B");
  if (!p.dim) throw ParseError(lineno, "no vectors and no dimension");
  return p;
}

}  // namespace

void Dataset::validate() const {
  if (dim == 0) throw InputError("dataset dimension must be positive");
  for (const auto* side : {&red, &blue}) {
    for (const auto& v : *side) {
      if (v.dim() != dim) throw InputError("dataset member has dimension " + std::to_string(v.dim()));
    }
  }
}

Dataset load_dataset(std::istream& in, VectorFormat format) {
  auto p = parse(in, format, true);
  return Dataset{*p.dim, std::move(p.red), std::move(p.blue)};
}

std::vector<BitVector> load_vectors(std::istream& in, VectorFormat format) {
  auto p = parse(in, format, false);
  auto out = std::move(p.red);
  for (auto& v : p.blue) out.push_back(std::move(v));
  return out;
}

void write_dataset(std::ostream& out, const Dataset& ds, VectorFormat format) {
  ds.validate();
  const auto emit = [&](const BitVector& v) {
    out << (format == VectorFormat::kText01 ? v.to_string() : v.to_hex()) << '\n';
  };
  if (format == VectorFormat::kHex) out << "dim=" << ds.dim << '\n';
  out << "R\n";
  for (const auto& v : ds.red) emit(v);
  out << "B\n";
  for (const auto& v : ds.blue) emit(v);
}

}  // namespace polyham
