#include "rst/sparse.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstring>

#include "rst/error.hpp"

namespace rst {

SparseVector SparseVector::from_pairs(std::vector<Entry> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector v;
  for (const auto& [id, value] : pairs) {
    if (!v.entries_.empty() && v.entries_.back().first == id) {
      v.entries_.back().second += value;
    } else {
      v.entries_.emplace_back(id, value);
    }
  }
  std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0.0; });
  return v;
}

SparseVector SparseVector::binary(std::vector<std::size_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  SparseVector v;
  v.entries_.reserve(ids.size());
  for (auto id : ids) v.entries_.emplace_back(id, 1.0);
  return v;
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& [id, value] : entries_) s += dense[id] * value;
  return s;
}

void SparseVector::axpy(double scale, std::span<double> dense) const {
  for (const auto& [id, value] : entries_) dense[id] += scale * value;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second * e.second;
  return s;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> FeatureDictionary::index(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  if (frozen_) return std::nullopt;
  const std::size_t id = names_.size();
  names_.emplace_back(name);
  ids_.emplace(std::string(name), id);
  return id;
}

std::optional<std::size_t> FeatureDictionary::find(std::string_view name) const {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  return std::nullopt;
}

SparseVector FeatureDictionary::vectorize(std::span<const std::string> names) {
  std::vector<std::size_t> ids;
  ids.reserve(names.size());
  for (const auto& n : names)
    if (auto id = index(n)) ids.push_back(*id);
  return SparseVector::binary(std::move(ids));
}

std::string FeatureDictionary::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    out += names_[i] + "\t" + std::to_string(i) + "\n";
  return out;
}

FeatureDictionary FeatureDictionary::from_tsv(std::string_view tsv) {
  FeatureDictionary d;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < tsv.size()) {
    auto nl = tsv.find('\n', start);
    if (nl == std::string_view::npos) nl = tsv.size();
    auto line = tsv.substr(start, nl - start);
    start = nl + 1;
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::BadModelFile, "dictionary line without id", lineno);
    std::size_t id = 0;
    const auto num = line.substr(tab + 1);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), id);
    if (ec != std::errc() || p != num.data() + num.size() || id != d.size())
      throw Error(ErrorCode::BadModelFile, "dictionary ids must be 0..n-1 in order",
                  lineno);
    d.index(line.substr(0, tab));
  }
  d.freeze();
  return d;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::BadModelFile, "bad number '" + std::string(s) + "'");
  return v;
}

// ---------------------------------------------------------------------------

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

}  // namespace rst
