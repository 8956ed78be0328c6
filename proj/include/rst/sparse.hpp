#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rst {

// Sorted (id, value) pairs; ids strictly increasing, no stored zeros.
class SparseVector {
 public:
  using Entry = std::pair<std::size_t, double>;

  SparseVector() = default;
  // Accepts unsorted input; duplicate ids are summed and zeros dropped.
  static SparseVector from_pairs(std::vector<Entry> pairs);
  static SparseVector binary(std::vector<std::size_t> ids);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double dot(std::span<const double> dense) const;
  // dense += scale * this
  void axpy(double scale, std::span<double> dense) const;
  double squared_norm() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

class FeatureDictionary {
 public:
  // Returns the id, adding the name unless frozen.
  std::optional<std::size_t> index(std::string_view name);
  std::optional<std::size_t> find(std::string_view name) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t id) const { return names_[id]; }

  // Binary vector over the known names; unknown names are skipped once frozen.
  SparseVector vectorize(std::span<const std::string> names);

  // `name \t id` lines in id order.
  std::string to_tsv() const;
  static FeatureDictionary from_tsv(std::string_view tsv);

 private:
  std::map<std::string, std::size_t, std::less<>> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

// Shortest round-trip decimal form of a double.
std::string format_double(double v);
double parse_double(std::string_view s);

// SplitMix64 with hand-written distributions: shuffles and initializations
// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rst
