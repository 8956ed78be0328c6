#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rst/parser.hpp"
#include "rst/segmenter.hpp"

namespace rst {

// Flat `key = value` file. '#' starts a comment line; lists are comma
// separated.
class Config {
 public:
  static Config parse(std::string_view text);  // throws BadConfig
  static Config load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> list(std::string_view key) const;
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

struct RunConfig {
  std::filesystem::path corpus;    // rs3 directory or .jsonl (gold side for eval)
  std::filesystem::path input;     // input of normalize/segment/parse, predictions for eval
  std::filesystem::path conllu;    // directory of <doc_id>.conllu
  std::filesystem::path clusters;  // Brown cluster file
  std::filesystem::path model;
  std::filesystem::path output;

  std::vector<std::string> train_ids;
  std::vector<std::string> dev_ids;
  std::vector<std::string> test_ids;

  ParserGrid grid;      // grid lists; grid.base holds batch size, epochs, seed
  ParserHyper parser;   // first value of each grid list
  SegmenterHyper segmenter;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  bool macro = false;

  // Throws BadConfig for unknown keys, bad numbers, overlapping splits or
  // missing input paths.
  static RunConfig from(const Config& c);
  void set_seed(std::uint64_t s);
  void check_paths() const;
};

}  // namespace rst
