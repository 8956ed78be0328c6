#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rst/treebank.hpp"

namespace rst {

// A directory of *.rs3 files (doc id = file stem, sorted by name), a single
// .rs3 file, or a .jsonl file of ingested documents. Trees are binarized.
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  const RelationAliasTable& aliases =
                                      RelationAliasTable::standard());

// Writes one <doc_id>.rs3 per document that has a tree.
void write_rs3_dir(std::span<const Document> docs, const std::filesystem::path& dir);

struct SplitIds {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

// Per source, one fifteenth of the documents (rounded) go to dev and as many
// to test; the rest train. Matches 130/10/10 on a 60/41/49 corpus.
SplitIds default_split(std::span<const Document> docs, std::uint64_t seed);

struct CorpusSplit {
  std::vector<Document> train;
  std::vector<Document> dev;
  std::vector<Document> test;
};

// Explicit id lists win when any is given; unknown ids throw BadConfig.
CorpusSplit split_corpus(std::vector<Document> docs, const SplitIds& explicit_ids,
                         std::uint64_t seed);

}  // namespace rst
