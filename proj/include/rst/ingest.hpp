#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rst/treebank.hpp"

namespace rst {

// Tokens of one CoNLL-U sentence. `index` and `head` are sentence-local
// (0-based); the root's head is kRootHead.
using Sentence = std::vector<Token>;

// Multiword range lines (`1-2`) and empty nodes (`1.1`) are skipped.
std::vector<Sentence> read_conllu(std::string_view text);

class ClusterTable {
 public:
  ClusterTable() = default;
  explicit ClusterTable(std::vector<std::size_t> prefix_lengths)
      : prefix_lengths_(std::move(prefix_lengths)) {}

  void add(std::string word, std::string bits);
  std::optional<std::string> lookup(std::string_view word) const;

  const std::vector<std::size_t>& prefix_lengths() const {
    return prefix_lengths_;
  }
  void set_prefix_lengths(std::vector<std::size_t> lengths) {
    prefix_lengths_ = std::move(lengths);
  }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
  std::vector<std::size_t> prefix_lengths_{4, 6, 10};
};

// Accepts `bits\tword\tcount` (Liang's wcluster output) or `word\tbits`.
ClusterTable load_clusters(std::string_view tsv);

// Surfaces are equal once ZWNJ and space are treated as the same character.
bool surfaces_equivalent(std::string_view a, std::string_view b);

// One-to-one alignment of document tokens with the concatenated sentences.
// Heads are remapped to document-global indices. Throws AlignmentMismatch at
// the first divergent position.
std::vector<Token> align(std::span<const std::string> doc_tokens,
                         const std::vector<Sentence>& sentences,
                         const ClusterTable* clusters = nullptr);

Document align_document(const Document& doc,
                        const std::vector<Sentence>& sentences,
                        const ClusterTable* clusters = nullptr);

// Aligned documents as JSON lines, one document per line:
//   {"doc_id": str, "source": str,
//    "tokens": [{"surface","pos","deprel","head","cluster","stem","sentence"}],
//    "edus": [[start, end], ...], "tree": bracketed string | null}
std::string to_json_line(const Document& doc);
Document from_json_line(std::string_view line);
std::string write_jsonl(std::span<const Document> docs);
std::vector<Document> read_jsonl(std::string_view text);

}  // namespace rst
