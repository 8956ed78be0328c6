#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rst {

// ---------------------------------------------------------------------------
// Labels

enum class Nuclearity : unsigned char { NS, SN, NN };

std::string_view to_string(Nuclearity nuc);
std::optional<Nuclearity> parse_nuclearity(std::string_view s);

// The coarse-grained 18-class inventory. `Span` exists only as the
// nucleus-side label of mononuclear attachments in serialized forms and in
// corpus statistics; tree nodes never carry it legitimately.
enum class RelationClass : unsigned char {
  Span,
  Joint,
  Elaboration,
  SameUnit,
  Contrast,
  Explanation,
  Attribution,
  Cause,
  Background,
  Evaluation,
  TopicComment,
  Condition,
  Temporal,
  Summary,
  Enablement,
  Comparison,
  TopicChange,
  MannerMeans,
};

inline constexpr std::size_t kRelationClassCount = 18;

const std::array<RelationClass, kRelationClassCount>& all_relation_classes();

// Canonical display name, e.g. "Same-Unit", "Manner-Means".
std::string_view to_string(RelationClass cls);

// Exact match against canonical names (case-sensitive).
std::optional<RelationClass> relation_class_from_name(std::string_view name);

struct RelationLabel {
  RelationClass cls = RelationClass::Span;
  bool multinuclear = false;

  auto operator<=>(const RelationLabel&) const = default;

  // "Contrast" or "Contrast-NN".
  std::string str() const;
};

std::optional<RelationLabel> parse_relation_label(std::string_view s);

// Maps raw relation names found in rs3 files onto the coarse inventory.
// Lookup key normalization: ASCII case-fold, spaces and underscores become
// hyphens, surrounding whitespace trimmed. Anything beyond that (fine-grained
// names, rstweb's "_m"/"_r" suffixes, RST-DT's "-e"/"-s" suffixes) must be an
// explicit entry.
class RelationAliasTable {
 public:
  // Canonical names plus the standard fine-to-coarse mapping.
  static const RelationAliasTable& standard();

  RelationAliasTable() = default;

  void add(std::string_view alias, RelationClass cls);
  std::optional<RelationClass> lookup(std::string_view raw) const;

  static std::string normalize_key(std::string_view raw);

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, RelationClass, std::less<>> entries_;
};

// ---------------------------------------------------------------------------
// Tokens, EDUs, documents

inline constexpr int kRootHead = -1;
inline constexpr int kNoHead = -2;  // not annotated

struct Token {
  std::size_t index = 0;
  std::string surface;
  std::string pos;
  std::string deprel;
  int head = kNoHead;  // document-global index, kRootHead, or kNoHead
  std::optional<std::string> cluster;
  std::string stem;
  int sentence = -1;  // -1 when not annotated

  bool operator==(const Token&) const = default;
};

// Inclusive range of 1-based EDU ids.
struct EduRange {
  int first = 0;
  int last = 0;

  auto operator<=>(const EduRange&) const = default;
  int size() const { return last - first + 1; }
};

struct Edu {
  int id = 0;  // 1-based
  std::size_t start = 0;  // inclusive token indices
  std::size_t end = 0;
  std::string text;

  bool operator==(const Edu&) const = default;
};

// ---------------------------------------------------------------------------
// Trees

class Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable RST tree node. Internal nodes are normally binary; n-ary nodes
// only appear between read_rs3 and binarize.
class Node {
 public:
  static NodePtr leaf(int edu_id);
  // Throws ParseError if the children are not adjacent left-to-right.
  static NodePtr internal(NodePtr left, NodePtr right, Nuclearity nuc,
                          RelationClass rel);
  static NodePtr nary(std::vector<NodePtr> children, Nuclearity nuc,
                      RelationClass rel);

  bool is_leaf() const { return children_.empty(); }
  int edu() const { return span_.first; }
  const std::vector<NodePtr>& children() const { return children_; }
  const Node& left() const { return *children_.front(); }
  const Node& right() const { return *children_.back(); }
  Nuclearity nuclearity() const { return nuclearity_; }
  RelationLabel relation() const {
    return {relation_, nuclearity_ == Nuclearity::NN};
  }
  EduRange span() const { return span_; }

  std::size_t leaf_count() const;
  std::size_t internal_count() const;
  bool is_binary() const;

  friend bool operator==(const Node& a, const Node& b);

 private:
  Node() = default;

  std::vector<NodePtr> children_;
  Nuclearity nuclearity_ = Nuclearity::NS;
  RelationClass relation_ = RelationClass::Span;
  EduRange span_;
};

// Visits nodes in post-order.
template <typename F>
void for_each_node(const Node& node, F&& f) {
  for (const auto& c : node.children()) for_each_node(*c, f);
  f(node);
}

std::vector<int> leaf_ids(const Node& node);

enum class Source : unsigned char { Etemad, Shargh, Meidan, Other };

std::string_view to_string(Source s);
// Prefix match on the lower-cased document id.
Source source_from_doc_id(std::string_view doc_id);

struct Document {
  std::string doc_id;
  std::vector<Token> tokens;
  std::vector<Edu> edus;
  NodePtr tree;  // may be null
  Source source = Source::Other;
};

// Builds EDUs from per-EDU token lists. Token indices are assigned
// document-globally.
Document make_document(std::string doc_id,
                       const std::vector<std::vector<std::string>>& edu_tokens);

// Replaces the EDU list with one derived from the given start offsets.
std::vector<Edu> edus_from_starts(const std::vector<Token>& tokens,
                                  const std::vector<std::size_t>& starts);

// ---------------------------------------------------------------------------
// Validation

struct LegalPair {
  Nuclearity nuclearity;
  RelationClass relation;
  auto operator<=>(const LegalPair&) const = default;
};

using LegalityTable = std::set<LegalPair>;

enum class ViolationKind {
  NonBinaryNode,
  IllegalNuclearityForRelation,
  SpanAsRelation,
  LeafSequenceMismatch,
  NonContiguousEdus,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  EduRange span;
  std::string detail;
};

// Without a table every non-Span relation is accepted under any nuclearity.
std::vector<Violation> validate(const Node& tree,
                                const LegalityTable* table = nullptr);

// Tree checks plus EDU contiguity and leaf/EDU agreement.
std::vector<Violation> validate_document(const Document& doc,
                                         const LegalityTable* table = nullptr);

// Right-branching expansion of n-ary multinuclear nodes.
NodePtr binarize(const NodePtr& tree);

// ---------------------------------------------------------------------------
// Serialization

Document read_rs3(std::string_view xml, std::string doc_id = {},
                  const RelationAliasTable& aliases =
                      RelationAliasTable::standard());
std::string write_rs3(const Document& doc);

NodePtr read_bracketed(std::string_view text);
std::string write_bracketed(const Node& node);

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t words = 0;
  std::size_t edu_count = 0;
  std::size_t span_count = 0;  // internal nodes
  std::size_t nucleus_count = 0;
  std::size_t satellite_count = 0;
  std::map<RelationLabel, std::size_t> relation_histogram;

  double avg_words_per_doc() const;
  std::size_t histogram_total() const;
  double percentage(const RelationLabel& label) const;
  // Counts with mononuclear and multinuclear variants of a class summed.
  std::map<RelationClass, std::size_t> merged_histogram() const;
};

CorpusStats corpus_stats(std::span<const Document> docs);

}  // namespace rst
