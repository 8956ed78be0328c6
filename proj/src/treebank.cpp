#include "rst/treebank.hpp"

#include <algorithm>
#include <cctype>

#include "rst/error.hpp"

namespace rst {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::DanglingParent: return "DanglingParent";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::MissingTree: return "MissingTree";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonBinaryTree: return "NonBinaryTree";
    case ErrorCode::NonBinaryMononuclear: return "NonBinaryMononuclear";
    case ErrorCode::BadColumnCount: return "BadColumnCount";
    case ErrorCode::NonIntegerHead: return "NonIntegerHead";
    case ErrorCode::AlignmentMismatch: return "AlignmentMismatch";
    case ErrorCode::BadBitstring: return "BadBitstring";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IllegalAction: return "IllegalAction";
    case ErrorCode::EmptyTreebank: return "EmptyTreebank";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LeafMismatch: return "LeafMismatch";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadModelFile: return "BadModelFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Labels

std::string_view to_string(Nuclearity nuc) {
  switch (nuc) {
    case Nuclearity::NS: return "NS";
    case Nuclearity::SN: return "SN";
    case Nuclearity::NN: return "NN";
  }
  return "NS";
}

std::optional<Nuclearity> parse_nuclearity(std::string_view s) {
  if (s == "NS") return Nuclearity::NS;
  if (s == "SN") return Nuclearity::SN;
  if (s == "NN") return Nuclearity::NN;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, kRelationClassCount> kRelationNames = {
    "Span",        "Joint",         "Elaboration", "Same-Unit",
    "Contrast",    "Explanation",   "Attribution", "Cause",
    "Background",  "Evaluation",    "Topic-Comment", "Condition",
    "Temporal",    "Summary",       "Enablement",  "Comparison",
    "Topic-Change", "Manner-Means",
};

}  // namespace

const std::array<RelationClass, kRelationClassCount>& all_relation_classes() {
  static const auto classes = [] {
    std::array<RelationClass, kRelationClassCount> out{};
    for (std::size_t i = 0; i < kRelationClassCount; ++i)
      out[i] = static_cast<RelationClass>(i);
    return out;
  }();
  return classes;
}

std::string_view to_string(RelationClass cls) {
  return kRelationNames[static_cast<std::size_t>(cls)];
}

std::optional<RelationClass> relation_class_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRelationClassCount; ++i)
    if (kRelationNames[i] == name) return static_cast<RelationClass>(i);
  return std::nullopt;
}

std::string RelationLabel::str() const {
  std::string out(to_string(cls));
  if (multinuclear) out += "-NN";
  return out;
}

std::optional<RelationLabel> parse_relation_label(std::string_view s) {
  bool nn = false;
  if (s.size() > 3 && s.substr(s.size() - 3) == "-NN") {
    nn = true;
    s.remove_suffix(3);
  }
  auto cls = relation_class_from_name(s);
  if (!cls) return std::nullopt;
  return RelationLabel{*cls, nn};
}

std::string RelationAliasTable::normalize_key(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string key;
  key.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    char c = raw[i];
    if (c == ' ' || c == '_') c = '-';
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

void RelationAliasTable::add(std::string_view alias, RelationClass cls) {
  entries_[normalize_key(alias)] = cls;
}

std::optional<RelationClass> RelationAliasTable::lookup(
    std::string_view raw) const {
  auto it = entries_.find(normalize_key(raw));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const RelationAliasTable& RelationAliasTable::standard() {
  static const RelationAliasTable table = [] {
    using R = RelationClass;
    const std::vector<std::pair<std::string_view, R>> base = {
        {"attribution", R::Attribution},
        {"attribution-negative", R::Attribution},
        {"background", R::Background},
        {"circumstance", R::Background},
        {"cause", R::Cause},
        {"result", R::Cause},
        {"consequence", R::Cause},
        {"cause-result", R::Cause},
        {"comparison", R::Comparison},
        {"preference", R::Comparison},
        {"analogy", R::Comparison},
        {"proportion", R::Comparison},
        {"condition", R::Condition},
        {"hypothetical", R::Condition},
        {"contingency", R::Condition},
        {"otherwise", R::Condition},
        {"contrast", R::Contrast},
        {"concession", R::Contrast},
        {"antithesis", R::Contrast},
        {"elaboration", R::Elaboration},
        {"elaboration-additional", R::Elaboration},
        {"elaboration-general-specific", R::Elaboration},
        {"elaboration-part-whole", R::Elaboration},
        {"elaboration-process-step", R::Elaboration},
        {"elaboration-object-attribute", R::Elaboration},
        {"elaboration-set-member", R::Elaboration},
        {"example", R::Elaboration},
        {"definition", R::Elaboration},
        {"enablement", R::Enablement},
        {"purpose", R::Enablement},
        {"evaluation", R::Evaluation},
        {"interpretation", R::Evaluation},
        {"conclusion", R::Evaluation},
        {"comment", R::Evaluation},
        {"explanation", R::Explanation},
        {"evidence", R::Explanation},
        {"explanation-argumentative", R::Explanation},
        {"reason", R::Explanation},
        {"joint", R::Joint},
        {"list", R::Joint},
        {"disjunction", R::Joint},
        {"manner-means", R::MannerMeans},
        {"manner", R::MannerMeans},
        {"means", R::MannerMeans},
        {"topic-comment", R::TopicComment},
        {"comment-topic", R::TopicComment},
        {"problem-solution", R::TopicComment},
        {"question-answer", R::TopicComment},
        {"statement-response", R::TopicComment},
        {"rhetorical-question", R::TopicComment},
        {"summary", R::Summary},
        {"restatement", R::Summary},
        {"temporal", R::Temporal},
        {"temporal-before", R::Temporal},
        {"temporal-after", R::Temporal},
        {"temporal-same-time", R::Temporal},
        {"sequence", R::Temporal},
        {"inverted-sequence", R::Temporal},
        {"topic-change", R::TopicChange},
        {"topic-shift", R::TopicChange},
        {"topic-drift", R::TopicChange},
        {"same-unit", R::SameUnit},
    };
    // Suffix conventions seen in the wild: RST-DT "-e" (embedded), "-s"/"-n"
    // (side markers), rstweb "_r"/"_m" (relation type).
    constexpr std::array<std::string_view, 6> suffixes = {"",   "-e", "-s",
                                                          "-n", "-r", "-m"};
    RelationAliasTable t;
    for (const auto& [name, cls] : base)
      for (auto suffix : suffixes) t.add(std::string(name) + std::string(suffix), cls);
    t.add("span", R::Span);
    return t;
  }();
  return table;
}

// ---------------------------------------------------------------------------
// Nodes

NodePtr Node::leaf(int edu_id) {
  if (edu_id < 1)
    throw Error(ErrorCode::ParseError, "EDU ids are 1-based, got " +
                                           std::to_string(edu_id));
  auto n = std::shared_ptr<Node>(new Node());
  n->span_ = {edu_id, edu_id};
  return n;
}

NodePtr Node::internal(NodePtr left, NodePtr right, Nuclearity nuc,
                       RelationClass rel) {
  std::vector<NodePtr> children;
  children.push_back(std::move(left));
  children.push_back(std::move(right));
  return nary(std::move(children), nuc, rel);
}

NodePtr Node::nary(std::vector<NodePtr> children, Nuclearity nuc,
                   RelationClass rel) {
  if (children.size() < 2)
    throw Error(ErrorCode::ParseError, "internal node needs two children");
  for (std::size_t i = 1; i < children.size(); ++i) {
    if (children[i - 1]->span().last + 1 != children[i]->span().first)
      throw Error(ErrorCode::ParseError,
                  "children are not adjacent: [" +
                      std::to_string(children[i - 1]->span().first) + "," +
                      std::to_string(children[i - 1]->span().last) +
                      "] then [" + std::to_string(children[i]->span().first) +
                      "," + std::to_string(children[i]->span().last) + "]");
  }
  auto n = std::shared_ptr<Node>(new Node());
  n->span_ = {children.front()->span().first, children.back()->span().last};
  n->children_ = std::move(children);
  n->nuclearity_ = nuc;
  n->relation_ = rel;
  return n;
}

std::size_t Node::leaf_count() const {
  return static_cast<std::size_t>(span_.size());
}

std::size_t Node::internal_count() const {
  std::size_t n = 0;
  for_each_node(*this, [&](const Node& x) { n += x.is_leaf() ? 0 : 1; });
  return n;
}

bool Node::is_binary() const {
  bool ok = true;
  for_each_node(*this, [&](const Node& x) {
    if (!x.is_leaf() && x.children().size() != 2) ok = false;
  });
  return ok;
}

bool operator==(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.span_ != b.span_ || a.children_.size() != b.children_.size())
    return false;
  if (a.is_leaf()) return true;
  if (a.nuclearity_ != b.nuclearity_ || a.relation_ != b.relation_)
    return false;
  for (std::size_t i = 0; i < a.children_.size(); ++i)
    if (!(*a.children_[i] == *b.children_[i])) return false;
  return true;
}

std::vector<int> leaf_ids(const Node& node) {
  std::vector<int> out;
  for_each_node(node, [&](const Node& n) {
    if (n.is_leaf()) out.push_back(n.edu());
  });
  return out;
}

// ---------------------------------------------------------------------------
// Documents

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Etemad: return "Etemad";
    case Source::Shargh: return "Shargh";
    case Source::Meidan: return "Meidan";
    case Source::Other: return "Other";
  }
  return "Other";
}

Source source_from_doc_id(std::string_view doc_id) {
  std::string lower;
  for (char c : doc_id)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower.starts_with("etemad")) return Source::Etemad;
  if (lower.starts_with("shargh")) return Source::Shargh;
  if (lower.starts_with("meidan") || lower.starts_with("meidaan"))
    return Source::Meidan;
  return Source::Other;
}

Document make_document(std::string doc_id,
                       const std::vector<std::vector<std::string>>& edu_tokens) {
  Document doc;
  doc.source = source_from_doc_id(doc_id);
  doc.doc_id = std::move(doc_id);
  std::vector<std::size_t> starts;
  for (const auto& edu : edu_tokens) {
    starts.push_back(doc.tokens.size());
    for (const auto& surface : edu) {
      Token t;
      t.index = doc.tokens.size();
      t.surface = surface;
      doc.tokens.push_back(std::move(t));
    }
  }
  doc.edus = edus_from_starts(doc.tokens, starts);
  return doc;
}

std::vector<Edu> edus_from_starts(const std::vector<Token>& tokens,
                                  const std::vector<std::size_t>& starts) {
  std::vector<Edu> edus;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::size_t end =
        k + 1 < starts.size() ? starts[k + 1] : tokens.size();
    if (end <= starts[k] || end > tokens.size())
      throw Error(ErrorCode::IndexOutOfRange, "empty or out-of-range EDU");
    Edu e;
    e.id = static_cast<int>(k) + 1;
    e.start = starts[k];
    e.end = end - 1;
    for (std::size_t i = e.start; i <= e.end; ++i) {
      if (i > e.start) e.text += ' ';
      e.text += tokens[i].surface;
    }
    edus.push_back(std::move(e));
  }
  return edus;
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonBinaryNode: return "NonBinaryNode";
    case ViolationKind::IllegalNuclearityForRelation:
      return "IllegalNuclearityForRelation";
    case ViolationKind::SpanAsRelation: return "SpanAsRelation";
    case ViolationKind::LeafSequenceMismatch: return "LeafSequenceMismatch";
    case ViolationKind::NonContiguousEdus: return "NonContiguousEdus";
  }
  return "Unknown";
}

std::vector<Violation> validate(const Node& tree, const LegalityTable* table) {
  std::vector<Violation> out;
  for_each_node(tree, [&](const Node& n) {
    if (n.is_leaf()) return;
    if (n.children().size() != 2)
      out.push_back({ViolationKind::NonBinaryNode, n.span(),
                     std::to_string(n.children().size()) + " children"});
    const auto rel = n.relation().cls;
    if (rel == RelationClass::Span) {
      out.push_back({ViolationKind::SpanAsRelation, n.span(),
                     "Span labels an internal node"});
      return;
    }
    if (!table) return;
    bool legal = false;
    if (n.nuclearity() == Nuclearity::NN) {
      legal = table->contains({Nuclearity::NN, rel});
    } else {
      legal = table->contains({Nuclearity::NS, rel}) ||
              table->contains({Nuclearity::SN, rel});
    }
    if (!legal)
      out.push_back({ViolationKind::IllegalNuclearityForRelation, n.span(),
                     std::string(to_string(n.nuclearity())) + " " +
                         std::string(to_string(rel))});
  });
  return out;
}

std::vector<Violation> validate_document(const Document& doc,
                                         const LegalityTable* table) {
  std::vector<Violation> out;
  std::size_t expect = 0;
  for (std::size_t k = 0; k < doc.edus.size(); ++k) {
    const Edu& e = doc.edus[k];
    if (e.id != static_cast<int>(k) + 1 || e.start != expect || e.end < e.start) {
      out.push_back({ViolationKind::NonContiguousEdus, {e.id, e.id},
                     "EDU " + std::to_string(e.id) + " breaks contiguity"});
      break;
    }
    expect = e.end + 1;
  }
  if (!doc.edus.empty() && expect != doc.tokens.size())
    out.push_back({ViolationKind::NonContiguousEdus,
                   {doc.edus.back().id, doc.edus.back().id},
                   "last EDU does not end at last token"});
  if (doc.tree) {
    auto tv = validate(*doc.tree, table);
    out.insert(out.end(), tv.begin(), tv.end());
    const auto leaves = leaf_ids(*doc.tree);
    bool match = leaves.size() == doc.edus.size();
    for (std::size_t i = 0; match && i < leaves.size(); ++i)
      match = leaves[i] == doc.edus[i].id;
    if (!match)
      out.push_back({ViolationKind::LeafSequenceMismatch, doc.tree->span(),
                     "tree leaves do not enumerate the EDUs"});
  }
  return out;
}

NodePtr binarize(const NodePtr& tree) {
  if (tree->is_leaf()) return tree;
  std::vector<NodePtr> kids;
  bool changed = false;
  for (const auto& c : tree->children()) {
    kids.push_back(binarize(c));
    changed = changed || kids.back() != c;
  }
  if (kids.size() == 2) {
    if (!changed) return tree;
    return Node::internal(kids[0], kids[1], tree->nuclearity(),
                          tree->relation().cls);
  }
  if (tree->nuclearity() != Nuclearity::NN)
    throw Error(ErrorCode::NonBinaryMononuclear,
                "mononuclear node over EDUs " +
                    std::to_string(tree->span().first) + "-" +
                    std::to_string(tree->span().last) + " has " +
                    std::to_string(kids.size()) + " children");
  const auto rel = tree->relation().cls;
  NodePtr acc = kids.back();
  for (std::size_t i = kids.size() - 1; i-- > 0;)
    acc = Node::internal(kids[i], acc, Nuclearity::NN, rel);
  return acc;
}

// ---------------------------------------------------------------------------
// Statistics

double CorpusStats::avg_words_per_doc() const {
  return documents == 0 ? 0.0
                        : static_cast<double>(words) /
                              static_cast<double>(documents);
}

std::size_t CorpusStats::histogram_total() const {
  std::size_t total = 0;
  for (const auto& [label, n] : relation_histogram) total += n;
  return total;
}

double CorpusStats::percentage(const RelationLabel& label) const {
  const auto total = histogram_total();
  auto it = relation_histogram.find(label);
  if (total == 0 || it == relation_histogram.end()) return 0.0;
  return 100.0 * static_cast<double>(it->second) / static_cast<double>(total);
}

std::map<RelationClass, std::size_t> CorpusStats::merged_histogram() const {
  std::map<RelationClass, std::size_t> out;
  for (const auto& [label, n] : relation_histogram) out[label.cls] += n;
  return out;
}

CorpusStats corpus_stats(std::span<const Document> docs) {
  CorpusStats s;
  for (const auto& doc : docs) {
    if (!doc.tree)
      throw Error(ErrorCode::MissingTree, "document '" + doc.doc_id + "'");
    ++s.documents;
    s.words += doc.tokens.size();
    s.edu_count += doc.edus.size();
    for_each_node(*doc.tree, [&](const Node& n) {
      if (n.is_leaf()) return;
      ++s.span_count;
      const auto k = n.children().size();
      if (n.nuclearity() == Nuclearity::NN) {
        s.nucleus_count += k;
        s.relation_histogram[n.relation()] += k;
      } else {
        s.nucleus_count += 1;
        s.satellite_count += k - 1;
        s.relation_histogram[{RelationClass::Span, false}] += 1;
        s.relation_histogram[n.relation()] += k - 1;
      }
    });
  }
  return s;
}

}  // namespace rst
