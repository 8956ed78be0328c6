#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rst/treebank.hpp"

namespace rst {

struct LabeledSpan {
  EduRange span;
  Nuclearity nuclearity;
  RelationLabel relation;

  auto operator<=>(const LabeledSpan&) const = default;
};

// One entry per internal node, root included, in post-order.
std::vector<LabeledSpan> extract_labeled_spans(const Node& tree);

struct FacetCounts {
  std::size_t matched = 0;
  std::size_t pred_total = 0;
  std::size_t gold_total = 0;

  double precision() const;
  double recall() const;
  double f1() const;  // 1.0 when both totals are zero
  FacetCounts& operator+=(const FacetCounts& o);
};

class ConfusionMatrix {
 public:
  void add(const RelationLabel& gold, const RelationLabel& pred, std::size_t n = 1);
  std::size_t count(const RelationLabel& gold, const RelationLabel& pred) const;
  // Every label seen as gold or predicted, sorted.
  std::vector<RelationLabel> labels() const;
  // Row-normalized percentages; each non-empty row sums to 100.
  std::map<RelationLabel, std::map<RelationLabel, double>> row_percentages() const;
  // Gold labels as rows, predicted as columns, percentages to 2 decimals.
  std::string to_tsv() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& o);

 private:
  std::map<RelationLabel, std::map<RelationLabel, std::size_t>> counts_;
};

ConfusionMatrix confusion(
    std::span<const std::pair<RelationLabel, RelationLabel>> gold_pred_pairs);

// Node-level RST-Parseval facets:
//   S: span; N: span + nuclearity; R: span + nuclearity + relation.
struct EvalReport {
  FacetCounts span;
  FacetCounts nuclearity;
  FacetCounts relation;
  ConfusionMatrix confusion;
  std::vector<std::array<double, 3>> per_document;  // S, N, R F1 per pair

  // Micro-averaged F1 percentages.
  double S() const { return 100.0 * span.f1(); }
  double N() const { return 100.0 * nuclearity.f1(); }
  double R() const { return 100.0 * relation.f1(); }
  // Mean of per-document F1 percentages.
  std::array<double, 3> macro() const;

  EvalReport& operator+=(const EvalReport& o);
};

// Trees must share the same leaf sequence; throws LeafMismatch otherwise.
EvalReport parseval(const Node& pred, const Node& gold);

// "S 78.70 N 64.01 R 44.28"
std::string format_triple(double s, double n, double r);
std::string format_triple(const EvalReport& r, bool macro = false);
// facet, precision, recall, f1, matched, total
std::string report_tsv(const EvalReport& r);

}  // namespace rst
