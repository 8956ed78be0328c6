#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "rst/error.hpp"
#include "rst/eval.hpp"

using namespace rst;

namespace {

const RelationLabel kJointNN{RelationClass::Joint, true};
const RelationLabel kElab{RelationClass::Elaboration, false};

NodePtr right_branching3() {
  return Node::internal(Node::leaf(1),
                        Node::internal(Node::leaf(2), Node::leaf(3), Nuclearity::NS,
                                       RelationClass::Elaboration),
                        Nuclearity::SN, RelationClass::Cause);
}

}  // namespace

TEST(LabeledSpans, Examples) {
  EXPECT_TRUE(extract_labeled_spans(*Node::leaf(1)).empty());
  auto pair = fx::approval();
  EXPECT_EQ(extract_labeled_spans(*pair.tree),
            (std::vector<LabeledSpan>{
                {{1, 2}, Nuclearity::NS, {RelationClass::Enablement, false}}}));
  auto spans = extract_labeled_spans(*fx::left_branching3());
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].span, (EduRange{1, 2}));
  EXPECT_EQ(spans[1].span, (EduRange{1, 3}));
  EXPECT_EQ(spans[1].nuclearity, Nuclearity::SN);
}

TEST(Parseval, IdentityAndRelabel) {
  auto pair = fx::approval();
  auto r = parseval(*pair.tree, *pair.tree);
  EXPECT_EQ(format_triple(r), "S 100.00 N 100.00 R 100.00");

  auto wrong = Node::internal(Node::leaf(1), Node::leaf(2), Nuclearity::SN,
                              RelationClass::Elaboration);
  r = parseval(*wrong, *pair.tree);
  EXPECT_DOUBLE_EQ(r.S(), 100.0);
  EXPECT_DOUBLE_EQ(r.N(), 0.0);
  EXPECT_DOUBLE_EQ(r.R(), 0.0);

  // Right relation, wrong nuclearity: the relation facet needs both.
  auto flipped = Node::internal(Node::leaf(1), Node::leaf(2), Nuclearity::SN,
                                RelationClass::Enablement);
  r = parseval(*flipped, *pair.tree);
  EXPECT_DOUBLE_EQ(r.N(), 0.0);
  EXPECT_DOUBLE_EQ(r.R(), 0.0);
}

TEST(Parseval, PartialMatch) {
  auto r = parseval(*right_branching3(), *fx::left_branching3());
  EXPECT_EQ(r.span.matched, 1u);
  EXPECT_EQ(r.span.pred_total, 2u);
  EXPECT_EQ(r.span.gold_total, 2u);
  EXPECT_DOUBLE_EQ(r.S(), 50.0);
  EXPECT_DOUBLE_EQ(r.N(), 50.0);  // root is SN in both
  EXPECT_DOUBLE_EQ(r.R(), 50.0);  // and Cause in both
}

TEST(Parseval, SingleEduIsPerfect) {
  auto r = parseval(*Node::leaf(1), *Node::leaf(1));
  EXPECT_DOUBLE_EQ(r.S(), 100.0);
  EXPECT_DOUBLE_EQ(r.R(), 100.0);
}

TEST(Parseval, LeafMismatch) {
  auto pair = fx::approval();
  try {
    parseval(*fx::left_branching3(), *pair.tree);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LeafMismatch);
  }
}

TEST(Parseval, MicroAndMacro) {
  auto pair = fx::approval();
  EvalReport total = parseval(*pair.tree, *pair.tree);
  total += parseval(*right_branching3(), *fx::left_branching3());
  // micro: 2 of 3 on both sides
  EXPECT_NEAR(total.S(), 200.0 / 3.0, 1e-9);
  auto m = total.macro();
  EXPECT_DOUBLE_EQ(m[0], 75.0);
  EXPECT_EQ(format_triple(total, true), "S 75.00 N 75.00 R 75.00");
  EXPECT_EQ(format_triple(total), "S 66.67 N 66.67 R 66.67");
  EXPECT_EQ(EvalReport().macro(), (std::array<double, 3>{0, 0, 0}));
}

TEST(Confusion, IdentityDiagonal) {
  auto docs = fx::treebank5();
  EvalReport all;
  for (const auto& d : docs) all += parseval(*d.tree, *d.tree);
  for (const auto& [gold, row] : all.confusion.row_percentages())
    for (const auto& [pred, pct] : row) EXPECT_DOUBLE_EQ(pct, gold == pred ? 100.0 : 0.0);
}

TEST(Confusion, JointPredictedAsElaboration) {
  std::vector<std::pair<RelationLabel, RelationLabel>> pairs{
      {kJointNN, kElab}, {kJointNN, kElab}, {kElab, kElab}, {kElab, kJointNN}};
  auto c = confusion(pairs);
  auto pct = c.row_percentages();
  EXPECT_DOUBLE_EQ(pct[kJointNN][kElab], 100.0);
  EXPECT_DOUBLE_EQ(pct[kElab][kElab], 50.0);
  EXPECT_DOUBLE_EQ(pct[kElab][kJointNN], 50.0);
  for (const auto& [g, row] : pct) {
    double sum = 0;
    for (const auto& [p, v] : row) sum += v;
    EXPECT_NEAR(sum, 100.0, 1e-9);
  }
  EXPECT_EQ(c.count(kJointNN, kElab), 2u);
  EXPECT_EQ(c.labels(), (std::vector<RelationLabel>{kJointNN, kElab}));
  EXPECT_EQ(c.to_tsv(),
            "gold\\pred\tJoint-NN\tElaboration\n"
            "Joint-NN\t0.00\t100.00\n"
            "Elaboration\t50.00\t50.00\n");
}

TEST(Confusion, OnlySpanMatchedNodes) {
  auto r = parseval(*right_branching3(), *fx::left_branching3());
  std::size_t n = 0;
  for (const auto& l : r.confusion.labels())
    for (const auto& m : r.confusion.labels()) n += r.confusion.count(l, m);
  EXPECT_EQ(n, 1u);
  EXPECT_EQ(r.confusion.count({RelationClass::Cause, false}, {RelationClass::Cause, false}), 1u);
}

TEST(Report, Tsv) {
  auto pair = fx::approval();
  auto tsv = report_tsv(parseval(*pair.tree, *pair.tree));
  EXPECT_EQ(tsv,
            "facet\tprecision\trecall\tf1\tmatched\ttotal\n"
            "S\t100.00\t100.00\t100.00\t1\t1\n"
            "N\t100.00\t100.00\t100.00\t1\t1\n"
            "R\t100.00\t100.00\t100.00\t1\t1\n");
  EXPECT_EQ(format_triple(78.7, 64.01, 44.28), "S 78.70 N 64.01 R 44.28");
}
