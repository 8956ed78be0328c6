#include "rst/eval.hpp"

#include <cstdio>
#include <set>

#include "rst/error.hpp"

namespace rst {

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

std::vector<LabeledSpan> extract_labeled_spans(const Node& tree) {
  std::vector<LabeledSpan> out;
  for_each_node(tree, [&](const Node& n) {
    if (!n.is_leaf()) out.push_back({n.span(), n.nuclearity(), n.relation()});
  });
  return out;
}

// ---------------------------------------------------------------------------

double FacetCounts::precision() const {
  if (pred_total == 0 && gold_total == 0) return 1.0;
  return ratio(matched, pred_total);
}

double FacetCounts::recall() const {
  if (pred_total == 0 && gold_total == 0) return 1.0;
  return ratio(matched, gold_total);
}

double FacetCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

FacetCounts& FacetCounts::operator+=(const FacetCounts& o) {
  matched += o.matched;
  pred_total += o.pred_total;
  gold_total += o.gold_total;
  return *this;
}

// ---------------------------------------------------------------------------

void ConfusionMatrix::add(const RelationLabel& gold, const RelationLabel& pred,
                          std::size_t n) {
  counts_[gold][pred] += n;
}

std::size_t ConfusionMatrix::count(const RelationLabel& gold,
                                   const RelationLabel& pred) const {
  auto r = counts_.find(gold);
  if (r == counts_.end()) return 0;
  auto c = r->second.find(pred);
  return c == r->second.end() ? 0 : c->second;
}

std::vector<RelationLabel> ConfusionMatrix::labels() const {
  std::set<RelationLabel> all;
  for (const auto& [g, row] : counts_) {
    all.insert(g);
    for (const auto& [p, n] : row) all.insert(p);
  }
  return {all.begin(), all.end()};
}

std::map<RelationLabel, std::map<RelationLabel, double>>
ConfusionMatrix::row_percentages() const {
  std::map<RelationLabel, std::map<RelationLabel, double>> out;
  const auto cols = labels();
  for (const auto& [g, row] : counts_) {
    std::size_t total = 0;
    for (const auto& [p, n] : row) total += n;
    auto& r = out[g];
    for (const auto& c : cols) {
      auto it = row.find(c);
      const std::size_t n = it == row.end() ? 0 : it->second;
      r[c] = total == 0 ? 0.0 : 100.0 * ratio(n, total);
    }
  }
  return out;
}

std::string ConfusionMatrix::to_tsv() const {
  const auto cols = labels();
  const auto pct = row_percentages();
  std::string out = "gold\\pred";
  for (const auto& c : cols) out += "\t" + c.str();
  out += "\n";
  for (const auto& [g, row] : pct) {
    out += g.str();
    for (const auto& c : cols) out += "\t" + fixed2(row.at(c));
    out += "\n";
  }
  return out;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  for (const auto& [g, row] : o.counts_)
    for (const auto& [p, n] : row) counts_[g][p] += n;
  return *this;
}

ConfusionMatrix confusion(
    std::span<const std::pair<RelationLabel, RelationLabel>> gold_pred_pairs) {
  ConfusionMatrix m;
  for (const auto& [g, p] : gold_pred_pairs) m.add(g, p);
  return m;
}

// ---------------------------------------------------------------------------

std::array<double, 3> EvalReport::macro() const {
  std::array<double, 3> acc{0, 0, 0};
  if (per_document.empty()) return acc;
  for (const auto& d : per_document)
    for (int k = 0; k < 3; ++k) acc[k] += d[k];
  for (auto& v : acc) v /= static_cast<double>(per_document.size());
  return acc;
}

EvalReport& EvalReport::operator+=(const EvalReport& o) {
  span += o.span;
  nuclearity += o.nuclearity;
  relation += o.relation;
  confusion += o.confusion;
  per_document.insert(per_document.end(), o.per_document.begin(),
                      o.per_document.end());
  return *this;
}

EvalReport parseval(const Node& pred, const Node& gold) {
  if (leaf_ids(pred) != leaf_ids(gold))
    throw Error(ErrorCode::LeafMismatch,
                "predicted tree covers EDUs " + std::to_string(pred.span().first) +
                    "-" + std::to_string(pred.span().last) + ", gold " +
                    std::to_string(gold.span().first) + "-" +
                    std::to_string(gold.span().last));
  const auto ps = extract_labeled_spans(pred);
  const auto gs = extract_labeled_spans(gold);
  std::map<EduRange, LabeledSpan> gold_by_span;
  for (const auto& g : gs) gold_by_span.emplace(g.span, g);

  EvalReport r;
  for (auto* f : {&r.span, &r.nuclearity, &r.relation}) {
    f->pred_total = ps.size();
    f->gold_total = gs.size();
  }
  for (const auto& p : ps) {
    auto it = gold_by_span.find(p.span);
    if (it == gold_by_span.end()) continue;
    const LabeledSpan& g = it->second;
    ++r.span.matched;
    if (p.nuclearity == g.nuclearity) {
      ++r.nuclearity.matched;
      if (p.relation == g.relation) ++r.relation.matched;
    }
    r.confusion.add(g.relation, p.relation);
  }
  r.per_document.push_back({100.0 * r.span.f1(), 100.0 * r.nuclearity.f1(),
                            100.0 * r.relation.f1()});
  return r;
}

std::string format_triple(double s, double n, double r) {
  return "S " + fixed2(s) + " N " + fixed2(n) + " R " + fixed2(r);
}

std::string format_triple(const EvalReport& r, bool macro) {
  if (macro) {
    const auto m = r.macro();
    return format_triple(m[0], m[1], m[2]);
  }
  return format_triple(r.S(), r.N(), r.R());
}

std::string report_tsv(const EvalReport& r) {
  std::string out = "facet\tprecision\trecall\tf1\tmatched\ttotal\n";
  auto row = [&](const char* name, const FacetCounts& f) {
    out += std::string(name) + "\t" + fixed2(100.0 * f.precision()) + "\t" +
           fixed2(100.0 * f.recall()) + "\t" + fixed2(100.0 * f.f1()) + "\t" +
           std::to_string(f.matched) + "\t" + std::to_string(f.gold_total) + "\n";
  };
  row("S", r.span);
  row("N", r.nuclearity);
  row("R", r.relation);
  return out;
}

}  // namespace rst
