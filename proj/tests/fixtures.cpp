#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rst/io.hpp"

using namespace rst;

namespace fx {

namespace {

std::vector<std::vector<std::string>> words(std::initializer_list<const char*> edus) {
  std::vector<std::vector<std::string>> out;
  for (const char* e : edus) {
    std::vector<std::string> toks;
    std::string cur;
    for (const char* p = e; *p; ++p) {
      if (*p == ' ') {
        if (!cur.empty()) toks.push_back(cur);
        cur.clear();
      } else {
        cur += *p;
      }
    }
    if (!cur.empty()) toks.push_back(cur);
    out.push_back(toks);
  }
  return out;
}

Document doc_from(const std::string& id, std::initializer_list<const char*> edus,
                  const char* bracketed) {
  Document d = make_document(id, words(edus));
  d.tree = read_bracketed(bracketed);
  annotate(d);
  return d;
}

}  // namespace

void annotate(Document& doc) {
  int sentence = 0;
  for (const auto& e : doc.edus) {
    for (auto i = e.start; i <= e.end; ++i) {
      Token& t = doc.tokens[i];
      const bool verb = i == e.end;
      t.pos = verb ? "VERB" : (i == e.start ? "SCONJ" : "NOUN");
      t.deprel = verb ? "root" : (i == e.start ? "mark" : "obj");
      t.head = verb ? kRootHead : static_cast<int>(e.end);
      t.sentence = sentence;
    }
    if (e.id % 2 == 0) ++sentence;
  }
}

Document approval() {
  return doc_from("approval",
                  {"باید لایحه اعطای تابعیت به فرزندان مادران ایرانی تصویب شود",
                   "تا تابعیت از مادر به فرزند برسد"},
                  "(Enablement NS (EDU 1) (EDU 2))");
}

NodePtr left_branching3(Nuclearity d1, RelationClass r1, Nuclearity d2, RelationClass r2) {
  return Node::internal(Node::internal(Node::leaf(1), Node::leaf(2), d1, r1), Node::leaf(3),
                        d2, r2);
}

std::vector<Document> treebank5() {
  std::vector<Document> docs;
  docs.push_back(approval());
  docs.push_back(doc_from("etemad-02",
                          {"دولت بودجه را اعلام کرد", "و مجلس آن را بررسی کرد",
                           "که شامل افزایش مالیات بود"},
                          "(Elaboration NS (Joint NN (EDU 1) (EDU 2)) (EDU 3))"));
  docs.push_back(doc_from("shargh-03",
                          {"قیمت\u200Cها بالا رفت", "زیرا تورم شدید شد", "بنابراین مردم نگران شدند"},
                          "(Contrast NN (EDU 1) (Cause SN (EDU 2) (EDU 3)))"));
  docs.push_back(doc_from("meidan-04",
                          {"وزیر گفت", "طرح جدید اجرا می\u200Cشود", "که هزینه کمتری دارد",
                           "پس از تصویب در مجلس"},
                          "(Attribution SN (EDU 1) (Elaboration NS (EDU 2) "
                          "(Background SN (EDU 3) (EDU 4))))"));
  docs.push_back(doc_from("etemad-05",
                          {"اگر باران ببارد", "کشاورزان خوشحال می\u200Cشوند", "محصول امسال",
                           "بیشتر خواهد بود", "سپس صادرات افزایش می\u200Cیابد"},
                          "(Joint NN (Condition SN (EDU 1) (EDU 2)) (Same-Unit NN (EDU 3) "
                          "(Temporal NS (EDU 4) (EDU 5))))"));
  return docs;
}

std::vector<LegalPair> all_pairs() {
  std::vector<LegalPair> out;
  for (auto cls : all_relation_classes()) {
    if (cls == RelationClass::Span) continue;
    out.push_back({Nuclearity::NS, cls});
    out.push_back({Nuclearity::SN, cls});
    out.push_back({Nuclearity::NN, cls});
  }
  return out;
}

NodePtr random_tree(Rng& rng, int first, int last, const std::vector<LegalPair>& pairs) {
  if (first == last) return Node::leaf(first);
  const int split = first + static_cast<int>(rng.below(static_cast<std::size_t>(last - first)));
  const auto& p = pairs[rng.below(pairs.size())];
  return Node::internal(random_tree(rng, first, split, pairs),
                        random_tree(rng, split + 1, last, pairs), p.nuclearity, p.relation);
}

Document document_for(const NodePtr& tree, Rng& rng, const std::string& doc_id) {
  static const char* vocab[] = {"کتاب", "مردم", "دولت", "گفت", "که", "اما", "است",
                                "شد", "زیرا", "بازار", "a", "b", "c", "x"};
  std::vector<std::vector<std::string>> edus(tree->leaf_count());
  for (auto& e : edus) {
    const auto n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) e.push_back(vocab[rng.below(std::size(vocab))]);
  }
  Document d = make_document(doc_id, edus);
  d.tree = tree;
  annotate(d);
  return d;
}

std::vector<Document> marker_corpus(std::size_t tokens, std::uint64_t seed) {
  static const char* vocab[] = {"او", "گفت", "که", "کتاب", "را", "خواند", "و", "رفت",
                                "به", "خانه", "اما", "دیر", "شد", "از", "شهر"};
  static const char* tags[] = {"PRON", "VERB", "SCONJ", "NOUN", "ADP", "VERB", "CCONJ",
                               "VERB", "ADP", "NOUN", "CCONJ", "ADV", "VERB", "ADP", "NOUN"};
  Rng rng(seed);
  std::vector<Document> docs;
  std::size_t made = 0;
  while (made < tokens) {
    const std::size_t n = std::min<std::size_t>(tokens - made, 60 + rng.below(80));
    std::vector<Token> toks;
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < n; ++i) {
      Token t;
      t.index = i;
      const bool marker = i > 0 && i + 1 < n && toks.back().surface != "؛" && rng.uniform() < 0.12;
      if (marker) {
        t.surface = "؛";
        t.pos = "PUNCT";
        t.deprel = "punct";
      } else {
        const auto w = rng.below(std::size(vocab));
        t.surface = vocab[w];
        t.pos = tags[w];
        t.deprel = "dep";
      }
      t.head = i == 0 ? kRootHead : static_cast<int>(rng.below(n));
      if (t.head == static_cast<int>(i)) t.head = kRootHead;
      if (i > 0 && toks.back().surface == "؛") starts.push_back(i);
      toks.push_back(std::move(t));
    }
    Document d;
    d.doc_id = "synthetic-" + std::to_string(docs.size());
    d.tokens = std::move(toks);
    d.edus = edus_from_starts(d.tokens, starts);
    docs.push_back(std::move(d));
    made += n;
  }
  return docs;
}

std::vector<Document> cue_treebank(std::size_t count, std::uint64_t seed,
                                   const std::string& prefix) {
  struct Cue {
    const char* word;
    Nuclearity nuc;
    RelationClass rel;
  };
  static const Cue cues[] = {{"که", Nuclearity::NS, RelationClass::Elaboration},
                             {"زیرا", Nuclearity::NS, RelationClass::Explanation},
                             {"اما", Nuclearity::NN, RelationClass::Contrast},
                             {"و", Nuclearity::NN, RelationClass::Joint},
                             {"اگر", Nuclearity::SN, RelationClass::Condition}};
  static const char* filler[] = {"دولت", "مردم", "بازار", "قیمت", "شهر", "کار"};
  Rng rng(seed);
  std::vector<Document> docs;
  for (std::size_t d = 0; d < count; ++d) {
    const int n = 3 + static_cast<int>(rng.below(4));
    std::vector<std::vector<std::string>> edus;
    NodePtr tree = Node::leaf(1);
    for (int k = 1; k <= n; ++k) {
      std::vector<std::string> words;
      const Cue& c = cues[rng.below(std::size(cues))];
      // The cue sits between fillers: not the first word, not the head.
      words.push_back(filler[rng.below(std::size(filler))]);
      words.push_back(k == 1 ? "امروز" : c.word);
      const auto len = 1 + rng.below(2);
      for (std::size_t i = 0; i < len; ++i) words.push_back(filler[rng.below(std::size(filler))]);
      edus.push_back(words);
      if (k > 1) tree = Node::internal(tree, Node::leaf(k), c.nuc, c.rel);
    }
    Document doc = make_document(prefix + std::to_string(d), edus);
    doc.tree = tree;
    annotate(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

NodePtr flip_nuclearity(const NodePtr& t, const std::set<EduRange>& spans) {
  if (t->is_leaf()) return t;
  auto l = flip_nuclearity(t->children().front(), spans);
  auto r = flip_nuclearity(t->children().back(), spans);
  auto nuc = t->nuclearity();
  if (spans.count(t->span()) && nuc != Nuclearity::NN)
    nuc = nuc == Nuclearity::NS ? Nuclearity::SN : Nuclearity::NS;
  return Node::internal(l, r, nuc, t->relation().cls);
}

namespace {

void keys(const Node& n, std::vector<std::array<std::string, 3>>& out) {
  if (n.is_leaf()) return;
  keys(n.left(), out);
  keys(n.right(), out);
  const auto sp = std::to_string(n.span().first) + "-" + std::to_string(n.span().last);
  const auto nuc = sp + "/" + std::string(to_string(n.nuclearity()));
  out.push_back({sp, nuc, nuc + "/" + n.relation().str()});
}

}  // namespace

BruteCounts brute_force_match(const Node& pred, const Node& gold) {
  std::vector<std::array<std::string, 3>> p, g;
  keys(pred, p);
  keys(gold, g);
  BruteCounts c;
  c.pred = p.size();
  c.gold = g.size();
  for (int f = 0; f < 3; ++f) {
    std::size_t m = 0;
    for (const auto& a : p)
      for (const auto& b : g)
        if (a[f] == b[f]) ++m;
    (f == 0 ? c.span : f == 1 ? c.nuclearity : c.relation) = m;
  }
  return c;
}

namespace {

// Smallest gap between a kink-defining quantity and its threshold over all
// samples: the hinge argument against 0, and best vs second-best wrong score.
double kink_distance(const ParserModel& m, std::span<const TrainingSample> samples) {
  double gap = 1e300;
  for (const auto& x : samples) {
    std::vector<double> wrong;
    const auto s = m.scores(x.x);
    for (std::size_t a = 0; a < s.size(); ++a) {
      const bool legal = a == 0 ? x.shift_legal : x.reduce_legal;
      if (legal && a != x.gold) wrong.push_back(s[a]);
    }
    if (wrong.empty()) continue;
    std::sort(wrong.rbegin(), wrong.rend());
    gap = std::min(gap, std::abs(1.0 + wrong[0] - s[x.gold]));
    if (wrong.size() > 1) gap = std::min(gap, wrong[0] - wrong[1]);
  }
  return gap;
}

}  // namespace

GradCheck gradient_check(std::uint64_t seed, int points, double h) {
  std::vector<Document> docs;
  const std::vector<std::vector<std::vector<std::string>>> texts = {
      {{"a", "b"}, {"c"}}, {{"b"}, {"a", "c"}, {"a"}}, {{"c", "c"}, {"b"}, {"a"}}};
  const std::vector<NodePtr> trees = {
      Node::internal(Node::leaf(1), Node::leaf(2), Nuclearity::NS, RelationClass::Elaboration),
      Node::internal(Node::internal(Node::leaf(1), Node::leaf(2), Nuclearity::SN,
                                    RelationClass::Cause),
                     Node::leaf(3), Nuclearity::NN, RelationClass::Joint),
      Node::internal(Node::leaf(1),
                     Node::internal(Node::leaf(2), Node::leaf(3), Nuclearity::NS,
                                    RelationClass::Elaboration),
                     Nuclearity::NN,
                     RelationClass::Joint)};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Document d = make_document("toy" + std::to_string(i), texts[i]);
    d.tree = trees[i];
    annotate(d);
    docs.push_back(d);
  }
  ParserModel m;
  m.actions = ActionInventory(learn_legal_pairs(docs));
  const auto samples = training_samples(docs, m.actions, m.surface_dict, m.additional_dict);
  const std::size_t K = 3;
  const std::size_t V = m.surface_dict.size();
  const std::size_t D = m.additional_dict.size();
  const double lambda = 0.3, tau = 0.7;

  GradCheck out;
  out.vocab = V;
  out.K = K;
  out.actions = m.actions.size();
  Rng rng(seed);
  auto uniform = [&] { return 2.0 * rng.uniform() - 1.0; };
  int tries = 0;
  while (out.points < points && tries++ < 10000) {
    m.A = ProjectionMatrix(K, V);
    m.W = Matrix(m.actions.size(), 3 * K + D);
    for (auto& v : m.A.data()) v = uniform();
    for (auto& v : m.W.data()) v = uniform();
    if (kink_distance(m, samples) < 1e-3) continue;

    Matrix gW;
    ProjectionMatrix gA;
    joint_gradient(samples, m.W, m.A, lambda, tau, &gW, &gA);
    double diff = 0, norm = 0;
    auto probe = [&](std::vector<double>& params, const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = joint_objective(samples, m.W, m.A, lambda, tau);
        params[i] = keep - h;
        const double down = joint_objective(samples, m.W, m.A, lambda, tau);
        params[i] = keep;
        const double numeric = (up - down) / (2 * h);
        diff += (numeric - analytic[i]) * (numeric - analytic[i]);
        norm += numeric * numeric + analytic[i] * analytic[i];
      }
    };
    probe(m.W.data(), gW.data());
    probe(m.A.data(), gA.data());
    const double rel = std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.points;
  }
  return out;
}

std::string data_path(const std::string& name) { return std::string(RST_TEST_DATA) + "/" + name; }

std::string read_data(const std::string& name) { return read_file(data_path(name)); }

}  // namespace fx
