#include "rst/parser.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "rst/error.hpp"
#include "rst/io.hpp"

namespace rst {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n'))
    if (!l.empty()) out.push_back(l);
  return out;
}

template <typename T>
T parse_uint(std::string_view s, std::string_view what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::BadModelFile, "bad " + std::string(what) + ": " + std::string(s));
  return v;
}

std::string bucket(std::size_t n) {
  if (n <= 2) return std::to_string(n);
  if (n <= 5) return "3-5";
  if (n <= 10) return "6-10";
  return ">10";
}

// EDU whose first token and length describe a unit: follow nuclei down.
int head_edu(const Node& n) {
  const Node* cur = &n;
  while (!cur->is_leaf())
    cur = cur->nuclearity() == Nuclearity::SN ? &cur->right() : &cur->left();
  return cur->edu();
}

struct Unit {
  EduRange span;
  int head = 0;
};

std::optional<Unit> unit_at(const ParserState& s, std::size_t pos) {
  if (pos == kQueueFront) {
    if (s.queue_size() == 0) return std::nullopt;
    return Unit{{s.next_edu, s.next_edu}, s.next_edu};
  }
  if (s.stack.size() <= pos) return std::nullopt;
  const Node& n = *s.stack[s.stack.size() - 1 - pos];
  return Unit{n.span(), head_edu(n)};
}

// Token index range of a unit, if the document has tokens for it.
std::optional<std::pair<std::size_t, std::size_t>> token_range(const Document& doc,
                                                               EduRange span) {
  if (span.first < 1 || static_cast<std::size_t>(span.last) > doc.edus.size())
    return std::nullopt;
  const auto a = doc.edus[static_cast<std::size_t>(span.first - 1)].start;
  const auto b = doc.edus[static_cast<std::size_t>(span.last - 1)].end;
  if (a > b || b >= doc.tokens.size()) return std::nullopt;
  return std::pair{a, b};
}

SparseVector lookup(const FeatureDictionary& d, std::span<const std::string> names) {
  std::vector<std::size_t> ids;
  ids.reserve(names.size());
  for (const auto& n : names)
    if (auto id = d.find(n)) ids.push_back(*id);
  return SparseVector::binary(std::move(ids));
}

// Scoring and subgradients shared by training, the public objective and
// decoding.
class Scorer {
 public:
  Scorer(const Matrix& W, const ProjectionMatrix& A)
      : W_(W), A_(A), K_(A.rows()) {}

  std::vector<double> projected(const StateFeatures& x) const {
    return project(A_, x.surface);
  }

  double score(std::size_t a, std::span<const double> phi,
               const SparseVector& additional) const {
    const auto row = W_.row(a);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) s += row[i] * phi[i];
    return s + additional.dot(row.subspan(3 * K_));
  }

  std::vector<double> scores(std::span<const double> phi,
                             const SparseVector& additional) const {
    std::vector<double> out(W_.rows());
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = score(a, phi, additional);
    return out;
  }

  // Best wrong legal action and the hinge value; kNone when the move is forced.
  std::pair<std::size_t, double> violation(const TrainingSample& s,
                                           std::span<const double> phi) const {
    const auto sc = scores(phi, s.x.additional);
    std::size_t best = kNone;
    for (std::size_t a = 0; a < sc.size(); ++a) {
      if (a == s.gold) continue;
      const bool legal = a == 0 ? s.shift_legal : s.reduce_legal;
      if (!legal) continue;
      if (best == kNone || sc[a] > sc[best]) best = a;
    }
    if (best == kNone) return {kNone, 0.0};
    return {best, std::max(0.0, 1.0 + sc[best] - sc[s.gold])};
  }

  std::size_t K() const { return K_; }

 private:
  const Matrix& W_;
  const ProjectionMatrix& A_;
  std::size_t K_;
};

// grad_W += scale * (phi_bw - phi_gold) for an active sample.
void add_w_gradient(Matrix& g, const TrainingSample& s, std::size_t bw,
                    std::span<const double> phi, double scale, std::size_t K) {
  auto up = g.row(bw);
  auto down = g.row(s.gold);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    up[i] += scale * phi[i];
    down[i] -= scale * phi[i];
  }
  s.x.additional.axpy(scale, up.subspan(3 * K));
  s.x.additional.axpy(-scale, down.subspan(3 * K));
}

// grad_A += scale * sum_p (W_bw^p - W_gold^p) s_p^T
void add_a_gradient(ProjectionMatrix& g, const Matrix& W, const TrainingSample& s,
                    std::size_t bw, double scale, std::size_t K) {
  const auto wb = W.row(bw);
  const auto wg = W.row(s.gold);
  for (std::size_t p = 0; p < 3; ++p) {
    for (const auto& [id, v] : s.x.surface[p].entries()) {
      for (std::size_t k = 0; k < K; ++k)
        g(k, id) += scale * v * (wb[p * K + k] - wg[p * K + k]);
    }
  }
}

void project_to_ball(Matrix& m, double radius) {
  const double norm = std::sqrt(m.squared_norm());
  if (norm > radius && norm > 0) m.scale(radius / norm);
}

std::string hyper_cfg(const ParserHyper& h) {
  return "K=" + std::to_string(h.K) + "\n" + "tau=" + format_double(h.tau) + "\n" +
         "lambda=" + format_double(h.lambda) + "\n" +
         "batch_size=" + std::to_string(h.batch_size) + "\n" +
         "epochs=" + std::to_string(h.epochs) + "\n" +
         "seed=" + std::to_string(h.seed) + "\n";
}

std::string matrix_text(const Matrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ' ';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

Matrix parse_matrix(std::string_view text) {
  const auto ls = split(text, '\n');
  if (ls.empty()) throw Error(ErrorCode::BadModelFile, "empty matrix file");
  const auto dims = split(ls[0], ' ');
  if (dims.size() != 2) throw Error(ErrorCode::BadModelFile, "bad matrix header");
  const auto rows = parse_uint<std::size_t>(dims[0], "row count");
  const auto cols = parse_uint<std::size_t>(dims[1], "column count");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (r + 1 >= ls.size()) throw Error(ErrorCode::BadModelFile, "matrix truncated");
    const auto line = ls[r + 1];
    const auto vals = cols == 0 ? std::vector<std::string_view>{} : split(line, ' ');
    if (vals.size() != cols)
      throw Error(ErrorCode::BadModelFile,
                  "matrix row " + std::to_string(r) + " has " +
                      std::to_string(vals.size()) + " values");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = parse_double(vals[c]);
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string TransitionAction::str() const {
  if (is_shift()) return "SHIFT";
  return "REDUCE " + std::string(to_string(nuclearity)) + " " +
         std::string(rst::to_string(relation));
}

std::optional<TransitionAction> TransitionAction::parse(std::string_view s) {
  if (s == "SHIFT") return shift();
  const auto parts = split(s, ' ');
  if (parts.size() != 3 || parts[0] != "REDUCE") return std::nullopt;
  auto nuc = parse_nuclearity(parts[1]);
  auto rel = relation_class_from_name(parts[2]);
  if (!nuc || !rel || *rel == RelationClass::Span) return std::nullopt;
  return reduce(*nuc, *rel);
}

ActionInventory::ActionInventory(const LegalityTable& table) : ActionInventory() {
  for (const auto& p : table) {
    if (p.relation == RelationClass::Span) continue;
    table_.insert(p);
    actions_.push_back(TransitionAction::reduce(p.nuclearity, p.relation));
  }
}

std::optional<std::size_t> ActionInventory::index_of(const TransitionAction& a) const {
  if (a.is_shift()) return 0;
  // table_ iterates in the same order as actions_[1..]
  auto it = table_.find(a.pair());
  if (it == table_.end()) return std::nullopt;
  return 1 + static_cast<std::size_t>(std::distance(table_.begin(), it));
}

ParserState initial_state(int edu_count) {
  ParserState s;
  s.edu_count = edu_count;
  return s;
}

bool can_shift(const ParserState& s) { return s.queue_size() > 0; }
bool can_reduce(const ParserState& s) { return s.stack.size() >= 2; }

std::vector<TransitionAction> legal_actions(const ParserState& s,
                                            const LegalityTable& table) {
  std::vector<TransitionAction> out;
  if (can_shift(s)) out.push_back(TransitionAction::shift());
  if (can_reduce(s))
    for (const auto& p : table)
      if (p.relation != RelationClass::Span)
        out.push_back(TransitionAction::reduce(p.nuclearity, p.relation));
  return out;
}

void apply_in_place(ParserState& s, const TransitionAction& a) {
  if (a.is_shift()) {
    if (!can_shift(s)) throw Error(ErrorCode::IllegalAction, "Shift on empty queue");
    s.stack.push_back(Node::leaf(s.next_edu++));
  } else {
    if (!can_reduce(s))
      throw Error(ErrorCode::IllegalAction,
                  "Reduce with " + std::to_string(s.stack.size()) + " stack item(s)");
    if (a.relation == RelationClass::Span)
      throw Error(ErrorCode::IllegalAction, "Span is not a relation");
    auto right = std::move(s.stack.back());
    s.stack.pop_back();
    auto left = std::move(s.stack.back());
    s.stack.pop_back();
    s.stack.push_back(Node::internal(std::move(left), std::move(right),
                                     a.nuclearity, a.relation));
  }
  s.history.push_back(a);
}

ParserState apply(ParserState s, const TransitionAction& a) {
  apply_in_place(s, a);
  return s;
}

NodePtr execute(std::span<const TransitionAction> actions, int edu_count) {
  auto s = initial_state(edu_count);
  for (const auto& a : actions) apply_in_place(s, a);
  if (!s.terminal())
    throw Error(ErrorCode::IllegalAction, "action sequence does not finish the tree");
  return s.stack.back();
}

namespace {

void oracle_into(const Node& n, std::vector<TransitionAction>& out) {
  if (n.is_leaf()) {
    out.push_back(TransitionAction::shift());
    return;
  }
  if (n.children().size() != 2)
    throw Error(ErrorCode::NonBinaryTree,
                "node over EDUs " + std::to_string(n.span().first) + "-" +
                    std::to_string(n.span().last) + " has " +
                    std::to_string(n.children().size()) + " children");
  oracle_into(n.left(), out);
  oracle_into(n.right(), out);
  out.push_back(TransitionAction::reduce(n.nuclearity(), n.relation().cls));
}

}  // namespace

std::vector<TransitionAction> oracle(const Node& tree) {
  std::vector<TransitionAction> out;
  oracle_into(tree, out);
  return out;
}

LegalityTable learn_legal_pairs(std::span<const NodePtr> trees) {
  LegalityTable t;
  std::size_t seen = 0;
  for (const auto& tree : trees) {
    if (!tree) continue;
    ++seen;
    for_each_node(*tree, [&](const Node& n) {
      if (!n.is_leaf()) t.insert({n.nuclearity(), n.relation().cls});
    });
  }
  if (seen == 0) throw Error(ErrorCode::EmptyTreebank, "no trees to learn from");
  return t;
}

LegalityTable learn_legal_pairs(std::span<const Document> treebank) {
  std::vector<NodePtr> trees;
  for (const auto& d : treebank) trees.push_back(d.tree);
  return learn_legal_pairs(std::span<const NodePtr>(trees));
}

// ---------------------------------------------------------------------------

StateFeatureNames state_feature_names(const ParserState& s, const Document& doc) {
  StateFeatureNames f;
  std::array<std::optional<Unit>, 3> units;
  for (std::size_t p = 0; p < 3; ++p) {
    units[p] = unit_at(s, p);
    const std::string pre = std::string(kPositionNames[p]) + ":";
    if (!units[p]) {
      f.surface[p].push_back(kPosAbsent);
      f.additional.push_back(pre + kPosAbsent);
      continue;
    }
    const Unit& u = *units[p];
    if (auto r = token_range(doc, u.span)) {
      for (auto i = r->first; i <= r->second; ++i) {
        const Token& t = doc.tokens[i];
        f.surface[p].push_back("w=" + t.surface);
        f.surface[p].push_back("p=" + t.pos);
        const bool outside =
            t.head == kRootHead ||
            (t.head >= 0 && (static_cast<std::size_t>(t.head) < r->first ||
                             static_cast<std::size_t>(t.head) > r->second));
        if (outside) f.additional.push_back(pre + "head=" + t.surface);
      }
    }
    if (auto r = token_range(doc, {u.head, u.head})) {
      const Token& first = doc.tokens[r->first];
      f.additional.push_back(pre + "first_word=" + first.surface);
      f.additional.push_back(pre + "first_pos=" + first.pos);
      f.additional.push_back(pre + "edu_len=" + bucket(r->second - r->first + 1));
    }
    const auto n = static_cast<std::size_t>(u.span.size());
    f.additional.push_back(pre + "len_edus=" + (n <= 10 ? std::to_string(n) : ">10"));
    f.additional.push_back(pre + "start_dist=" +
                           bucket(static_cast<std::size_t>(u.span.first - 1)));
  }
  if (units[kStackTop] && units[kStackSecond]) {
    auto r0 = token_range(doc, units[kStackTop]->span);
    auto r1 = token_range(doc, units[kStackSecond]->span);
    if (r0 && r1) {
      const int a = doc.tokens[r1->first].sentence;
      const int b = doc.tokens[r0->second].sentence;
      if (a >= 0 && b >= 0) f.additional.push_back(a == b ? "same_sent=1" : "same_sent=0");
    }
  }
  f.additional.push_back("bias");
  return f;
}

StateFeatures extract_state_features(const ParserState& s, const Document& doc,
                                     FeatureDictionary& surface,
                                     FeatureDictionary& additional) {
  const auto names = state_feature_names(s, doc);
  StateFeatures x;
  for (std::size_t p = 0; p < 3; ++p) x.surface[p] = surface.vectorize(names.surface[p]);
  x.additional = additional.vectorize(names.additional);
  return x;
}

// ---------------------------------------------------------------------------

double Matrix::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

void Matrix::scale(double c) {
  for (double& v : data_) v *= c;
}

std::vector<double> project(const ProjectionMatrix& A,
                            const std::array<SparseVector, 3>& surface) {
  const std::size_t K = A.rows();
  std::vector<double> out(3 * K, 0.0);
  for (std::size_t p = 0; p < 3; ++p) {
    for (const auto& [id, v] : surface[p].entries()) {
      if (id >= A.cols())
        throw Error(ErrorCode::DimensionMismatch,
                    "feature id " + std::to_string(id) + " but A has " +
                        std::to_string(A.cols()) + " columns");
      for (std::size_t k = 0; k < K; ++k) out[p * K + k] += A(k, id) * v;
    }
  }
  return out;
}

void ParserHyper::check() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::BadConfig, m); };
  if (K == 0) bad("K must be positive");
  if (!(tau > 0) || !std::isfinite(tau)) bad("tau must be positive");
  if (!(lambda > 0) || !std::isfinite(lambda)) bad("lambda must be positive");
  if (batch_size == 0) bad("batch_size must be positive");
  if (epochs < 1) bad("epochs must be positive");
}

StateFeatures ParserModel::encode(const ParserState& s, const Document& doc) const {
  const auto names = state_feature_names(s, doc);
  StateFeatures x;
  for (std::size_t p = 0; p < 3; ++p) x.surface[p] = lookup(surface_dict, names.surface[p]);
  x.additional = lookup(additional_dict, names.additional);
  return x;
}

std::vector<double> ParserModel::scores(const StateFeatures& x) const {
  Scorer sc(W, A);
  const auto phi = sc.projected(x);
  return sc.scores(phi, x.additional);
}

std::vector<double> score(const ParserModel& m, const ParserState& s,
                          const Document& doc) {
  return m.scores(m.encode(s, doc));
}

NodePtr greedy_parse(const ParserModel& m, const Document& doc) {
  if (doc.edus.empty())
    throw Error(ErrorCode::IllegalAction, "document " + doc.doc_id + " has no EDUs");
  auto s = initial_state(static_cast<int>(doc.edus.size()));
  const std::size_t reduces = m.actions.size() - 1;
  while (!s.terminal()) {
    const bool sh = can_shift(s);
    const bool re = can_reduce(s) && reduces > 0;
    const std::size_t legal = (sh ? 1 : 0) + (re ? reduces : 0);
    if (legal == 0)
      throw Error(ErrorCode::IllegalAction, "no legal action and no reduce in inventory");
    if (legal == 1) {
      apply_in_place(s, sh ? m.actions[0] : m.actions[1]);
      continue;
    }
    const auto sc = score(m, s, doc);
    std::size_t best = kNone;
    for (std::size_t a = 0; a < sc.size(); ++a) {
      const bool legal = a == 0 ? sh : re;
      if (legal && (best == kNone || sc[a] > sc[best])) best = a;
    }
    apply_in_place(s, m.actions[best]);
  }
  return s.stack.back();
}

// ---------------------------------------------------------------------------

std::vector<TrainingSample> training_samples(std::span<const Document> treebank,
                                             const ActionInventory& actions,
                                             FeatureDictionary& surface,
                                             FeatureDictionary& additional) {
  std::vector<TrainingSample> out;
  for (const auto& doc : treebank) {
    if (!doc.tree) continue;
    if (doc.tree->leaf_count() != doc.edus.size())
      throw Error(ErrorCode::LeafMismatch,
                  doc.doc_id + ": tree has " + std::to_string(doc.tree->leaf_count()) +
                      " leaves for " + std::to_string(doc.edus.size()) + " EDUs");
    auto s = initial_state(static_cast<int>(doc.edus.size()));
    for (const auto& a : oracle(*doc.tree)) {
      auto gold = actions.index_of(a);
      if (!gold)
        throw Error(ErrorCode::IllegalAction,
                    doc.doc_id + ": " + a.str() + " is not in the action inventory");
      TrainingSample t;
      t.x = extract_state_features(s, doc, surface, additional);
      t.gold = *gold;
      t.shift_legal = can_shift(s);
      t.reduce_legal = can_reduce(s) && actions.size() > 1;
      out.push_back(std::move(t));
      apply_in_place(s, a);
    }
  }
  return out;
}

double joint_objective(std::span<const TrainingSample> samples, const Matrix& W,
                       const ProjectionMatrix& A, double lambda, double tau) {
  Scorer sc(W, A);
  double loss = 0.0;
  for (const auto& s : samples) {
    const auto phi = sc.projected(s.x);
    loss += sc.violation(s, phi).second;
  }
  return loss + 0.5 * lambda * W.squared_norm() + 0.5 * tau * A.squared_norm();
}

void joint_gradient(std::span<const TrainingSample> samples, const Matrix& W,
                    const ProjectionMatrix& A, double lambda, double tau,
                    Matrix* grad_W, ProjectionMatrix* grad_A, double loss_scale) {
  Scorer sc(W, A);
  const std::size_t K = A.rows();
  if (grad_W) {
    *grad_W = W;
    grad_W->scale(lambda);
  }
  if (grad_A) {
    *grad_A = A;
    grad_A->scale(tau);
  }
  for (const auto& s : samples) {
    const auto phi = sc.projected(s.x);
    const auto [bw, h] = sc.violation(s, phi);
    if (bw == kNone || h <= 0.0) continue;
    if (grad_W) add_w_gradient(*grad_W, s, bw, phi, loss_scale, K);
    if (grad_A) add_a_gradient(*grad_A, W, s, bw, loss_scale, K);
  }
}

ParserModel train_parser(std::span<const Document> treebank, const ParserHyper& hyper) {
  hyper.check();
  ParserModel m;
  m.hyper = hyper;
  m.actions = ActionInventory(learn_legal_pairs(treebank));
  auto samples = training_samples(treebank, m.actions, m.surface_dict, m.additional_dict);
  m.surface_dict.freeze();
  m.additional_dict.freeze();

  const std::size_t K = hyper.K;
  Rng rng(hyper.seed);
  m.A = ProjectionMatrix(K, m.surface_dict.size());
  for (auto& v : m.A.data()) v = rng.uniform(-0.01, 0.01);
  m.W = Matrix(m.actions.size(), 3 * K + m.additional_dict.size());

  // The optimum satisfies lambda/2 |W|^2 + tau/2 |A|^2 <= f(0, 0), which is
  // the number of unforced samples; keeping each block inside its ball
  // bounds the early large steps.
  std::size_t unforced = 0;
  for (const auto& s : samples) {
    const std::size_t legal =
        (s.shift_legal ? 1 : 0) + (s.reduce_legal ? m.actions.size() - 1 : 0);
    if (legal > 1) ++unforced;
  }
  const double budget = static_cast<double>(std::max<std::size_t>(unforced, 1));
  const double radius_W = std::sqrt(2.0 * budget / hyper.lambda);
  const double radius_A = std::sqrt(2.0 * budget / hyper.tau);

  const double n = static_cast<double>(samples.size());
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<TrainingSample> batch;
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      ++t;
      const double scale = n / static_cast<double>(end - start);
      const double td = static_cast<double>(t);

      // W step with A fixed.
      {
        const double eta = 1.0 / (hyper.lambda * td);
        Matrix g(m.W.rows(), m.W.cols());
        Scorer sc(m.W, m.A);
        for (std::size_t i = start; i < end; ++i) {
          const auto& s = samples[order[i]];
          const auto phi = sc.projected(s.x);
          const auto [bw, h] = sc.violation(s, phi);
          if (bw != kNone && h > 0.0) add_w_gradient(g, s, bw, phi, scale, K);
        }
        m.W.scale(1.0 - eta * hyper.lambda);
        auto& w = m.W.data();
        const auto& gd = g.data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= eta * gd[i];
        project_to_ball(m.W, radius_W);
      }
      // A step with the new W fixed. The counter is offset by one so the
      // first shrink is 1/2, not 0: wiping A while W's projected block is
      // still zero would leave both stuck at the saddle A = 0, W_proj = 0.
      {
        const double eta = 1.0 / (hyper.tau * (td + 1.0));
        ProjectionMatrix g(m.A.rows(), m.A.cols());
        Scorer sc(m.W, m.A);
        for (std::size_t i = start; i < end; ++i) {
          const auto& s = samples[order[i]];
          const auto phi = sc.projected(s.x);
          const auto [bw, h] = sc.violation(s, phi);
          if (bw != kNone && h > 0.0) add_a_gradient(g, m.W, s, bw, scale, K);
        }
        m.A.scale(1.0 - eta * hyper.tau);
        auto& a = m.A.data();
        const auto& gd = g.data();
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= eta * gd[i];
        project_to_ball(m.A, radius_A);
      }
    }
    m.objective_history.push_back(
        joint_objective(samples, m.W, m.A, hyper.lambda, hyper.tau));
  }
  return m;
}

double action_accuracy(const ParserModel& m, std::span<const Document> treebank) {
  std::size_t total = 0;
  std::size_t right = 0;
  for (const auto& doc : treebank) {
    if (!doc.tree) continue;
    auto s = initial_state(static_cast<int>(doc.edus.size()));
    for (const auto& a : oracle(*doc.tree)) {
      const auto sc = score(m, s, doc);
      const bool sh = can_shift(s);
      const bool re = can_reduce(s);
      std::size_t best = kNone;
      for (std::size_t i = 0; i < sc.size(); ++i) {
        const bool legal = i == 0 ? sh : re;
        if (legal && (best == kNone || sc[i] > sc[best])) best = i;
      }
      ++total;
      if (best != kNone && m.actions[best] == a) ++right;
      apply_in_place(s, a);
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(right) / static_cast<double>(total);
}

EvalReport evaluate_parser(const ParserModel& m, std::span<const Document> docs) {
  EvalReport r;
  for (const auto& doc : docs) {
    if (!doc.tree) continue;
    r += parseval(*greedy_parse(m, doc), *doc.tree);
  }
  return r;
}

// ---------------------------------------------------------------------------

void save_parser(const ParserModel& m, const std::filesystem::path& dir) {
  std::string actions;
  for (std::size_t i = 0; i < m.actions.size(); ++i) {
    const auto& a = m.actions[i];
    actions += std::to_string(i) + "\t" +
               (a.is_shift() ? std::string("SHIFT")
                             : "REDUCE\t" + std::string(to_string(a.nuclearity)) + "\t" +
                                   std::string(to_string(a.relation))) +
               "\n";
  }
  write_file(dir / "actions.tsv", actions);
  write_file(dir / "surface.dict.tsv", m.surface_dict.to_tsv());
  write_file(dir / "additional.dict.tsv", m.additional_dict.to_tsv());
  write_file(dir / "A.matrix", matrix_text(m.A));
  std::string w;
  for (std::size_t r = 0; r < m.W.rows(); ++r) {
    w += std::to_string(r) + "\t";
    const auto row = m.W.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) w += ' ';
      w += format_double(row[c]);
    }
    w += "\n";
  }
  write_file(dir / "weights.tsv", w);
  write_file(dir / "hyper.cfg", hyper_cfg(m.hyper));
}

ParserModel load_parser(const std::filesystem::path& dir) {
  ParserModel m;

  const auto hyper_text = read_file(dir / "hyper.cfg");
  for (auto line : lines(hyper_text)) {
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::BadModelFile, "hyper.cfg line without '='");
    auto key = line.substr(0, eq);
    auto val = line.substr(eq + 1);
    if (key == "K") m.hyper.K = parse_uint<std::size_t>(val, "K");
    else if (key == "tau") m.hyper.tau = parse_double(val);
    else if (key == "lambda") m.hyper.lambda = parse_double(val);
    else if (key == "batch_size") m.hyper.batch_size = parse_uint<std::size_t>(val, "batch_size");
    else if (key == "epochs") m.hyper.epochs = parse_uint<int>(val, "epochs");
    else if (key == "seed") m.hyper.seed = parse_uint<std::uint64_t>(val, "seed");
    else throw Error(ErrorCode::BadModelFile, "unknown hyper.cfg key " + std::string(key));
  }

  LegalityTable table;
  std::vector<TransitionAction> listed;
  const auto actions_text = read_file(dir / "actions.tsv");
  for (auto line : lines(actions_text)) {
    auto f = split(line, '\t');
    if (f.size() < 2) throw Error(ErrorCode::BadModelFile, "bad actions.tsv line");
    std::string joined(f[1]);
    for (std::size_t i = 2; i < f.size(); ++i) joined += " " + std::string(f[i]);
    auto a = TransitionAction::parse(joined);
    if (!a || parse_uint<std::size_t>(f[0], "action index") != listed.size())
      throw Error(ErrorCode::BadModelFile, "bad action: " + std::string(line));
    if (!a->is_shift()) table.insert(a->pair());
    listed.push_back(*a);
  }
  m.actions = ActionInventory(table);
  if (m.actions.actions() != listed)
    throw Error(ErrorCode::BadModelFile, "actions.tsv is not in inventory order");

  m.surface_dict = FeatureDictionary::from_tsv(read_file(dir / "surface.dict.tsv"));
  m.additional_dict = FeatureDictionary::from_tsv(read_file(dir / "additional.dict.tsv"));
  m.A = parse_matrix(read_file(dir / "A.matrix"));
  if (m.A.rows() != m.hyper.K || m.A.cols() != m.surface_dict.size())
    throw Error(ErrorCode::DimensionMismatch, "A.matrix does not match K and the surface dictionary");

  const std::size_t cols = 3 * m.hyper.K + m.additional_dict.size();
  m.W = Matrix(m.actions.size(), cols);
  const auto weights_text = read_file(dir / "weights.tsv");
  const auto wl = lines(weights_text);
  if (wl.size() != m.actions.size())
    throw Error(ErrorCode::DimensionMismatch, "weights.tsv row count");
  for (std::size_t r = 0; r < wl.size(); ++r) {
    auto tab = wl[r].find('\t');
    if (tab == std::string_view::npos || parse_uint<std::size_t>(wl[r].substr(0, tab), "row") != r)
      throw Error(ErrorCode::BadModelFile, "bad weights.tsv row " + std::to_string(r));
    auto vals = split(wl[r].substr(tab + 1), ' ');
    if (vals.size() != cols)
      throw Error(ErrorCode::DimensionMismatch,
                  "weights row " + std::to_string(r) + " has " + std::to_string(vals.size()) +
                      " values, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) m.W(r, c) = parse_double(vals[c]);
  }
  return m;
}

// ---------------------------------------------------------------------------

std::vector<ParserHyper> ParserGrid::cells() const {
  std::vector<ParserHyper> out;
  for (auto k : K)
    for (auto t : tau)
      for (auto l : lambda) {
        ParserHyper h = base;
        h.K = k;
        h.tau = t;
        h.lambda = l;
        out.push_back(h);
      }
  return out;
}

std::vector<GridCell> grid_search(std::span<const Document> train,
                                  std::span<const Document> dev,
                                  const ParserGrid& grid, std::size_t jobs) {
  const auto hypers = grid.cells();
  std::vector<GridCell> cells(hypers.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].index = i;
    cells[i].hyper = hypers[i];
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(cells.size(), 1));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const auto model = train_parser(train, cells[i].hyper);
        cells[i].report = evaluate_parser(model, dev);
      } catch (const std::exception& e) {
        cells[i].error = e.what();
      }
    }
  };
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::stable_sort(cells.begin(), cells.end(), [](const GridCell& a, const GridCell& b) {
    if (a.report.has_value() != b.report.has_value()) return a.report.has_value();
    if (!a.report) return a.index < b.index;
    const auto& x = *a.report;
    const auto& y = *b.report;
    if (x.S() != y.S()) return x.S() > y.S();
    if (x.N() != y.N()) return x.N() > y.N();
    if (x.R() != y.R()) return x.R() > y.R();
    return a.index < b.index;
  });
  return cells;
}

std::string grid_report_tsv(std::span<const GridCell> ranked, std::size_t top_n) {
  std::string out = "K\ttau\tlambda\tS\tN\tR\n";
  std::size_t shown = 0;
  for (const auto& c : ranked) {
    if (!c.report || shown == top_n) continue;
    ++shown;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.2f\t%.2f\t%.2f", c.report->S(), c.report->N(),
                  c.report->R());
    out += std::to_string(c.hyper.K) + "\t" + format_double(c.hyper.tau) + "\t" +
           format_double(c.hyper.lambda) + "\t" + buf + "\n";
  }
  return out;
}

}  // namespace rst
