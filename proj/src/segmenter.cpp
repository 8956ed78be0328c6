#include "rst/segmenter.hpp"

#include <charconv>
#include <cmath>

#include "rst/error.hpp"
#include "rst/io.hpp"

namespace rst {

namespace {

constexpr std::array<int, 5> kOffsets = {-2, -1, 0, 1, 2};

std::string offset_tag(int o) {
  return o > 0 ? "+" + std::to_string(o) : std::to_string(o);
}

struct Sample {
  SparseVector x;
  double y;       // +1 boundary, -1 otherwise
  double weight;  // class weight
};

// Weights held as scale * v so the L2 shrink of each step is O(1).
struct ScaledWeights {
  std::vector<double> v;
  double scale = 1.0;
  double bias = 0.0;

  double score(const SparseVector& x) const { return scale * x.dot(v) + bias; }

  void shrink(double factor) {
    bias *= factor;
    if (factor == 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      scale = 1.0;
      return;
    }
    scale *= factor;
    if (scale < 1e-100) {
      for (auto& w : v) w *= scale;
      scale = 1.0;
    }
  }

  void add(const SparseVector& x, double step) {
    x.axpy(step / scale, v);
    bias += step;
  }

  std::vector<double> dense() const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = scale * v[i];
    return out;
  }
};

double objective(const ScaledWeights& w, const std::vector<Sample>& samples,
                 double lambda) {
  double sq = 0.0;
  for (double x : w.v) sq += x * x;
  sq = sq * w.scale * w.scale + w.bias * w.bias;
  double loss = 0.0;
  for (const auto& s : samples)
    loss += s.weight * std::max(0.0, 1.0 - s.y * w.score(s.x));
  return 0.5 * lambda * sq + loss / static_cast<double>(samples.size());
}

}  // namespace

std::vector<std::string> token_feature_names(std::span<const Token> tokens,
                                             std::size_t i,
                                             const ClusterTable* clusters) {
  if (i >= tokens.size())
    throw Error(ErrorCode::IndexOutOfRange,
                "token " + std::to_string(i) + " of " + std::to_string(tokens.size()),
                i);
  std::vector<std::string> names;
  names.reserve(20);
  for (int o : kOffsets) {
    const auto j = static_cast<long>(i) + o;
    const bool inside = j >= 0 && j < static_cast<long>(tokens.size());
    const Token* t = inside ? &tokens[static_cast<std::size_t>(j)] : nullptr;
    const auto tag = offset_tag(o);
    names.push_back("word[" + tag + "]=" + (t ? t->surface : std::string(kPad)));
    names.push_back("pos[" + tag + "]=" + (t ? t->pos : std::string(kPad)));
    names.push_back("dep[" + tag + "]=" + (t ? t->deprel : std::string(kPad)));
  }
  const Token& cur = tokens[i];
  const char* dir = cur.head < 0                               ? "ROOT"
                    : cur.head < static_cast<int>(i)           ? "LEFT"
                                                               : "RIGHT";
  names.push_back(std::string("headdir=") + dir);
  if (clusters) {
    if (auto bits = clusters->lookup(cur.surface)) {
      for (auto len : clusters->prefix_lengths())
        names.push_back("cluster" + std::to_string(len) + "[0]=" +
                        bits->substr(0, std::min(len, bits->size())));
    }
  }
  return names;
}

SparseVector extract_token_features(std::span<const Token> tokens, std::size_t i,
                                    FeatureDictionary& dict,
                                    const ClusterTable* clusters) {
  return dict.vectorize(token_feature_names(tokens, i, clusters));
}

double SegmenterModel::decision_value(const SparseVector& x) const {
  return x.dot(weights) + bias;
}

SegmenterModel train_segmenter(std::span<const Document> docs,
                               const SegmenterHyper& hyper,
                               const ClusterTable* clusters) {
  SegmenterModel model;
  model.hyper = hyper;

  std::vector<Sample> samples;
  std::size_t positives = 0;
  for (const auto& doc : docs) {
    std::vector<bool> starts(doc.tokens.size(), false);
    for (const auto& e : doc.edus)
      if (e.start < starts.size()) starts[e.start] = true;
    for (std::size_t i = 1; i < doc.tokens.size(); ++i) {
      const bool pos = starts[i];
      positives += pos ? 1 : 0;
      samples.push_back(
          {extract_token_features(doc.tokens, i, model.dictionary, clusters),
           pos ? 1.0 : -1.0, 1.0});
    }
  }
  model.dictionary.freeze();
  const std::size_t negatives = samples.size() - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorCode::DegenerateLabels,
                std::to_string(positives) + " boundary and " +
                    std::to_string(negatives) + " non-boundary tokens");
  if (hyper.balance_classes) {
    const double w = static_cast<double>(negatives) / static_cast<double>(positives);
    for (auto& s : samples)
      if (s.y > 0) s.weight = w;
  }

  const double n = static_cast<double>(samples.size());
  const double lambda = 1.0 / (hyper.C * n);
  ScaledWeights w;
  w.v.assign(model.dictionary.size(), 0.0);

  Rng rng(hyper.seed);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (auto idx : order) {
      ++t;
      const auto& s = samples[idx];
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = s.y * w.score(s.x);
      w.shrink(1.0 - eta * lambda);
      if (margin < 1.0) w.add(s.x, eta * s.weight * s.y);
    }
    model.loss_history.push_back(objective(w, samples, lambda));
  }
  model.weights = w.dense();
  model.bias = w.bias;
  return model;
}

std::vector<bool> predict_boundaries(const SegmenterModel& model,
                                     std::span<const Token> tokens,
                                     const ClusterTable* clusters) {
  std::vector<bool> out(tokens.size(), false);
  if (tokens.empty()) return out;
  out[0] = true;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    std::vector<std::size_t> ids;
    for (const auto& name : token_feature_names(tokens, i, clusters))
      if (auto id = model.dictionary.find(name)) ids.push_back(*id);
    out[i] = model.decision_value(SparseVector::binary(std::move(ids))) > 0.0;
  }
  return out;
}

std::vector<Edu> segment(const SegmenterModel& model,
                         const std::vector<Token>& tokens,
                         const ClusterTable* clusters) {
  const auto b = predict_boundaries(model, tokens, clusters);
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) starts.push_back(i);
  return edus_from_starts(tokens, starts);
}

// ---------------------------------------------------------------------------

SegmentationCounts& SegmentationCounts::operator+=(const SegmentationCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  tokens += o.tokens;
  return *this;
}

SegmentationCounts segmentation_counts(const std::vector<Edu>& pred,
                                       const std::vector<Edu>& gold) {
  auto length = [](const std::vector<Edu>& e) -> std::size_t {
    return e.empty() ? 0 : e.back().end + 1;
  };
  const std::size_t n = length(gold);
  if (length(pred) != n)
    throw Error(ErrorCode::LengthMismatch,
                "predicted EDUs cover " + std::to_string(length(pred)) +
                    " tokens, gold " + std::to_string(n));
  std::vector<bool> p(n, false);
  std::vector<bool> g(n, false);
  for (const auto& e : pred) p[e.start] = true;
  for (const auto& e : gold) g[e.start] = true;
  SegmentationCounts c;
  c.tokens = n;
  for (std::size_t i = 1; i < n; ++i) {
    if (p[i] && g[i]) ++c.tp;
    else if (p[i]) ++c.fp;
    else if (g[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

SegmentationScores score_segmentation(const SegmentationCounts& c) {
  SegmentationScores s;
  s.counts = c;
  const double interior = static_cast<double>(c.tp + c.fp + c.fn + c.tn);
  const double correct = static_cast<double>(c.tp + c.tn);
  s.accuracy = interior > 0 ? correct / interior : 1.0;
  const double docs_first = static_cast<double>(c.tokens) - interior;
  s.accuracy_all =
      c.tokens > 0 ? (correct + docs_first) / static_cast<double>(c.tokens) : 1.0;
  s.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) /
                                      static_cast<double>(c.tp + c.fp)
                                : 0.0;
  s.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) /
                                   static_cast<double>(c.tp + c.fn)
                             : 0.0;
  s.f1 = s.precision + s.recall > 0
             ? 2 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  // Both sides empty of boundaries: nothing to find, nothing wrong.
  if (c.tp + c.fp + c.fn == 0) s.precision = s.recall = s.f1 = 1.0;
  return s;
}

SegmentationScores evaluate_segmentation(const std::vector<Edu>& pred,
                                         const std::vector<Edu>& gold) {
  return score_segmentation(segmentation_counts(pred, gold));
}

// ---------------------------------------------------------------------------

void save_segmenter(const SegmenterModel& model, const std::filesystem::path& dir) {
  write_file(dir / "segmenter.dict.tsv", model.dictionary.to_tsv());
  std::string w;
  w += "#bias\t" + format_double(model.bias) + "\n";
  for (std::size_t i = 0; i < model.weights.size(); ++i)
    w += std::to_string(i) + "\t" + format_double(model.weights[i]) + "\n";
  write_file(dir / "segmenter.weights.tsv", w);
}

SegmenterModel load_segmenter(const std::filesystem::path& dir) {
  SegmenterModel m;
  m.dictionary = FeatureDictionary::from_tsv(read_file(dir / "segmenter.dict.tsv"));
  m.weights.assign(m.dictionary.size(), 0.0);
  const auto text = read_file(dir / "segmenter.weights.tsv");
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + start, nl - start);
    start = nl + 1;
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::BadModelFile, "weights line without tab", lineno);
    const auto key = line.substr(0, tab);
    const double v = parse_double(line.substr(tab + 1));
    if (key == "#bias") {
      m.bias = v;
      continue;
    }
    std::size_t id = 0;
    auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
    if (ec != std::errc() || p != key.data() + key.size() || id >= m.weights.size())
      throw Error(ErrorCode::BadModelFile, "weight id out of range", lineno);
    m.weights[id] = v;
  }
  return m;
}

}  // namespace rst
