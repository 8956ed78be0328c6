#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rst/ingest.hpp"
#include "rst/sparse.hpp"
#include "rst/treebank.hpp"

namespace rst {

inline constexpr std::string_view kPad = "<PAD>";

// Feature templates for token i: word/pos/dep at offsets -2..+2, head
// direction of token i, and cluster prefixes of token i when a cluster table
// is given.
std::vector<std::string> token_feature_names(std::span<const Token> tokens,
                                             std::size_t i,
                                             const ClusterTable* clusters = nullptr);

SparseVector extract_token_features(std::span<const Token> tokens, std::size_t i,
                                    FeatureDictionary& dict,
                                    const ClusterTable* clusters = nullptr);

struct SegmenterHyper {
  double C = 1.0;  // inverse regularization: lambda = 1 / (C * n)
  int epochs = 10;
  std::uint64_t seed = 1;
  bool balance_classes = true;  // weight positives by negatives / positives
};

struct SegmenterModel {
  FeatureDictionary dictionary;
  std::vector<double> weights;
  double bias = 0.0;
  SegmenterHyper hyper;
  std::vector<double> loss_history;  // primal objective after each epoch

  double decision_value(const SparseVector& x) const;
};

// Trains on tokens 1..n-1 of every document; label is "starts an EDU".
SegmenterModel train_segmenter(std::span<const Document> docs,
                               const SegmenterHyper& hyper = {},
                               const ClusterTable* clusters = nullptr);

std::vector<bool> predict_boundaries(const SegmenterModel& model,
                                     std::span<const Token> tokens,
                                     const ClusterTable* clusters = nullptr);

std::vector<Edu> segment(const SegmenterModel& model,
                         const std::vector<Token>& tokens,
                         const ClusterTable* clusters = nullptr);

struct SegmentationCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t tokens = 0;  // including token 0 of each document

  SegmentationCounts& operator+=(const SegmentationCounts& o);
};

struct SegmentationScores {
  double accuracy = 0.0;      // interior tokens
  double accuracy_all = 0.0;  // all tokens, token 0 counted as correct
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  SegmentationCounts counts;
};

SegmentationCounts segmentation_counts(const std::vector<Edu>& pred,
                                       const std::vector<Edu>& gold);
SegmentationScores score_segmentation(const SegmentationCounts& c);
SegmentationScores evaluate_segmentation(const std::vector<Edu>& pred,
                                         const std::vector<Edu>& gold);

// segmenter.dict.tsv and segmenter.weights.tsv inside `dir`.
void save_segmenter(const SegmenterModel& model, const std::filesystem::path& dir);
SegmenterModel load_segmenter(const std::filesystem::path& dir);

}  // namespace rst
