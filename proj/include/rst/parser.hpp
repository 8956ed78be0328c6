#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rst/eval.hpp"
#include "rst/sparse.hpp"
#include "rst/treebank.hpp"

namespace rst {

// ---------------------------------------------------------------------------
// Transitions

struct TransitionAction {
  enum class Kind : unsigned char { Shift, Reduce };

  Kind kind = Kind::Shift;
  Nuclearity nuclearity = Nuclearity::NS;
  RelationClass relation = RelationClass::Span;

  static TransitionAction shift() { return {}; }
  static TransitionAction reduce(Nuclearity nuc, RelationClass rel) {
    return {Kind::Reduce, nuc, rel};
  }
  bool is_shift() const { return kind == Kind::Shift; }
  LegalPair pair() const { return {nuclearity, relation}; }

  // "SHIFT" or "REDUCE NS Enablement"
  std::string str() const;
  static std::optional<TransitionAction> parse(std::string_view s);

  bool operator==(const TransitionAction& o) const {
    return kind == o.kind &&
           (kind == Kind::Shift ||
            (nuclearity == o.nuclearity && relation == o.relation));
  }
};

// Shift first, then every legal Reduce in (nuclearity, relation) order.
class ActionInventory {
 public:
  ActionInventory() : actions_{TransitionAction::shift()} {}
  explicit ActionInventory(const LegalityTable& table);

  std::size_t size() const { return actions_.size(); }
  const TransitionAction& operator[](std::size_t i) const { return actions_[i]; }
  const std::vector<TransitionAction>& actions() const { return actions_; }
  std::optional<std::size_t> index_of(const TransitionAction& a) const;
  const LegalityTable& legality() const { return table_; }

 private:
  LegalityTable table_;
  std::vector<TransitionAction> actions_;
};

struct ParserState {
  std::vector<NodePtr> stack;  // top at back
  int next_edu = 1;            // id of the queue front
  int edu_count = 0;
  std::vector<TransitionAction> history;

  std::size_t queue_size() const {
    return static_cast<std::size_t>(edu_count + 1 - next_edu);
  }
  bool terminal() const { return queue_size() == 0 && stack.size() == 1; }
};

ParserState initial_state(int edu_count);

bool can_shift(const ParserState& s);
bool can_reduce(const ParserState& s);
// In inventory order.
std::vector<TransitionAction> legal_actions(const ParserState& s,
                                            const LegalityTable& table);

// Throws IllegalAction.
void apply_in_place(ParserState& s, const TransitionAction& a);
ParserState apply(ParserState s, const TransitionAction& a);
// Runs the sequence from the initial state; throws IllegalAction if it does
// not end in a terminal state.
NodePtr execute(std::span<const TransitionAction> actions, int edu_count);

// Post-order oracle; throws NonBinaryTree.
std::vector<TransitionAction> oracle(const Node& tree);

// Throws EmptyTreebank when no document has a tree.
LegalityTable learn_legal_pairs(std::span<const Document> treebank);
LegalityTable learn_legal_pairs(std::span<const NodePtr> trees);

// ---------------------------------------------------------------------------
// Features

enum StatePosition : std::size_t { kStackTop = 0, kStackSecond = 1, kQueueFront = 2 };
inline constexpr std::array<const char*, 3> kPositionNames = {"s0", "s1", "q0"};
inline constexpr const char* kPosAbsent = "pos_absent";

struct StateFeatureNames {
  std::array<std::vector<std::string>, 3> surface;
  std::vector<std::string> additional;
};

struct StateFeatures {
  std::array<SparseVector, 3> surface;
  SparseVector additional;
};

StateFeatureNames state_feature_names(const ParserState& s, const Document& doc);
StateFeatures extract_state_features(const ParserState& s, const Document& doc,
                                     FeatureDictionary& surface,
                                     FeatureDictionary& additional);

// ---------------------------------------------------------------------------
// Model

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double squared_norm() const;
  void scale(double c);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using ProjectionMatrix = Matrix;

// A times each surface vector, concatenated s0 | s1 | q0. Throws
// DimensionMismatch for feature ids >= A.cols().
std::vector<double> project(const ProjectionMatrix& A,
                            const std::array<SparseVector, 3>& surface);

struct ParserHyper {
  std::size_t K = 30;
  double tau = 0.01;
  double lambda = 1.0;
  std::size_t batch_size = 500;
  int epochs = 20;
  std::uint64_t seed = 1;

  // Throws BadConfig.
  void check() const;
};

struct ParserModel {
  ActionInventory actions;
  FeatureDictionary surface_dict;
  FeatureDictionary additional_dict;
  ProjectionMatrix A;  // K x |surface_dict|
  Matrix W;            // |actions| x (3K + |additional_dict|)
  ParserHyper hyper;
  std::vector<double> objective_history;  // after each epoch

  // Frozen-dictionary lookup; unknown features are dropped.
  StateFeatures encode(const ParserState& s, const Document& doc) const;
  // One score per inventory entry.
  std::vector<double> scores(const StateFeatures& x) const;
};

std::vector<double> score(const ParserModel& m, const ParserState& s,
                          const Document& doc);
// Parses over doc.edus; doc.tree is ignored.
NodePtr greedy_parse(const ParserModel& m, const Document& doc);

// ---------------------------------------------------------------------------
// Training

struct TrainingSample {
  StateFeatures x;
  std::size_t gold = 0;  // inventory index
  bool shift_legal = false;
  bool reduce_legal = false;
};

// Oracle states over every tree; grows the dictionaries unless frozen.
std::vector<TrainingSample> training_samples(std::span<const Document> treebank,
                                             const ActionInventory& actions,
                                             FeatureDictionary& surface,
                                             FeatureDictionary& additional);

// sum_i hinge_i + lambda/2 |W|^2 + tau/2 |A|_F^2, where hinge_i is
// max(0, 1 + max_{legal a != gold} s_a - s_gold) and 0 for forced moves.
double joint_objective(std::span<const TrainingSample> samples, const Matrix& W,
                       const ProjectionMatrix& A, double lambda, double tau);

// Subgradients of the objective with the loss sum scaled by loss_scale.
// Ties for the best wrong action go to the lowest inventory index.
void joint_gradient(std::span<const TrainingSample> samples, const Matrix& W,
                    const ProjectionMatrix& A, double lambda, double tau,
                    Matrix* grad_W, ProjectionMatrix* grad_A,
                    double loss_scale = 1.0);

// Throws EmptyTreebank, BadConfig.
ParserModel train_parser(std::span<const Document> treebank,
                         const ParserHyper& hyper);

// Fraction of oracle states where the legal argmax is the gold action.
double action_accuracy(const ParserModel& m, std::span<const Document> treebank);
EvalReport evaluate_parser(const ParserModel& m, std::span<const Document> docs);

void save_parser(const ParserModel& m, const std::filesystem::path& dir);
ParserModel load_parser(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Grid search

struct ParserGrid {
  std::vector<std::size_t> K = {30, 60, 90, 150};
  std::vector<double> tau = {1.0, 0.1, 0.01, 0.001};
  std::vector<double> lambda = {1, 10, 50, 100};
  ParserHyper base;  // batch size, epochs, seed

  std::vector<ParserHyper> cells() const;  // K-major, then tau, then lambda
};

struct GridCell {
  std::size_t index = 0;  // position in ParserGrid::cells()
  ParserHyper hyper;
  std::optional<EvalReport> report;  // empty when training failed
  std::string error;
};

// Ranked by S, then N, then R (descending), then cell index; failed cells last.
std::vector<GridCell> grid_search(std::span<const Document> train,
                                  std::span<const Document> dev,
                                  const ParserGrid& grid, std::size_t jobs = 1);

// K, tau, lambda, S, N, R for the first top_n successful cells.
std::string grid_report_tsv(std::span<const GridCell> ranked, std::size_t top_n = 5);

}  // namespace rst
