#pragma once

#include <set>
#include <string>
#include <vector>

#include "rst/parser.hpp"
#include "rst/sparse.hpp"
#include "rst/treebank.hpp"

namespace fx {

// Two EDUs joined by Enablement: [must be approved][so that citizenship passes on].
rst::Document approval();
// (r2 d2 (r1 d1 (EDU 1) (EDU 2)) (EDU 3))
rst::NodePtr left_branching3(rst::Nuclearity d1 = rst::Nuclearity::NS,
                             rst::RelationClass r1 = rst::RelationClass::Elaboration,
                             rst::Nuclearity d2 = rst::Nuclearity::SN,
                             rst::RelationClass r2 = rst::RelationClass::Cause);

// Five annotated documents (pos, deprel, heads, sentences); Joint only ever
// appears as NN.
std::vector<rst::Document> treebank5();

// Every (nuclearity, relation) pair a random tree may use.
std::vector<rst::LegalPair> all_pairs();
rst::NodePtr random_tree(rst::Rng& rng, int first, int last,
                         const std::vector<rst::LegalPair>& pairs = all_pairs());
// Tokens, EDUs and simple annotation for a tree over n EDUs.
rst::Document document_for(const rst::NodePtr& tree, rst::Rng& rng,
                           const std::string& doc_id = "doc");

// Fills pos/deprel/head/sentence: the last token of each EDU is a verb
// whose head is ROOT; its other tokens attach to it.
void annotate(rst::Document& doc);

// Documents totalling about `tokens` tokens where an EDU starts exactly
// after each "؛".
std::vector<rst::Document> marker_corpus(std::size_t tokens, std::uint64_t seed);

// Left-branching trees whose nuclearity and relation at each step are
// signalled by a cue word inside the attached EDU. Only the surface
// features see the cue, so learning it needs the projection.
std::vector<rst::Document> cue_treebank(std::size_t count, std::uint64_t seed,
                                        const std::string& prefix);

// Copy of `t` with the NS/SN nuclearity of the nodes covering `spans`
// swapped.
rst::NodePtr flip_nuclearity(const rst::NodePtr& t, const std::set<rst::EduRange>& spans);

// Matched node counts computed by comparing string keys pairwise, with no
// shared code from the evaluator.
struct BruteCounts {
  std::size_t span = 0, nuclearity = 0, relation = 0;
  std::size_t pred = 0, gold = 0;
};
BruteCounts brute_force_match(const rst::Node& pred, const rst::Node& gold);

// Analytic vs central-difference gradient of the joint objective on a toy
// instance, at random points away from hinge kinks.
struct GradCheck {
  double max_rel_error = 0;
  int points = 0;
  std::size_t vocab = 0, K = 0, actions = 0;
};
GradCheck gradient_check(std::uint64_t seed, int points = 20, double h = 1e-5);

std::string data_path(const std::string& name);
std::string read_data(const std::string& name);

}  // namespace fx
