#pragma once

#include <iosfwd>
#include <string>

#include "rst/config.hpp"
#include "rst/treebank.hpp"

namespace rst {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommandIo {
  std::ostream& out;
  std::ostream& err;
};

// Each command returns an exit code; library errors are reported on err as
// "error: <code>: <detail>" and give kExitFailure.
int cmd_normalize(const RunConfig& cfg, CommandIo io);    // input dir -> output dir
int cmd_ingest(const RunConfig& cfg, CommandIo io);       // corpus + conllu -> output .jsonl
int cmd_stats(const RunConfig& cfg, CommandIo io);        // corpus
int cmd_train_seg(const RunConfig& cfg, CommandIo io);    // corpus (train split) -> model dir
int cmd_segment(const RunConfig& cfg, CommandIo io);      // model + input .jsonl -> output .jsonl
int cmd_train_parse(const RunConfig& cfg, CommandIo io);  // corpus (train split) -> model dir
int cmd_parse(const RunConfig& cfg, CommandIo io);        // model + input -> output rs3 dir
int cmd_eval(const RunConfig& cfg, CommandIo io);         // input (pred) vs corpus (gold)
int cmd_gridsearch(const RunConfig& cfg, CommandIo io);   // corpus train/dev -> grid TSV

// Per-source corpus counts followed by relation occurrence tables.
std::string stats_report(std::span<const Document> docs);

}  // namespace rst
