#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rst/commands.hpp"
#include "rst/error.hpp"

namespace {

using Command = int (*)(const rst::RunConfig&, rst::CommandIo);

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat key = value config file");
  for (const char* key : {"seed", "corpus", "input", "conllu", "clusters", "model", "output",
                          "train", "dev", "test", "K", "tau", "lambda", "epochs",
                          "batch_size", "seg_C", "seg_epochs", "jobs"}) {
    const std::string flag = std::string("--") + key;
    sub->add_option(flag, f.values[key], "overrides `" + std::string(key) + "` in the config");
  }
  sub->add_flag_function(
      "--macro", [&f](std::int64_t) { f.values["macro"] = "1"; },
      "macro-average over documents");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RST discourse parsing toolkit"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::pair<Command, std::string>> commands = {
      {"normalize", {rst::cmd_normalize, "normalize every file of --input into --output"}},
      {"ingest", {rst::cmd_ingest, "align --corpus with CoNLL-U files in --conllu, write --output .jsonl"}},
      {"stats", {rst::cmd_stats, "corpus statistics for --corpus"}},
      {"train-seg", {rst::cmd_train_seg, "train the EDU segmenter into --model"}},
      {"segment", {rst::cmd_segment, "segment --input .jsonl with --model into --output"}},
      {"train-parse", {rst::cmd_train_parse, "train the parser into --model"}},
      {"parse", {rst::cmd_parse, "parse --input with --model, write rs3 files to --output"}},
      {"eval", {rst::cmd_eval, "score --input trees against gold --corpus"}},
      {"gridsearch", {rst::cmd_gridsearch, "grid search over K, tau, lambda on the dev split"}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, c] : commands) {
    auto* sub = app.add_subcommand(name, c.second);
    add_common(sub, flags);
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rst::kExitOk : rst::kExitUsage;
  }

  rst::RunConfig cfg;
  try {
    rst::Config c;
    if (!flags.config.empty()) c = rst::Config::load(flags.config);
    for (const auto& [k, v] : flags.values)
      if (!v.empty()) c.set(k, v);
    cfg = rst::RunConfig::from(c);
    cfg.check_paths();
  } catch (const rst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == rst::ErrorCode::IoError ? rst::kExitFailure : rst::kExitUsage;
  }

  for (const auto& [name, sub] : subs)
    if (sub->parsed()) return commands.at(name).first(cfg, {std::cout, std::cerr});
  return rst::kExitUsage;
}
