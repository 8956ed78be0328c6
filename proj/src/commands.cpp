#include "rst/commands.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <ostream>

#include "rst/corpus.hpp"
#include "rst/error.hpp"
#include "rst/eval.hpp"
#include "rst/ingest.hpp"
#include "rst/io.hpp"
#include "rst/normalize.hpp"
#include "rst/parser.hpp"
#include "rst/segmenter.hpp"

namespace fs = std::filesystem;

namespace rst {

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int guarded(CommandIo io, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
  }
  return kExitFailure;
}

void require(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(ErrorCode::BadConfig, std::string("missing --") + what);
}

std::optional<ClusterTable> maybe_clusters(const RunConfig& cfg) {
  if (cfg.clusters.empty()) return std::nullopt;
  return load_clusters(read_file(cfg.clusters));
}

CorpusSplit load_split(const RunConfig& cfg) {
  require(cfg.corpus, "corpus");
  return split_corpus(load_corpus(cfg.corpus), {cfg.train_ids, cfg.dev_ids, cfg.test_ids},
                      cfg.seed);
}

std::string normalize_text(std::string_view text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    const bool has_nl = nl != std::string_view::npos;
    if (!has_nl) nl = text.size();
    out += normalize(text.substr(start, nl - start));
    if (has_nl) out += '\n';
    start = nl + 1;
  }
  return out;
}

}  // namespace

std::string stats_report(std::span<const Document> docs) {
  std::map<Source, std::vector<Document>> groups;
  for (const auto& d : docs) groups[d.source].push_back(d);

  std::string out =
      "\tDocuments\tAverage Words per Document\tEDUs\tSpans\tNuclei\tSatellites\n";
  auto row = [&](const std::string& name, const CorpusStats& s) {
    out += name + "\t" + std::to_string(s.documents) + "\t" +
           fixed(s.avg_words_per_doc(), 0) + "\t" + std::to_string(s.edu_count) + "\t" +
           std::to_string(s.span_count) + "\t" + std::to_string(s.nucleus_count) + "\t" +
           std::to_string(s.satellite_count) + "\n";
  };
  for (const auto& [src, group] : groups)
    if (groups.size() > 1 || src != Source::Other) row(std::string(to_string(src)), corpus_stats(group));
  const auto all = corpus_stats(docs);
  row("Corpus", all);

  out += "\nRelation\tOccurrences (#)\tOccurrences (%)\n";
  const auto merged = all.merged_histogram();
  const double total = static_cast<double>(all.histogram_total());
  for (auto cls : all_relation_classes()) {
    auto it = merged.find(cls);
    const std::size_t n = it == merged.end() ? 0 : it->second;
    out += std::string(to_string(cls)) + "\t" + std::to_string(n) + "\t" +
           fixed(total > 0 ? 100.0 * static_cast<double>(n) / total : 0.0, 2) + "\n";
  }

  out += "\nLabel\tOccurrences (#)\n";
  for (const auto& [label, n] : all.relation_histogram)
    out += label.str() + "\t" + std::to_string(n) + "\n";
  return out;
}

int cmd_normalize(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.input, "input");
    require(cfg.output, "output");
    if (!fs::is_directory(cfg.input))
      throw Error(ErrorCode::IoError, "not a directory: " + cfg.input.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(cfg.input))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    fs::create_directories(cfg.output);
    if (files.empty()) {
      io.err << "warning: no input files in " << cfg.input.string() << "\n";
      return kExitOk;
    }
    std::size_t failed = 0;
    for (const auto& f : files) {
      try {
        write_file(cfg.output / fs::relative(f, cfg.input), normalize_text(read_file(f)));
      } catch (const Error& e) {
        ++failed;
        io.err << "error: " << e.what() << "\n";
      }
    }
    io.out << "normalized " << files.size() - failed << " of " << files.size() << " files\n";
    return failed == 0 ? kExitOk : kExitFailure;
  });
}

int cmd_ingest(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.corpus, "corpus");
    require(cfg.conllu, "conllu");
    require(cfg.output, "output");
    const auto clusters = maybe_clusters(cfg);
    auto docs = load_corpus(cfg.corpus);
    std::vector<Document> aligned;
    for (const auto& d : docs) {
      const auto path = cfg.conllu / (d.doc_id + ".conllu");
      try {
        aligned.push_back(
            align_document(d, read_conllu(read_file(path)), clusters ? &*clusters : nullptr));
      } catch (const Error& e) {
        const auto where = e.position() == Error::npos
                               ? std::string()
                               : " (token " + std::to_string(e.position()) + ")";
        throw Error(e.code(), d.doc_id + where + ": " + e.detail(), e.position());
      }
    }
    write_file(cfg.output, write_jsonl(aligned));
    io.out << "ingested " << aligned.size() << " documents\n";
    return kExitOk;
  });
}

int cmd_stats(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.corpus, "corpus");
    const auto docs = load_corpus(cfg.corpus);
    io.out << stats_report(docs);
    return kExitOk;
  });
}

int cmd_train_seg(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.model, "model");
    const auto split = load_split(cfg);
    const auto clusters = maybe_clusters(cfg);
    const auto model =
        train_segmenter(split.train, cfg.segmenter, clusters ? &*clusters : nullptr);
    save_segmenter(model, cfg.model);
    io.out << "segmenter: " << split.train.size() << " documents, "
           << model.dictionary.size() << " features, objective "
           << format_double(model.loss_history.empty() ? 0.0 : model.loss_history.back())
           << "\n";
    return kExitOk;
  });
}

int cmd_segment(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.model, "model");
    require(cfg.input, "input");
    require(cfg.output, "output");
    const auto model = load_segmenter(cfg.model);
    const auto clusters = maybe_clusters(cfg);
    auto docs = load_corpus(cfg.input);
    SegmentationCounts counts;
    std::size_t scored = 0;
    for (auto& d : docs) {
      auto pred = segment(model, d.tokens, clusters ? &*clusters : nullptr);
      if (!d.edus.empty()) {
        counts += segmentation_counts(pred, d.edus);
        ++scored;
      }
      if (pred != d.edus) d.tree = nullptr;
      d.edus = std::move(pred);
    }
    write_file(cfg.output, write_jsonl(docs));
    if (scored > 0) {
      const auto s = score_segmentation(counts);
      io.out << "P " << fixed(100 * s.precision, 2) << " R " << fixed(100 * s.recall, 2)
             << " F1 " << fixed(100 * s.f1, 2) << " accuracy " << fixed(100 * s.accuracy, 2)
             << "\n";
    }
    return kExitOk;
  });
}

int cmd_train_parse(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.model, "model");
    const auto split = load_split(cfg);
    const auto model = train_parser(split.train, cfg.parser);
    save_parser(model, cfg.model);
    io.out << "parser: " << split.train.size() << " documents, " << model.actions.size()
           << " actions, training action accuracy "
           << fixed(100 * action_accuracy(model, split.train), 2) << "\n";
    return kExitOk;
  });
}

int cmd_parse(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.model, "model");
    require(cfg.input, "input");
    require(cfg.output, "output");
    const auto model = load_parser(cfg.model);
    auto docs = load_corpus(cfg.input);
    for (auto& d : docs) {
      try {
        d.tree = greedy_parse(model, d);
      } catch (const Error& e) {
        throw Error(e.code(), d.doc_id + ": " + e.detail(), e.position());
      }
    }
    write_rs3_dir(docs, cfg.output);
    io.out << "parsed " << docs.size() << " documents\n";
    return kExitOk;
  });
}

int cmd_eval(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    require(cfg.input, "input");
    require(cfg.corpus, "corpus");
    const auto pred = load_corpus(cfg.input);
    const auto gold = load_corpus(cfg.corpus);
    std::map<std::string, const Document*> by_id;
    for (const auto& p : pred) by_id[p.doc_id] = &p;
    EvalReport report;
    for (const auto& g : gold) {
      if (!g.tree) continue;
      auto it = by_id.find(g.doc_id);
      if (it == by_id.end() || !it->second->tree)
        throw Error(ErrorCode::MissingTree, g.doc_id + ": no predicted tree");
      try {
        report += parseval(*it->second->tree, *g.tree);
      } catch (const Error& e) {
        throw Error(e.code(), g.doc_id + ": " + e.detail(), e.position());
      }
    }
    io.out << format_triple(report, cfg.macro) << "\n";
    fs::path dir = cfg.output;
    if (dir.empty()) dir = fs::is_directory(cfg.input) ? cfg.input : cfg.input.parent_path();
    write_file(dir / "eval.tsv", report_tsv(report));
    write_file(dir / "confusion.tsv", report.confusion.to_tsv());
    return kExitOk;
  });
}

int cmd_gridsearch(const RunConfig& cfg, CommandIo io) {
  return guarded(io, [&] {
    const auto split = load_split(cfg);
    if (split.dev.empty()) throw Error(ErrorCode::BadConfig, "development split is empty");
    const auto ranked = grid_search(split.train, split.dev, cfg.grid, cfg.jobs);
    for (const auto& c : ranked)
      if (!c.report) io.err << "cell " << c.index << " failed: " << c.error << "\n";
    io.out << grid_report_tsv(ranked, 5);
    if (!cfg.output.empty()) write_file(cfg.output, grid_report_tsv(ranked, ranked.size()));
    return kExitOk;
  });
}

}  // namespace rst
