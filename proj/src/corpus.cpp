#include "rst/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rst/error.hpp"
#include "rst/ingest.hpp"
#include "rst/io.hpp"
#include "rst/sparse.hpp"

namespace fs = std::filesystem;

namespace rst {

namespace {

Document load_rs3_file(const fs::path& p, const RelationAliasTable& aliases) {
  const auto id = p.stem().string();
  try {
    Document d = read_rs3(read_file(p), id, aliases);
    if (d.tree) d.tree = binarize(d.tree);
    return d;
  } catch (const Error& e) {
    throw Error(e.code(), id + ": " + e.detail(), e.position());
  }
}

}  // namespace

std::vector<Document> load_corpus(const fs::path& path, const RelationAliasTable& aliases) {
  std::vector<Document> docs;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".rs3") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) docs.push_back(load_rs3_file(f, aliases));
    return docs;
  }
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "no such corpus: " + path.string());
  if (path.extension() == ".jsonl") {
    docs = read_jsonl(read_file(path));
    for (auto& d : docs)
      if (d.tree) d.tree = binarize(d.tree);
    return docs;
  }
  docs.push_back(load_rs3_file(path, aliases));
  return docs;
}

void write_rs3_dir(std::span<const Document> docs, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& d : docs)
    if (d.tree) write_file(dir / (d.doc_id + ".rs3"), write_rs3(d));
}

SplitIds default_split(std::span<const Document> docs, std::uint64_t seed) {
  std::map<Source, std::vector<std::string>> by_source;
  for (const auto& d : docs) by_source[d.source].push_back(d.doc_id);
  Rng rng(seed);
  SplitIds out;
  for (auto& [src, ids] : by_source) {
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);
    const auto held =
        static_cast<std::size_t>(std::lround(static_cast<double>(ids.size()) / 15.0));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i < held) out.dev.push_back(ids[i]);
      else if (i < 2 * held) out.test.push_back(ids[i]);
      else out.train.push_back(ids[i]);
    }
  }
  for (auto* v : {&out.train, &out.dev, &out.test}) std::sort(v->begin(), v->end());
  return out;
}

CorpusSplit split_corpus(std::vector<Document> docs, const SplitIds& explicit_ids,
                         std::uint64_t seed) {
  const bool given = !explicit_ids.train.empty() || !explicit_ids.dev.empty() ||
                     !explicit_ids.test.empty();
  const SplitIds ids = given ? explicit_ids : default_split(docs, seed);
  std::map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < docs.size(); ++i) where[docs[i].doc_id] = i;
  CorpusSplit out;
  auto take = [&](const std::vector<std::string>& list, std::vector<Document>& dst) {
    for (const auto& id : list) {
      auto it = where.find(id);
      if (it == where.end())
        throw Error(ErrorCode::BadConfig, "split lists unknown document '" + id + "'");
      dst.push_back(docs[it->second]);
    }
  };
  take(ids.train, out.train);
  take(ids.dev, out.dev);
  take(ids.test, out.test);
  return out;
}

}  // namespace rst
