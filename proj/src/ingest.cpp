#include "rst/ingest.hpp"

#include <charconv>

#include "json.hpp"

#include "rst/error.hpp"
#include "rst/utf8.hpp"

namespace rst {

namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::optional<long> parse_int(std::string_view s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

bool is_bitstring(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(++lineno, line);
    start = nl + 1;
  }
}

}  // namespace

std::vector<Sentence> read_conllu(std::string_view text) {
  std::vector<Sentence> out;
  Sentence current;
  std::vector<long> raw_heads;
  auto flush = [&](std::size_t lineno) {
    if (current.empty()) return;
    for (std::size_t i = 0; i < current.size(); ++i) {
      const long h = raw_heads[i];
      if (h == 0) {
        current[i].head = kRootHead;
      } else if (h < 0 || static_cast<std::size_t>(h) > current.size() ||
                 static_cast<std::size_t>(h - 1) == i) {
        throw Error(ErrorCode::NonIntegerHead,
                    "head " + std::to_string(h) + " out of range in sentence "
                    "ending at line " + std::to_string(lineno),
                    lineno);
      } else {
        current[i].head = static_cast<int>(h - 1);
      }
    }
    out.push_back(std::move(current));
    current.clear();
    raw_heads.clear();
  };

  std::size_t last_line = 0;
  for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    last_line = lineno;
    if (line.empty()) {
      flush(lineno);
      return;
    }
    if (line.front() == '#') return;
    const auto cols = split(line, '\t');
    if (cols.size() != 10)
      throw Error(ErrorCode::BadColumnCount,
                  "line " + std::to_string(lineno) + " has " +
                      std::to_string(cols.size()) + " columns",
                  lineno);
    const auto id = cols[0];
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos)
      return;
    const auto head = parse_int(cols[6]);
    if (!head)
      throw Error(ErrorCode::NonIntegerHead,
                  "line " + std::to_string(lineno) + ": '" +
                      std::string(cols[6]) + "'",
                  lineno);
    Token t;
    t.index = current.size();
    t.surface = std::string(cols[1]);
    t.stem = cols[2] == "_" ? std::string() : std::string(cols[2]);
    t.pos = std::string(cols[3]);
    t.deprel = std::string(cols[7]);
    t.sentence = static_cast<int>(out.size());
    current.push_back(std::move(t));
    raw_heads.push_back(*head);
  });
  flush(last_line);
  return out;
}

// ---------------------------------------------------------------------------

void ClusterTable::add(std::string word, std::string bits) {
  table_[std::move(word)] = std::move(bits);
}

std::optional<std::string> ClusterTable::lookup(std::string_view word) const {
  auto it = table_.find(std::string(word));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

ClusterTable load_clusters(std::string_view tsv) {
  ClusterTable table;
  for_each_line(tsv, [&](std::size_t lineno, std::string_view line) {
    if (line.empty()) return;
    const auto cols = split(line, '\t');
    std::string_view word;
    std::string_view bits;
    if (cols.size() == 3) {
      bits = cols[0];
      word = cols[1];
    } else if (cols.size() == 2) {
      word = cols[0];
      bits = cols[1];
    } else {
      throw Error(ErrorCode::BadBitstring,
                  "line " + std::to_string(lineno) + ": expected 2 or 3 fields",
                  lineno);
    }
    if (!is_bitstring(bits))
      throw Error(ErrorCode::BadBitstring,
                  "line " + std::to_string(lineno) + ": '" + std::string(bits) +
                      "'",
                  lineno);
    table.add(std::string(word), std::string(bits));
  });
  return table;
}

// ---------------------------------------------------------------------------

bool surfaces_equivalent(std::string_view a, std::string_view b) {
  if (a == b) return true;
  auto canon = [](std::string_view s) {
    auto u = utf8::decode(s);
    for (auto& c : u)
      if (c == utf8::kZwnj) c = U' ';
    return u;
  };
  return canon(a) == canon(b);
}

std::vector<Token> align(std::span<const std::string> doc_tokens,
                         const std::vector<Sentence>& sentences,
                         const ClusterTable* clusters) {
  std::vector<Token> out;
  out.reserve(doc_tokens.size());
  std::size_t offset = 0;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      const std::size_t i = offset + tok.index;
      if (i >= doc_tokens.size())
        throw Error(ErrorCode::AlignmentMismatch,
                    "index " + std::to_string(i) + ": document ended, annotation has '" +
                        tok.surface + "'",
                    i);
      if (!surfaces_equivalent(doc_tokens[i], tok.surface))
        throw Error(ErrorCode::AlignmentMismatch,
                    "index " + std::to_string(i) + ": '" + doc_tokens[i] +
                        "' vs '" + tok.surface + "'",
                    i);
      Token t = tok;
      t.index = i;
      t.surface = doc_tokens[i];
      if (tok.head >= 0) t.head = static_cast<int>(offset) + tok.head;
      if (clusters) t.cluster = clusters->lookup(t.surface);
      out.push_back(std::move(t));
    }
    offset += sent.size();
  }
  if (out.size() != doc_tokens.size())
    throw Error(ErrorCode::AlignmentMismatch,
                "index " + std::to_string(out.size()) + ": '" +
                    doc_tokens[out.size()] + "' vs annotation end",
                out.size());
  return out;
}

Document align_document(const Document& doc,
                        const std::vector<Sentence>& sentences,
                        const ClusterTable* clusters) {
  std::vector<std::string> surfaces;
  surfaces.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) surfaces.push_back(t.surface);
  Document out = doc;
  out.tokens = align(surfaces, sentences, clusters);
  return out;
}

// ---------------------------------------------------------------------------

std::string to_json_line(const Document& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["source"] = std::string(to_string(doc.source));
  json toks = json::array();
  for (const auto& t : doc.tokens) {
    toks.push_back({{"surface", t.surface},
                    {"pos", t.pos},
                    {"deprel", t.deprel},
                    {"head", t.head},
                    {"cluster", t.cluster ? json(*t.cluster) : json(nullptr)},
                    {"stem", t.stem},
                    {"sentence", t.sentence}});
  }
  j["tokens"] = std::move(toks);
  json edus = json::array();
  for (const auto& e : doc.edus) edus.push_back({e.start, e.end});
  j["edus"] = std::move(edus);
  j["tree"] = doc.tree ? json(write_bracketed(*doc.tree)) : json(nullptr);
  return j.dump();
}

Document from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("JSON: ") + e.what());
  }
  try {
    Document doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    const auto src = j.value("source", std::string("Other"));
    doc.source = src == "Etemad"   ? Source::Etemad
                 : src == "Shargh" ? Source::Shargh
                 : src == "Meidan" ? Source::Meidan
                                   : Source::Other;
    for (const auto& jt : j.at("tokens")) {
      Token t;
      t.index = doc.tokens.size();
      t.surface = jt.at("surface").get<std::string>();
      t.pos = jt.value("pos", std::string());
      t.deprel = jt.value("deprel", std::string());
      t.head = jt.value("head", kNoHead);
      if (jt.contains("cluster") && !jt["cluster"].is_null())
        t.cluster = jt["cluster"].get<std::string>();
      t.stem = jt.value("stem", std::string());
      t.sentence = jt.value("sentence", -1);
      doc.tokens.push_back(std::move(t));
    }
    std::vector<std::size_t> starts;
    for (const auto& je : j.at("edus")) starts.push_back(je.at(0).get<std::size_t>());
    doc.edus = edus_from_starts(doc.tokens, starts);
    for (std::size_t k = 0; k < doc.edus.size(); ++k)
      if (doc.edus[k].end != j["edus"][k].at(1).get<std::size_t>())
        throw Error(ErrorCode::ParseError, "EDUs of '" + doc.doc_id +
                                               "' are not contiguous");
    if (j.contains("tree") && !j["tree"].is_null())
      doc.tree = read_bracketed(j["tree"].get<std::string>());
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("JSON document: ") + e.what());
  }
}

std::string write_jsonl(std::span<const Document> docs) {
  std::string out;
  for (const auto& d : docs) {
    out += to_json_line(d);
    out += '\n';
  }
  return out;
}

std::vector<Document> read_jsonl(std::string_view text) {
  std::vector<Document> out;
  for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (line.empty()) return;
    try {
      out.push_back(from_json_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what(),
                  lineno);
    }
  });
  return out;
}

}  // namespace rst
