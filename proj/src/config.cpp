#include "rst/config.hpp"

#include <charconv>
#include <set>

#include "rst/error.hpp"
#include "rst/io.hpp"

namespace rst {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& m) { throw Error(ErrorCode::BadConfig, m); }

template <typename T>
T to_uint(std::string_view key, std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    bad(std::string(key) + ": not a non-negative integer: '" + std::string(s) + "'");
  return v;
}

double to_double(std::string_view key, std::string_view s) {
  try {
    return parse_double(s);
  } catch (const std::exception&) {
    bad(std::string(key) + ": not a number: '" + std::string(s) + "'");
  }
}

bool to_bool(std::string_view key, std::string_view s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  bad(std::string(key) + ": not a boolean: '" + std::string(s) + "'");
}

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "corpus", "input",  "conllu",     "clusters",   "model",      "output",
      "train",  "dev",    "test",       "K",          "tau",        "lambda",
      "epochs", "batch_size", "seg_C",  "seg_epochs", "seg_balance", "seed",
      "jobs",   "macro"};
  return keys;
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config c;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(start, nl - start));
    start = nl + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": expected key = value",
                  lineno);
    const auto key = trim(line.substr(0, eq));
    if (key.empty())
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(lineno) + ": empty key", lineno);
    c.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::optional<std::string> Config::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Config::list(std::string_view key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v) return out;
  std::string_view s = *v;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    auto item = trim(s.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

RunConfig RunConfig::from(const Config& c) {
  for (const auto& [k, v] : c.values())
    if (!known_keys().contains(k)) bad("unknown key '" + k + "'");

  RunConfig r;
  auto path = [&](const char* key, std::filesystem::path& dst) {
    if (auto v = c.get(key)) dst = *v;
  };
  path("corpus", r.corpus);
  path("input", r.input);
  path("conllu", r.conllu);
  path("clusters", r.clusters);
  path("model", r.model);
  path("output", r.output);

  r.train_ids = c.list("train");
  r.dev_ids = c.list("dev");
  r.test_ids = c.list("test");
  std::set<std::string> seen;
  for (const auto* ids : {&r.train_ids, &r.dev_ids, &r.test_ids})
    for (const auto& id : *ids)
      if (!seen.insert(id).second) bad("document '" + id + "' appears in more than one split");

  if (c.get("K")) {
    r.grid.K.clear();
    for (const auto& v : c.list("K")) r.grid.K.push_back(to_uint<std::size_t>("K", v));
  }
  if (c.get("tau")) {
    r.grid.tau.clear();
    for (const auto& v : c.list("tau")) r.grid.tau.push_back(to_double("tau", v));
  }
  if (c.get("lambda")) {
    r.grid.lambda.clear();
    for (const auto& v : c.list("lambda")) r.grid.lambda.push_back(to_double("lambda", v));
  }
  if (r.grid.K.empty() || r.grid.tau.empty() || r.grid.lambda.empty())
    bad("K, tau and lambda need at least one value");
  if (auto v = c.get("epochs")) r.grid.base.epochs = to_uint<int>("epochs", *v);
  if (auto v = c.get("batch_size"))
    r.grid.base.batch_size = to_uint<std::size_t>("batch_size", *v);
  if (auto v = c.get("seg_C")) r.segmenter.C = to_double("seg_C", *v);
  if (auto v = c.get("seg_epochs")) r.segmenter.epochs = to_uint<int>("seg_epochs", *v);
  if (auto v = c.get("seg_balance")) r.segmenter.balance_classes = to_bool("seg_balance", *v);
  if (auto v = c.get("jobs")) r.jobs = to_uint<std::size_t>("jobs", *v);
  if (auto v = c.get("macro")) r.macro = to_bool("macro", *v);
  if (!(r.segmenter.C > 0)) bad("seg_C must be positive");
  if (r.segmenter.epochs < 1) bad("seg_epochs must be positive");

  r.set_seed(c.get("seed") ? to_uint<std::uint64_t>("seed", *c.get("seed")) : 1);
  for (const auto& h : r.grid.cells()) h.check();
  return r;
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  grid.base.seed = s;
  segmenter.seed = s;
  parser = grid.base;
  parser.K = grid.K.front();
  parser.tau = grid.tau.front();
  parser.lambda = grid.lambda.front();
}

void RunConfig::check_paths() const {
  for (const auto* p : {&corpus, &input, &conllu, &clusters})
    if (!p->empty() && !std::filesystem::exists(*p))
      bad("path does not exist: " + p->string());
}

}  // namespace rst
