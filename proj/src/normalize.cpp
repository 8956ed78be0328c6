#include "rst/normalize.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "rst/error.hpp"
#include "rst/utf8.hpp"

namespace rst {

namespace {

bool is_ascii_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

bool is_arabic_letter(char32_t c) {
  return (c >= 0x0621 && c <= 0x063A) || (c >= 0x0641 && c <= 0x064A) ||
         (c >= 0x066E && c <= 0x06D3) || c == 0x06D5 ||
         (c >= 0x06FA && c <= 0x06FC);
}

bool is_arabic_mark(char32_t c) {
  return (c >= 0x064B && c <= 0x065F) || c == 0x0670;
}

// Persian letters, marks and ZWNJ only, with at least one letter. Digits,
// Latin text and URLs fail this test and are never joined.
bool word_like(std::u32string_view w) {
  bool letter = false;
  for (char32_t c : w) {
    if (is_arabic_letter(c)) {
      letter = true;
    } else if (!is_arabic_mark(c) && c != utf8::kZwnj) {
      return false;
    }
  }
  return letter;
}

std::vector<std::string_view> split_lines(std::string_view tsv) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= tsv.size()) {
    auto nl = tsv.find('\n', start);
    if (nl == std::string_view::npos) nl = tsv.size();
    auto line = tsv.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

std::u32string parse_codepoints(std::string_view field, std::size_t line) {
  std::u32string out;
  std::istringstream in{std::string(field)};
  std::string tok;
  while (in >> tok) {
    std::string_view hex = tok;
    if (hex.starts_with("U+") || hex.starts_with("u+")) hex.remove_prefix(2);
    unsigned long cp = 0;
    auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
    if (ec != std::errc() || p != hex.data() + hex.size() || hex.empty() ||
        cp > 0x10FFFF)
      throw Error(ErrorCode::BadConfig, "bad code point '" + tok + "'", line);
    out.push_back(static_cast<char32_t>(cp));
  }
  return out;
}

std::string format_codepoints(std::u32string_view s) {
  std::string out;
  for (char32_t c : s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%sU+%04X", out.empty() ? "" : " ",
                  static_cast<unsigned>(c));
    out += buf;
  }
  return out;
}

// Word runs, whitespace runs and single punctuation marks.
enum class PieceKind { Word, Space, Punct };

struct Piece {
  PieceKind kind;
  std::u32string text;
};

std::vector<Piece> pieces(std::u32string_view s) {
  std::vector<Piece> out;
  for (char32_t c : s) {
    PieceKind k = is_ascii_space(c)             ? PieceKind::Space
                  : is_padded_punctuation(c) ? PieceKind::Punct
                                                : PieceKind::Word;
    if (k != PieceKind::Punct && !out.empty() && out.back().kind == k) {
      out.back().text.push_back(c);
    } else {
      out.push_back({k, std::u32string(1, c)});
    }
  }
  return out;
}

const std::vector<std::u32string>& suffix_chain_endings() {
  // Ezafe and pronominal clitics that may follow a plural suffix.
  static const std::vector<std::u32string> endings = [] {
    std::vector<std::u32string> e;
    for (auto s : {"", "ی", "یی", "یم", "یت", "یش", "یمان", "یتان", "یشان",
                   "ست"})
      e.push_back(utf8::decode(s));
    return e;
  }();
  return endings;
}

}  // namespace

bool is_padded_punctuation(char32_t c) {
  switch (c) {
    case 0x060C:  // ،
    case 0x061B:  // ؛
    case 0x061F:  // ؟
    case '.':
    case '!':
    case ':':
    case 0x00AB:  // «
    case 0x00BB:  // »
    case '(':
    case ')':
    case '"':
    case 0x2026:  // …
    case '-':
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------

CharAliasTable::CharAliasTable(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.from.empty())
      throw Error(ErrorCode::BadConfig, "empty alias source");
    for (const auto& other : entries_)
      if (e.to.find(other.from) != std::u32string::npos)
        throw Error(ErrorCode::BadConfig,
                    "alias target " + format_codepoints(e.to) +
                        " contains source " + format_codepoints(other.from));
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.from.size() > b.from.size();
                   });
}

const CharAliasTable& CharAliasTable::standard() {
  static const CharAliasTable table = [] {
    std::vector<Entry> e;
    for (char32_t c : {U'ي', U'ى', U'ے'}) e.push_back({{c}, U"ی"});
    e.push_back({U"ك", U"ک"});
    for (char32_t d = 0; d < 10; ++d)
      e.push_back({{static_cast<char32_t>(0x0660 + d)},
                   {static_cast<char32_t>(0x06F0 + d)}});
    return CharAliasTable(std::move(e));
  }();
  return table;
}

CharAliasTable CharAliasTable::from_tsv(std::string_view tsv) {
  std::vector<Entry> entries;
  std::size_t lineno = 0;
  for (auto line : split_lines(tsv)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::BadConfig, "expected <from>\\t<to>", lineno);
    entries.push_back({parse_codepoints(line.substr(0, tab), lineno),
                       parse_codepoints(line.substr(tab + 1), lineno)});
  }
  return CharAliasTable(std::move(entries));
}

std::string CharAliasTable::to_tsv() const {
  std::string out;
  for (const auto& e : entries_)
    out += format_codepoints(e.from) + "\t" + format_codepoints(e.to) + "\n";
  return out;
}

std::string CharAliasTable::apply(std::string_view text) const {
  const auto in = utf8::decode(text);
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    bool matched = false;
    for (const auto& e : entries_) {
      if (in.compare(i, e.from.size(), e.from) == 0) {
        out += e.to;
        i += e.from.size();
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(in[i++]);
  }
  return utf8::encode(out);
}

// ---------------------------------------------------------------------------

AffixRules::AffixRules(std::vector<AffixRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_)
    if (r.affix.empty()) throw Error(ErrorCode::BadConfig, "empty affix");
}

const AffixRules& AffixRules::standard() {
  static const AffixRules rules({{"می", AffixPosition::Prefix},
                                 {"ها", AffixPosition::Suffix}});
  return rules;
}

AffixRules AffixRules::from_tsv(std::string_view tsv) {
  std::vector<AffixRule> rules;
  std::size_t lineno = 0;
  for (auto line : split_lines(tsv)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::BadConfig, "expected <affix>\\t<position>", lineno);
    const auto pos = line.substr(tab + 1);
    AffixPosition p;
    if (pos == "prefix") {
      p = AffixPosition::Prefix;
    } else if (pos == "suffix") {
      p = AffixPosition::Suffix;
    } else {
      throw Error(ErrorCode::BadConfig,
                  "position must be prefix or suffix, got '" + std::string(pos) + "'",
                  lineno);
    }
    rules.push_back({std::string(line.substr(0, tab)), p});
  }
  return AffixRules(std::move(rules));
}

std::string AffixRules::to_tsv() const {
  std::string out;
  for (const auto& r : rules_)
    out += r.affix + "\t" +
           (r.position == AffixPosition::Prefix ? "prefix" : "suffix") + "\n";
  return out;
}

// ---------------------------------------------------------------------------

Normalizer::Normalizer()
    : Normalizer(CharAliasTable::standard(), AffixRules::standard()) {}

Normalizer::Normalizer(CharAliasTable chars, AffixRules affixes)
    : chars_(std::move(chars)), affixes_(std::move(affixes)) {}

std::string Normalizer::normalize_chars(std::string_view text) const {
  return chars_.apply(text);
}

std::string Normalizer::normalize_words(std::string_view text) const {
  std::vector<std::u32string> prefixes;
  std::vector<std::u32string> suffixes;
  for (const auto& r : affixes_.rules())
    (r.position == AffixPosition::Prefix ? prefixes : suffixes)
        .push_back(utf8::decode(r.affix));

  auto is_affix = [&](const std::u32string& w) {
    return std::find(prefixes.begin(), prefixes.end(), w) != prefixes.end() ||
           std::find(suffixes.begin(), suffixes.end(), w) != suffixes.end();
  };
  auto is_suffix_form = [&](const std::u32string& w) {
    for (const auto& s : suffixes)
      for (const auto& end : suffix_chain_endings())
        if (w == s + end) return true;
    return false;
  };
  auto joinable = [&](const std::u32string& a, const std::u32string& b) {
    const bool prefix_join =
        std::find(prefixes.begin(), prefixes.end(), a) != prefixes.end() &&
        word_like(b) && !is_affix(b);
    const bool suffix_join = is_suffix_form(b) && word_like(a) && !is_affix(a);
    return prefix_join || suffix_join;
  };

  auto ps = pieces(utf8::decode(text));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 2 < ps.size(); ++i) {
      if (ps[i].kind == PieceKind::Word && ps[i + 1].kind == PieceKind::Space &&
          ps[i + 2].kind == PieceKind::Word &&
          joinable(ps[i].text, ps[i + 2].text)) {
        ps[i].text += utf8::kZwnj;
        ps[i].text += ps[i + 2].text;
        ps.erase(ps.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 ps.begin() + static_cast<std::ptrdiff_t>(i) + 3);
        changed = true;
      }
    }
  }
  std::u32string out;
  for (const auto& p : ps) out += p.text;
  return utf8::encode(out);
}

std::string Normalizer::normalize(std::string_view text) const {
  return pad_punctuation(normalize_words(normalize_chars(text)));
}

std::vector<NormalizationRule> Normalizer::rules() const {
  std::vector<NormalizationRule> out;
  std::size_t k = 0;
  for (const auto& e : chars_.entries())
    out.push_back({"char-" + std::to_string(++k), RuleKind::CharMap,
                   format_codepoints(e.from) + " -> " + format_codepoints(e.to)});
  k = 0;
  for (const auto& r : affixes_.rules())
    out.push_back({"affix-" + std::to_string(++k), RuleKind::AffixJoin,
                   r.affix + (r.position == AffixPosition::Prefix ? " (prefix)"
                                                                  : " (suffix)")});
  out.push_back({"punct-pad", RuleKind::PunctPad,
                 "single spaces around punctuation, whitespace collapsed"});
  return out;
}

// ---------------------------------------------------------------------------

std::string pad_punctuation(std::string_view text) {
  std::u32string out;
  bool pending_space = false;
  auto emit = [&](char32_t c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  };
  for (char32_t c : utf8::decode(text)) {
    if (is_ascii_space(c)) {
      pending_space = true;
    } else if (is_padded_punctuation(c)) {
      pending_space = true;
      emit(c);
      pending_space = true;
    } else {
      emit(c);
    }
  }
  return utf8::encode(out);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string normalize_chars(std::string_view text) {
  return CharAliasTable::standard().apply(text);
}

std::string normalize_words(std::string_view text) {
  static const Normalizer n;
  return n.normalize_words(text);
}

std::string normalize(std::string_view text) {
  static const Normalizer n;
  return n.normalize(text);
}

}  // namespace rst
