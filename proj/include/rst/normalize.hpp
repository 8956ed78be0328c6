#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rst {

enum class RuleKind { CharMap, AffixJoin, PunctPad };

struct NormalizationRule {
  std::string rule_id;
  RuleKind kind;
  std::string description;
};

// Code point substitutions. TSV lines: `<from-seq>\t<to-seq>` where a
// sequence is space-separated code points written as `U+064A` or `064A`.
// Targets may not contain any source, so the mapping is idempotent.
class CharAliasTable {
 public:
  struct Entry {
    std::u32string from;
    std::u32string to;
  };

  // Arabic Yeh/Alef Maksura/Yeh Barree -> Farsi Yeh, Arabic Kaf -> Keheh,
  // Arabic-Indic digits -> Extended Arabic-Indic digits.
  static const CharAliasTable& standard();
  static CharAliasTable from_tsv(std::string_view tsv);

  explicit CharAliasTable(std::vector<Entry> entries);

  std::string apply(std::string_view text) const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::string to_tsv() const;

 private:
  std::vector<Entry> entries_;  // longest source first
};

enum class AffixPosition { Prefix, Suffix };

struct AffixRule {
  std::string affix;
  AffixPosition position;
};

// TSV lines: `<affix>\t<prefix|suffix>`.
class AffixRules {
 public:
  // "می" prefix and "ها" suffix.
  static const AffixRules& standard();
  static AffixRules from_tsv(std::string_view tsv);

  explicit AffixRules(std::vector<AffixRule> rules);

  const std::vector<AffixRule>& rules() const { return rules_; }
  std::string to_tsv() const;

 private:
  std::vector<AffixRule> rules_;
};

class Normalizer {
 public:
  Normalizer();
  Normalizer(CharAliasTable chars, AffixRules affixes);

  std::string normalize_chars(std::string_view text) const;
  // Replaces the whitespace between an affix and its host word with ZWNJ.
  // Applied to a fixed point; words containing non-Persian material are
  // never joined.
  std::string normalize_words(std::string_view text) const;
  // chars, then words, then punctuation padding.
  std::string normalize(std::string_view text) const;

  std::vector<NormalizationRule> rules() const;

 private:
  CharAliasTable chars_;
  AffixRules affixes_;
};

// Pads {، ؛ ؟ . ! : « » ( ) " … -} with single spaces, collapses whitespace
// runs and trims.
std::string pad_punctuation(std::string_view text);

std::vector<std::string> tokenize(std::string_view text);

bool is_padded_punctuation(char32_t c);

// Standard-table conveniences.
std::string normalize_chars(std::string_view text);
std::string normalize_words(std::string_view text);
std::string normalize(std::string_view text);

}  // namespace rst
