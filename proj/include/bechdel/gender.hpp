#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bechdel/core.hpp"
#include "bechdel/ingest.hpp"

namespace bechdel {

using TokenSet = std::unordered_set<std::string>;

// Name -> gender table built from name frequency counts. Ambiguous names are
// kept with assigned == kUnknown ("dropped") so their counts stay inspectable.
class GenderLexicon {
 public:
  struct Entry {
    std::int64_t male_count = 0;
    std::int64_t female_count = 0;
    Gender assigned = Gender::kUnknown;
  };

  GenderLexicon() = default;
  explicit GenderLexicon(std::unordered_map<std::string, Entry> entries)
      : entries_(std::move(entries)) {}

  // M or F for an assigned token, nullopt when absent or dropped.
  std::optional<Gender> lookup(std::string_view token) const;
  const Entry* find(std::string_view token) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t assigned_count(Gender g) const;
  const std::unordered_map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::unordered_map<std::string, Entry> entries_;
};

// Aggregates counts per lowercase name, removes stoplisted tokens, and assigns
// a gender when its count is at least `ratio` times the other gender's count.
GenderLexicon build_lexicon(const std::vector<NameRecord>& records, const TokenSet& stoplist = {},
                            double ratio = 5.0);

// Gender of the first whitespace-delimited token of `full_name`.
Gender infer_gender(std::string_view full_name, const GenderLexicon& lex);

// Default closed-class word sets used alongside the name lexicon.
const std::vector<std::string>& default_male_words();
const std::vector<std::string>& default_female_words();

class ReferenceLexicon {
 public:
  // Throws Error when the two word sets intersect.
  ReferenceLexicon(GenderLexicon names, TokenSet male_words, TokenSet female_words);
  static ReferenceLexicon with_default_words(GenderLexicon names);

  // Word sets take precedence over the name lexicon.
  std::optional<Gender> classify(std::string_view token) const;

  const GenderLexicon& names() const { return names_; }
  const TokenSet& male_words() const { return male_words_; }
  const TokenSet& female_words() const { return female_words_; }

 private:
  GenderLexicon names_;
  TokenSet male_words_;
  TokenSet female_words_;
};

struct References {
  bool male = false;
  bool female = false;
  bool operator==(const References&) const = default;
};

References detect_references(std::string_view text, const ReferenceLexicon& lex);

struct ProfileKeywords {
  TokenSet mother;
  TokenSet father;
  TokenSet student;

  static ProfileKeywords defaults();
};

struct ProfileFlags {
  bool mother = false;
  bool father = false;
  bool student = false;
  bool operator==(const ProfileFlags&) const = default;
};

ProfileFlags profile_flags(std::string_view bio, const ProfileKeywords& keywords);
ProfileFlags profile_flags(std::string_view bio);

enum class Urbanity { kUrban, kRural, kUnknown };
std::string_view to_string(Urbanity u);

struct Location {
  std::string state;  // empty when unknown
  Urbanity urbanity = Urbanity::kUnknown;
  bool operator==(const Location&) const = default;
};

// Full English names of the US states and DC, keyed by postal code.
const std::vector<std::pair<std::string, std::string>>& us_state_names();

// Resolves free-text locations against the geo tables. Build once, reuse.
class Locator {
 public:
  explicit Locator(const GeoTables& geo);
  Location locate(std::string_view location_raw) const;

 private:
  struct CityPattern {
    std::string pattern;  // normalized, space padded
    std::string state;
    bool top = false;
  };
  struct StatePattern {
    std::string pattern;
    std::string code;
  };
  std::vector<CityPattern> cities_;   // longest first
  std::vector<StatePattern> states_;  // longest first
  TokenSet codes_;
};

Location locate_user(std::string_view location_raw, const GeoTables& geo);

}  // namespace bechdel
