#include "bechdel/gender.hpp"

#include <algorithm>
#include <map>

#include "bechdel/text.hpp"

namespace bechdel {

std::optional<Gender> GenderLexicon::lookup(std::string_view token) const {
  const Entry* e = find(token);
  if (!e || e->assigned == Gender::kUnknown) return std::nullopt;
  return e->assigned;
}

const GenderLexicon::Entry* GenderLexicon::find(std::string_view token) const {
  auto it = entries_.find(std::string(token));
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t GenderLexicon::assigned_count(Gender g) const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [g](const auto& kv) { return kv.second.assigned == g; }));
}

GenderLexicon build_lexicon(const std::vector<NameRecord>& records, const TokenSet& stoplist,
                            double ratio) {
  if (!(ratio > 1.0)) throw Error("lexicon ratio must be > 1");
  std::unordered_map<std::string, GenderLexicon::Entry> entries;
  for (const auto& r : records) {
    if (r.count < 0) throw Error("negative name count for '" + r.name + "'");
    const std::string name = text::to_lower(text::trim(r.name));
    if (name.empty() || stoplist.count(name)) continue;
    auto& e = entries[name];
    if (r.gender == Gender::kMale) {
      e.male_count += r.count;
    } else if (r.gender == Gender::kFemale) {
      e.female_count += r.count;
    }
  }
  for (auto& [name, e] : entries) {
    const auto m = static_cast<double>(e.male_count);
    const auto f = static_cast<double>(e.female_count);
    const bool male = m >= ratio * f;
    const bool female = f >= ratio * m;
    // Both hold only when both counts are zero.
    if (male && !female) {
      e.assigned = Gender::kMale;
    } else if (female && !male) {
      e.assigned = Gender::kFemale;
    } else {
      e.assigned = Gender::kUnknown;
    }
  }
  return GenderLexicon(std::move(entries));
}

Gender infer_gender(std::string_view full_name, const GenderLexicon& lex) {
  full_name = text::trim(full_name);
  const auto end = full_name.find_first_of(" \t\r\n");
  const std::string_view first = full_name.substr(0, end);
  std::string token;
  for (char c : first) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z')) {
      token.push_back(c);
    } else if (u >= 'A' && u <= 'Z') {
      token.push_back(static_cast<char>(u - 'A' + 'a'));
    }
  }
  if (token.empty()) return Gender::kUnknown;
  return lex.lookup(token).value_or(Gender::kUnknown);
}

const std::vector<std::string>& default_male_words() {
  static const std::vector<std::string> words = {
      "he",      "him",      "his",       "himself", "man",     "men",      "boy",
      "boys",    "guy",      "guys",      "male",    "gentleman", "gentlemen", "father",
      "dad",     "daddy",    "brother",   "bro",     "son",     "husband",  "boyfriend",
      "uncle",   "nephew",   "grandfather", "grandpa", "king",  "prince",   "mr",
      "sir",     "dude",     "groom",     "fiance",  "lad",     "bloke"};
  return words;
}

const std::vector<std::string>& default_female_words() {
  static const std::vector<std::string> words = {
      "she",     "her",      "hers",      "herself", "woman",   "women",    "girl",
      "girls",   "gal",      "gals",      "female",  "lady",    "ladies",   "mother",
      "mom",     "mommy",    "sister",    "sis",     "daughter", "wife",    "girlfriend",
      "aunt",    "niece",    "grandmother", "grandma", "queen", "princess", "mrs",
      "madam",   "ma'am",    "bride",     "fiancee", "lass",    "chick"};
  return words;
}

ReferenceLexicon::ReferenceLexicon(GenderLexicon names, TokenSet male_words, TokenSet female_words)
    : names_(std::move(names)),
      male_words_(std::move(male_words)),
      female_words_(std::move(female_words)) {
  std::vector<std::string> shared;
  for (const auto& w : male_words_) {
    if (female_words_.count(w)) shared.push_back(w);
  }
  if (!shared.empty()) {
    std::sort(shared.begin(), shared.end());
    std::string list;
    for (const auto& w : shared) list += (list.empty() ? "" : ", ") + w;
    throw Error("male and female word sets overlap: " + list);
  }
}

ReferenceLexicon ReferenceLexicon::with_default_words(GenderLexicon names) {
  const auto& m = default_male_words();
  const auto& f = default_female_words();
  return ReferenceLexicon(std::move(names), TokenSet(m.begin(), m.end()),
                          TokenSet(f.begin(), f.end()));
}

std::optional<Gender> ReferenceLexicon::classify(std::string_view token) const {
  const std::string key(token);
  if (male_words_.count(key)) return Gender::kMale;
  if (female_words_.count(key)) return Gender::kFemale;
  return names_.lookup(token);
}

References detect_references(std::string_view input, const ReferenceLexicon& lex) {
  References refs;
  text::for_each_token(input, [&](std::string_view tok) {
    if (auto g = lex.classify(tok)) {
      if (*g == Gender::kMale) refs.male = true;
      if (*g == Gender::kFemale) refs.female = true;
    }
    return !(refs.male && refs.female);
  });
  return refs;
}

ProfileKeywords ProfileKeywords::defaults() {
  ProfileKeywords k;
  k.mother = {"mother", "mom", "mommy", "mama", "momma", "mum", "mummy", "mothers", "moms",
              "stepmom", "stepmother", "grandma", "grandmother"};
  k.father = {"father", "dad", "daddy", "papa", "pops", "fathers", "dads", "stepdad",
              "stepfather", "grandpa", "grandfather"};
  k.student = {"student",  "students",   "college",    "university",    "univ",
               "studying", "undergrad",  "undergraduate", "grad",        "freshman",
               "sophomore", "highschool", "alumnus",   "phd",           "campus"};
  return k;
}

ProfileFlags profile_flags(std::string_view bio, const ProfileKeywords& keywords) {
  ProfileFlags flags;
  text::for_each_token(bio, [&](std::string_view tok) {
    const std::string key(tok);
    if (keywords.mother.count(key)) flags.mother = true;
    if (keywords.father.count(key)) flags.father = true;
    if (keywords.student.count(key)) flags.student = true;
    return true;
  });
  return flags;
}

ProfileFlags profile_flags(std::string_view bio) {
  static const ProfileKeywords defaults = ProfileKeywords::defaults();
  return profile_flags(bio, defaults);
}

std::string_view to_string(Urbanity u) {
  switch (u) {
    case Urbanity::kUrban:
      return "urban";
    case Urbanity::kRural:
      return "rural";
    case Urbanity::kUnknown:
      return "unknown";
  }
  return "unknown";
}

const std::vector<std::pair<std::string, std::string>>& us_state_names() {
  static const std::vector<std::pair<std::string, std::string>> names = {
      {"AL", "Alabama"},        {"AK", "Alaska"},        {"AZ", "Arizona"},
      {"AR", "Arkansas"},       {"CA", "California"},    {"CO", "Colorado"},
      {"CT", "Connecticut"},    {"DE", "Delaware"},      {"DC", "District of Columbia"},
      {"FL", "Florida"},        {"GA", "Georgia"},       {"HI", "Hawaii"},
      {"ID", "Idaho"},          {"IL", "Illinois"},      {"IN", "Indiana"},
      {"IA", "Iowa"},           {"KS", "Kansas"},        {"KY", "Kentucky"},
      {"LA", "Louisiana"},      {"ME", "Maine"},         {"MD", "Maryland"},
      {"MA", "Massachusetts"},  {"MI", "Michigan"},      {"MN", "Minnesota"},
      {"MS", "Mississippi"},    {"MO", "Missouri"},      {"MT", "Montana"},
      {"NE", "Nebraska"},       {"NV", "Nevada"},        {"NH", "New Hampshire"},
      {"NJ", "New Jersey"},     {"NM", "New Mexico"},    {"NY", "New York"},
      {"NC", "North Carolina"}, {"ND", "North Dakota"},  {"OH", "Ohio"},
      {"OK", "Oklahoma"},       {"OR", "Oregon"},        {"PA", "Pennsylvania"},
      {"RI", "Rhode Island"},   {"SC", "South Carolina"}, {"SD", "South Dakota"},
      {"TN", "Tennessee"},      {"TX", "Texas"},         {"UT", "Utah"},
      {"VT", "Vermont"},        {"VA", "Virginia"},      {"WA", "Washington"},
      {"WV", "West Virginia"},  {"WI", "Wisconsin"},     {"WY", "Wyoming"}};
  return names;
}

namespace {

// Alphanumeric runs of `s` with their original spelling.
std::vector<std::string> raw_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z')) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string normalize_phrase(std::string_view s) {
  std::string out;
  for (const auto& t : raw_tokens(s)) {
    if (!out.empty()) out.push_back(' ');
    out += text::to_lower(t);
  }
  return out;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto end = s.find(' ', pos);
    if (end == std::string::npos) end = s.size();
    out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive, in tokens
};

// All occurrences of `pattern` (space separated tokens) in `tokens`.
std::vector<Span> find_all(const std::vector<std::string>& tokens, const std::string& pattern) {
  const auto pat = split_spaces(pattern);
  std::vector<Span> out;
  if (pat.empty() || pat.size() > tokens.size()) return out;
  for (std::size_t i = 0; i + pat.size() <= tokens.size(); ++i) {
    if (std::equal(pat.begin(), pat.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
      out.push_back({i, i + pat.size()});
    }
  }
  return out;
}

bool overlaps(Span a, Span b) { return a.begin < b.end && b.begin < a.end; }

}  // namespace

Locator::Locator(const GeoTables& geo) {
  std::map<std::pair<std::string, std::string>, bool> seen;
  for (const auto& c : geo.top_cities) {
    const auto key = std::make_pair(normalize_phrase(c.name), c.state);
    if (key.first.empty() || seen.count(key)) continue;
    seen[key] = true;
    cities_.push_back({key.first, c.state, true});
  }
  for (const auto& a : geo.aliases) {
    const std::string city = normalize_phrase(a.city);
    const bool top = std::any_of(geo.top_cities.begin(), geo.top_cities.end(), [&](const auto& c) {
      return c.state == a.state && normalize_phrase(c.name) == city;
    });
    const auto key = std::make_pair(normalize_phrase(a.alias), a.state);
    if (key.first.empty() || seen.count(key)) continue;
    seen[key] = true;
    cities_.push_back({key.first, a.state, top});
  }
  std::stable_sort(cities_.begin(), cities_.end(), [](const auto& a, const auto& b) {
    return std::count(a.pattern.begin(), a.pattern.end(), ' ') >
           std::count(b.pattern.begin(), b.pattern.end(), ' ');
  });

  for (const auto& [code, name] : us_state_names()) {
    states_.push_back({normalize_phrase(name), code});
    codes_.insert(code);
  }
  for (const auto& s : geo.states) codes_.insert(s.code);
  std::stable_sort(states_.begin(), states_.end(), [](const auto& a, const auto& b) {
    return std::count(a.pattern.begin(), a.pattern.end(), ' ') >
           std::count(b.pattern.begin(), b.pattern.end(), ' ');
  });
}

Location Locator::locate(std::string_view location_raw) const {
  const auto raw = raw_tokens(location_raw);
  std::vector<std::string> tokens;
  tokens.reserve(raw.size());
  for (const auto& t : raw) tokens.push_back(text::to_lower(t));

  struct CityHit {
    Span span;
    const CityPattern* city;
  };
  std::vector<CityHit> city_hits;
  for (const auto& c : cities_) {
    for (const auto& span : find_all(tokens, c.pattern)) city_hits.push_back({span, &c});
  }

  struct StateHit {
    Span span;
    std::string code;
  };
  std::vector<StateHit> state_hits;
  for (const auto& s : states_) {
    for (const auto& span : find_all(tokens, s.pattern)) {
      const bool taken = std::any_of(state_hits.begin(), state_hits.end(),
                                     [&](const StateHit& h) { return overlaps(h.span, span); });
      if (!taken) state_hits.push_back({span, s.code});
    }
  }
  // Postal codes count when written in capitals, or as a trailing ", xx".
  const auto trimmed = text::trim(location_raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& t = raw[i];
    if (t.size() != 2) continue;
    const std::string upper = text::to_upper(t);
    if (!codes_.count(upper)) continue;
    bool ok = t == upper;
    if (!ok && i + 1 == raw.size() && i > 0) {
      auto before = trimmed.substr(0, trimmed.size() - 2);
      before = text::trim(before);
      ok = !before.empty() && before.back() == ',' && text::iequals(trimmed.substr(trimmed.size() - 2), t);
    }
    if (!ok) continue;
    const Span span{i, i + 1};
    const bool taken = std::any_of(state_hits.begin(), state_hits.end(),
                                   [&](const StateHit& h) { return overlaps(h.span, span); });
    if (!taken) state_hits.push_back({span, upper});
  }

  // A state mention strictly inside a longer city name ("kansas" in "kansas
  // city") is ignored; one that coincides with a city name is weak evidence.
  std::vector<const StateHit*> strong;
  std::vector<const StateHit*> weak;
  for (const auto& s : state_hits) {
    bool inside = false;
    bool coincides = false;
    for (const auto& c : city_hits) {
      if (c.span.begin == s.span.begin && c.span.end == s.span.end) {
        coincides = true;
      } else if (c.span.begin <= s.span.begin && s.span.end <= c.span.end) {
        inside = true;
      }
    }
    if (inside) continue;
    (coincides ? weak : strong).push_back(&s);
  }
  auto by_position = [](const auto* a, const auto* b) { return a->span.begin < b->span.begin; };
  std::sort(strong.begin(), strong.end(), by_position);
  std::sort(weak.begin(), weak.end(), by_position);
  std::sort(city_hits.begin(), city_hits.end(), [](const CityHit& a, const CityHit& b) {
    return a.span.begin < b.span.begin;
  });

  auto city_in = [&](const std::vector<const StateHit*>& states) -> const CityHit* {
    for (const auto& c : city_hits) {
      for (const auto* s : states) {
        if (c.city->state == s->code) return &c;
      }
    }
    return nullptr;
  };
  auto from_city = [](const CityHit& c) {
    return Location{c.city->state, c.city->top ? Urbanity::kUrban : Urbanity::kRural};
  };
  auto unambiguous_city = [&]() -> const CityHit* {
    if (city_hits.empty()) return nullptr;
    for (const auto& c : city_hits) {
      if (c.city->state != city_hits.front().city->state) return nullptr;
    }
    // Prefer a top-list match when an alias and a city both hit.
    for (const auto& c : city_hits) {
      if (c.city->top) return &c;
    }
    return &city_hits.front();
  };

  if (!strong.empty()) {
    if (const auto* c = city_in(strong)) return from_city(*c);
    return Location{strong.front()->code, Urbanity::kRural};
  }
  if (!weak.empty()) {
    if (const auto* c = city_in(weak)) return from_city(*c);
  }
  if (const auto* c = unambiguous_city()) return from_city(*c);
  if (!weak.empty()) return Location{weak.front()->code, Urbanity::kRural};
  return Location{};
}

Location locate_user(std::string_view location_raw, const GeoTables& geo) {
  return Locator(geo).locate(location_raw);
}

}  // namespace bechdel
