#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bechdel/core.hpp"

namespace bechdel {

struct Message {
  std::string msg_id;
  std::string author_id;
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  std::string text;
  std::vector<std::string> mentioned_ids;

  bool operator==(const Message&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::string full_name;
  std::string bio;
  std::string location_raw;
};

struct MovieRecord {
  std::string movie_id;
  std::string title;
  std::optional<int> bechdel_b;  // 0..3
  bool disputed = false;
  std::optional<std::int64_t> views;
  std::optional<std::int64_t> likes;
  std::optional<std::int64_t> dislikes;
};

struct ShareRecord {
  std::string user_id;
  std::string movie_id;
};

struct CityRecord {
  std::string name;
  std::string state;
};

struct CityAlias {
  std::string alias;
  std::string city;
  std::string state;
};

struct StateRecord {
  std::string code;
  double avg_income = 0;
  double gini = 0;
  std::int64_t largest_city_latitude = 0;   // arc seconds north
  std::int64_t largest_city_longitude = 0;  // arc seconds west
};

struct GeoTables {
  std::vector<CityRecord> top_cities;
  std::vector<StateRecord> states;
  std::vector<CityAlias> aliases;

  const StateRecord* find_state(std::string_view code) const;
};

struct NameRecord {
  std::string name;
  Gender gender = Gender::kUnknown;
  std::int64_t count = 0;
};

// A row that failed validation and was skipped.
struct RowIssue {
  std::size_t line = 0;
  std::string reason;
};

template <typename T>
struct ReadResult {
  std::vector<T> records;
  std::vector<RowIssue> rejected;
};

// Line-delimited JSON messages. Blank lines are ignored; malformed lines are
// skipped and listed in `rejected`.
ReadResult<Message> parse_messages(std::string_view text);
ReadResult<Message> read_messages(const std::string& path);

std::string message_to_json_line(const Message& m);

struct AuthorPair {
  std::string first;   // lexicographically smaller id
  std::string second;

  static AuthorPair make(std::string a, std::string b);
  bool operator==(const AuthorPair&) const = default;
  auto operator<=>(const AuthorPair&) const = default;
};

enum class MentionRule {
  kBidirectionalSum,  // a->b plus b->a >= threshold
  kBothDirections,    // as above, and each direction at least once
};

// Pairs of distinct authors that exchanged at least `min_mentions` mentions.
// A message counts once per distinct mentioned id. Sorted ascending.
std::vector<AuthorPair> filter_interacting_pairs(const std::vector<Message>& messages,
                                                 std::int64_t min_mentions = 10,
                                                 MentionRule rule = MentionRule::kBidirectionalSum);

// CSV readers. Rows violating field invariants are skipped and reported;
// duplicate primary ids throw IngestError listing every offender.
ReadResult<UserProfile> read_profiles(const std::string& path);
ReadResult<UserProfile> parse_profiles(std::string_view text, std::string_view source = "profiles");
ReadResult<MovieRecord> read_movies(const std::string& path);
ReadResult<MovieRecord> parse_movies(std::string_view text, std::string_view source = "movies");
ReadResult<ShareRecord> read_shares(const std::string& path);
ReadResult<ShareRecord> parse_shares(std::string_view text, std::string_view source = "shares");

ReadResult<StateRecord> parse_states(std::string_view text, std::string_view source = "states");
ReadResult<CityRecord> parse_cities(std::string_view text, std::string_view source = "cities");
ReadResult<CityAlias> parse_aliases(std::string_view text, std::string_view source = "aliases");
GeoTables read_geo(const std::string& states_path, const std::string& cities_path,
                   const std::string& aliases_path = "");

// Shares whose user or movie id is not among the loaded records.
std::vector<ShareRecord> dangling_shares(const std::vector<ShareRecord>& shares,
                                         const std::vector<UserProfile>& profiles,
                                         const std::vector<MovieRecord>& movies);

// Name frequency rows `name,gender,count`; an optional header row is skipped.
ReadResult<NameRecord> parse_name_records(std::string_view text, std::string_view source = "names");
ReadResult<NameRecord> read_name_records(const std::string& path);

// One token per line, trimmed and lowercased; blank lines and '#' comments skipped.
std::vector<std::string> parse_token_list(std::string_view text);
std::vector<std::string> read_token_list(const std::string& path);

}  // namespace bechdel
